#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prodgeo/classify.hpp"
#include "prodgeo/derivatives.hpp"
#include "prodgeo/econ.hpp"
#include "prodgeo/geom.hpp"
#include "prodgeo/grid.hpp"
#include "prodgeo/io.hpp"
#include "prodgeo/models.hpp"

namespace prodgeo::cli {

inline constexpr const char* tool_name = "prodgeo";
inline constexpr const char* tool_version = "0.1.0";

/// Process exit codes.
enum Exit : int {
    ok = 0,
    check_failed = 1,  // verify-theorem: some trial failed
    bad_input = 2,     // arguments, spec parse or validation
    eval_domain = 3,   // evaluation left the smooth domain
};

using io::Json;

// ---------------------------------------------------------------------------
// Report assembly

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline Json report_header(const std::string& command, bool timestamp) {
    Json j;
    j["tool"] = tool_name;
    j["version"] = tool_version;
    j["command"] = command;
    if (timestamp) j["timestamp"] = utc_timestamp();
    return j;
}

inline Json matrix_json(const Matrix& m) {
    Json a = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(io::real(m(i, j)));
        a.push_back(std::move(row));
    }
    return a;
}

/// Every econ and geom quantity at one point.
struct PointAnalysis {
    EvalPoint point;
    Jet2 jet;
    std::optional<ElasticityVector> elasticity;
    std::optional<MrsMatrix> mrs;
    CurvatureReport curvature;
    std::optional<double> closed_form_det;
    std::vector<std::string> warnings;
};

inline PointAnalysis analyze_point(const ProductionModel& model, const EvalPoint& point) {
    PointAnalysis a{point, jet_eval(model, point), {}, {}, {}, {}, {}};
    try {
        a.elasticity = elasticity_from_jet(a.jet, point);
    } catch (const degenerate_error& e) {
        a.warnings.push_back(e.what());
    }
    try {
        a.mrs = mrs_from_jet(a.jet);
    } catch (const degenerate_error& e) {
        a.warnings.push_back(e.what());
    }
    a.curvature = curvature_from_jet(a.jet);
    if (a.curvature.ill_conditioned)
        a.warnings.push_back("Hessian pivots span more than 12 orders of magnitude; determinant may be inaccurate");
    if (quasi_sum_view(model)) a.closed_form_det = quasi_sum_hessian_det(model, point);
    return a;
}

inline std::vector<std::string> sectional_labels(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.push_back("K" + std::to_string(i + 1) + std::to_string(j + 1));
    return out;
}

inline Json analysis_json(const PointAnalysis& a) {
    const std::size_t n = a.point.size();
    Json row;
    row["point"] = io::reals(a.point.vector());
    row["f"] = io::real(a.jet.value());
    row["gradient"] = io::reals(a.jet.gradient());
    row["hessian"] = matrix_json(a.jet.hessian());
    row["elasticities"] = a.elasticity ? io::reals(a.elasticity->values) : Json(nullptr);
    row["mrs"] = a.mrs ? matrix_json(a.mrs->values) : Json(nullptr);
    row["w"] = io::real(a.curvature.w);
    row["K"] = io::real(a.curvature.gauss_kronecker);
    row["H"] = io::real(a.curvature.mean);
    row["hessian_det"] = io::real(a.curvature.hessian_det);
    if (a.closed_form_det) row["hessian_det_closed_form"] = io::real(*a.closed_form_det);
    Json sec;
    const auto labels = sectional_labels(n);
    std::size_t l = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) sec[labels[l++]] = io::real(a.curvature.sectional(i, j));
    row["sectional"] = sec;
    row["minimality_lhs"] = io::real(a.curvature.minimality_lhs);
    row["pivot_span"] = io::real(a.curvature.pivot_span);
    return row;
}

inline std::vector<std::string> csv_header(std::size_t n) {
    std::vector<std::string> h;
    for (std::size_t i = 0; i < n; ++i) h.push_back("x" + std::to_string(i + 1));
    h.push_back("f");
    for (std::size_t i = 0; i < n; ++i) h.push_back("E" + std::to_string(i + 1));
    h.insert(h.end(), {"w", "K", "H"});
    for (auto& s : sectional_labels(n)) h.push_back(std::move(s));
    return h;
}

inline std::vector<double> csv_values(const PointAnalysis& a) {
    const std::size_t n = a.point.size();
    std::vector<double> v = a.point.vector();
    v.push_back(a.jet.value());
    for (std::size_t i = 0; i < n; ++i)
        v.push_back(a.elasticity ? a.elasticity->values[i] : std::numeric_limits<double>::quiet_NaN());
    v.insert(v.end(), {a.curvature.w, a.curvature.gauss_kronecker, a.curvature.mean});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) v.push_back(a.curvature.sectional(i, j));
    return v;
}

inline void write_csv_line(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
    os << '\n';
}

inline void write_csv_row(std::ostream& os, const std::vector<double>& values) {
    std::vector<std::string> f;
    for (double v : values) f.push_back(io::format_csv_real(v));
    write_csv_line(os, f);
}

/// Two-column CSV of every leaf of a JSON report, keyed by JSON pointer.
inline void write_flat_csv(std::ostream& os, const Json& j) {
    os << "path,value\n";
    auto walk = [&](auto&& self, const Json& node, const std::string& path) -> void {
        if (node.is_object()) {
            for (const auto& [k, v] : node.items()) self(self, v, path + "/" + k);
        } else if (node.is_array()) {
            for (std::size_t i = 0; i < node.size(); ++i) self(self, node[i], path + "/" + std::to_string(i));
        } else {
            std::string value;
            if (node.is_number_float())
                value = io::format_csv_real(node.get<double>());
            else if (node.is_string())
                value = node.get<std::string>();
            else if (!node.is_null())
                value = node.dump();
            if (value.find_first_of(",\"\n") != std::string::npos) {
                std::string q = "\"";
                for (char c : value) q += c == '"' ? std::string("\"\"") : std::string(1, c);
                value = q + "\"";
            }
            os << path << ',' << value << '\n';
        }
    };
    walk(walk, j, "");
}

inline Json point_errors_json(const std::vector<PointError>& errors) {
    Json a = Json::array();
    for (const auto& e : errors) a.push_back(Json{{"point", e.point}, {"message", e.message}});
    return a;
}

inline Json tri_state(const std::optional<bool>& b) { return b ? Json(*b) : Json("undetermined"); }

inline Json check_json(const SampledCheck& c, const char* magnitude_name) {
    Json j;
    j["holds"] = tri_state(c.holds);
    j[magnitude_name] = io::real(c.magnitude);
    j["worst_normalized"] = io::real(c.normalized);
    j["worst_point_index"] = c.worst_point;
    if (!c.errors.empty()) j["errors"] = point_errors_json(c.errors);
    return j;
}

inline Json grid_json(const SampleGrid& g) {
    const auto& d = g.descriptor();
    Json j;
    j["kind"] = d.kind == GridDescriptor::Kind::log_uniform ? "log_uniform"
                : d.kind == GridDescriptor::Kind::lattice   ? "lattice"
                                                            : "explicit";
    j["lows"] = io::reals(d.lows);
    j["highs"] = io::reals(d.highs);
    j["count"] = d.count;
    j["seed"] = d.seed;
    return j;
}

inline Json verdict_json(const ClassificationVerdict& v, const SampleGrid& grid) {
    Json j;
    Json ce;
    ce["determined"] = v.constant_elasticity.determined();
    Json factors = Json::array();
    for (const auto& f : v.constant_elasticity.factors) {
        Json fj;
        fj["constant"] = f.constant;
        fj["mean"] = io::real(f.mean);
        fj["max_deviation"] = io::real(f.max_deviation);
        factors.push_back(std::move(fj));
    }
    ce["factors"] = std::move(factors);
    if (!v.constant_elasticity.errors.empty()) ce["errors"] = point_errors_json(v.constant_elasticity.errors);
    j["constant_elasticity"] = std::move(ce);

    const auto& pm = v.proportional_mrs;
    Json pj;
    pj["holds"] = tri_state(pm.holds);
    pj["worst_residual"] = io::real(pm.worst_residual);
    pj["worst_point"] = io::reals(grid.points().at(pm.worst_point).vector());
    pj["worst_pair"] = Json::array({pm.worst_i + 1, pm.worst_j + 1});
    pj["worst_ratio"] = io::real(pm.worst_ratio);
    if (!pm.errors.empty()) pj["errors"] = point_errors_json(pm.errors);
    j["proportional_mrs"] = std::move(pj);

    j["vanishing_gk"] = check_json(v.vanishing_gk, "max_abs_K");
    j["vanishing_sectional"] = check_json(v.vanishing_sectional, "max_abs_Kij");
    j["minimal"] = check_json(v.minimal, "min_residual");

    j["matched_family"] = to_string(v.matched_family);
    if (v.fitted) {
        const auto& f = *v.fitted;
        Json fj;
        if (f.A) fj["A"] = io::real(*f.A);
        if (f.shift) fj["shift"] = io::real(*f.shift);
        if (!f.exponents.empty()) fj["exponents"] = io::reals(f.exponents);
        if (f.k) fj["k"] = io::real(*f.k);
        if (f.index) fj["index"] = *f.index + 1;
        if (f.common_elasticity) fj["common_elasticity_at_ones"] = io::real(*f.common_elasticity);
        fj["reproduction_residual"] = io::real(f.reproduction_residual);
        j["fitted"] = std::move(fj);
    } else {
        j["fitted"] = nullptr;
    }
    j["notes"] = v.notes;
    return j;
}

inline Json theorem_json(const TheoremReport& r) {
    Json j;
    j["measure"] = r.measure_name;
    Json trials = Json::array();
    for (const auto& t : r.results) {
        Json tj;
        tj["trial"] = t.index;
        tj["passed"] = t.passed;
        tj["measure"] = io::real(t.measure);
        tj["model"] = t.model;
        if (!t.error.empty()) tj["error"] = t.error;
        trials.push_back(std::move(tj));
    }
    j["trials"] = std::move(trials);
    j["passed"] = r.passed_count();
    j["failed"] = r.results.size() - r.passed_count();
    j["all_passed"] = r.all_passed();
    j["worst_measure"] = io::real(r.worst_measure());
    return j;
}

// ---------------------------------------------------------------------------
// Commands

struct CommonOptions {
    std::string format = "json";
    bool no_timestamp = false;
};

inline void emit(std::ostream& out, const Json& report, const std::string& format) {
    if (format == "csv")
        write_flat_csv(out, report);
    else
        out << io::to_json_text(report);
}

inline std::vector<double> parse_point_arg(const std::string& s) { return io::parse_real_list(s); }

/// "lo:hi" for every axis, or one "lo:hi" per axis separated by commas.
inline std::pair<std::vector<double>, std::vector<double>> parse_box(const std::string& s, std::size_t n) {
    std::vector<double> lows, highs;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = s.find(',', start);
        const std::string axis = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
        const std::size_t colon = axis.find(':');
        if (colon == std::string::npos) throw spec_error("box axis '" + axis + "' must be lo:hi");
        const auto lo = io::parse_real(std::string_view(axis).substr(0, colon));
        const auto hi = io::parse_real(std::string_view(axis).substr(colon + 1));
        if (!lo || !hi) throw spec_error("box axis '" + axis + "' must be lo:hi with decimal bounds");
        lows.push_back(*lo);
        highs.push_back(*hi);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (lows.size() == 1 && n > 1) {
        lows.assign(n, lows.front());
        highs.assign(n, highs.front());
    }
    if (lows.size() != n) throw spec_error("box has " + std::to_string(lows.size()) + " axes, model arity is " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
        if (!(lows[i] > 0.0) || !(lows[i] < highs[i]))
            throw spec_error("box axis " + std::to_string(i + 1) + " needs 0 < low < high");
    return {lows, highs};
}

inline int cmd_analyze(const std::string& fn, const std::string& point_csv, const CommonOptions& opt,
                       std::ostream& out) {
    const auto spec = io::load_model_spec(fn);
    const auto coords = parse_point_arg(point_csv);
    if (coords.size() != spec.model.arity())
        throw dimension_error("point has " + std::to_string(coords.size()) + " coordinates, model arity is " +
                              std::to_string(spec.model.arity()));
    const EvalPoint point(coords);
    const PointAnalysis a = analyze_point(spec.model, point);

    if (opt.format == "csv") {
        write_csv_line(out, csv_header(point.size()));
        write_csv_row(out, csv_values(a));
        return ok;
    }
    Json r = report_header("analyze", !opt.no_timestamp);
    r["inputs"] = Json{{"spec", spec.document}, {"point", io::reals(coords)}};
    r["model"] = detail::describe(spec.model);
    if (auto dirs = monotone_directions(spec.model)) r["monotone_directions"] = *dirs;
    r["rows"] = Json::array({analysis_json(a)});
    r["warnings"] = a.warnings;
    emit(out, r, opt.format);
    return ok;
}

inline int cmd_classify(const std::string& fn, std::size_t samples, double tol, std::uint64_t seed,
                        const CommonOptions& opt, std::ostream& out) {
    if (samples < 2) throw spec_error("--samples must be at least 2");
    if (!(tol > 0.0)) throw spec_error("--tol must be positive");
    const auto spec = io::load_model_spec(fn);
    const SampleGrid grid = SampleGrid::default_grid(spec.model.arity(), seed, samples);
    const ClassificationVerdict v = classify(spec.model, grid, tol);

    Json r = report_header("classify", !opt.no_timestamp);
    r["seed"] = seed;
    r["inputs"] = Json{{"spec", spec.document}, {"samples", samples}, {"tol", tol}, {"grid", grid_json(grid)}};
    r["model"] = detail::describe(spec.model);
    r["verdict"] = verdict_json(v, grid);
    emit(out, r, opt.format);
    return ok;
}

inline int cmd_verify_theorem(const std::string& part_name, std::size_t n, std::size_t trials, std::uint64_t seed,
                              const CommonOptions& opt, std::ostream& out) {
    const auto part = parse_theorem_part(part_name);
    if (!part) throw spec_error("unknown theorem part '" + part_name + "' (expected i, ii, iii, iv1, iv2, iv3)");
    if (n < 2) throw spec_error("--n must be at least 2");
    if (trials < 1) throw spec_error("--trials must be at least 1");
    const TheoremReport rep = verify_theorem(*part, n, trials, seed);

    Json r = report_header("verify-theorem", !opt.no_timestamp);
    r["seed"] = seed;
    r["inputs"] = Json{{"part", part_name}, {"n", n}, {"trials", trials}};
    r["result"] = theorem_json(rep);
    emit(out, r, opt.format);
    return rep.all_passed() ? ok : check_failed;
}

inline int cmd_sweep(const std::string& fn, const std::string& box, std::size_t steps, const CommonOptions& opt,
                     std::ostream& out) {
    const auto spec = io::load_model_spec(fn);
    const std::size_t n = spec.model.arity();
    const auto [lows, highs] = parse_box(box, n);
    if (steps < 2) throw spec_error("--steps must be at least 2");
    const SampleGrid grid = SampleGrid::lattice(lows, highs, steps);

    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (const auto& x : grid.points()) rows.push_back(csv_values(analyze_point(spec.model, x)));

    const auto header = csv_header(n);
    if (opt.format == "csv") {
        write_csv_line(out, header);
        for (const auto& row : rows) write_csv_row(out, row);
        return ok;
    }
    Json r = report_header("sweep", !opt.no_timestamp);
    r["inputs"] = Json{{"spec", spec.document}, {"box", Json{{"lows", io::reals(lows)}, {"highs", io::reals(highs)}}},
                       {"steps", steps}};
    r["columns"] = header;
    Json data = Json::array();
    for (const auto& row : rows) data.push_back(io::reals(row));
    r["rows"] = std::move(data);
    out << io::to_json_text(r);
    return ok;
}

/// Seed from --seed, else PRODGEO_SEED, else 0.
inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("PRODGEO_SEED"); env && *env) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw spec_error("PRODGEO_SEED is not an unsigned integer: '" + std::string(s) + "'");
        return v;
    }
    return 0;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Production-function elasticity, MRS and hypersurface curvature"};
    app.name(tool_name);
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    CommonOptions common;
    std::string fn, point, part = "", box;
    std::size_t samples = 64, n = 2, trials = 20, steps = 5;
    double tol = default_tolerance;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub, const std::string& default_format) {
        common.format = default_format;
        sub->add_option("--format", common.format, "Output format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
        sub->add_flag("--no-timestamp", common.no_timestamp, "Omit the timestamp field");
    };

    auto* analyze = app.add_subcommand("analyze", "All econ and geometric quantities at one point");
    analyze->add_option("--fn", fn, "Model spec JSON")->required();
    analyze->add_option("--point", point, "Comma-separated coordinates")->required();

    auto* classify_cmd = app.add_subcommand("classify", "Sampled classification against the closed-form families");
    classify_cmd->add_option("--fn", fn, "Model spec JSON")->required();
    classify_cmd->add_option("--samples", samples, "Grid points")->capture_default_str();
    classify_cmd->add_option("--tol", tol, "Relative tolerance")->capture_default_str();
    classify_cmd->add_option("--seed", seed, "Grid seed (default: PRODGEO_SEED or 0)");

    auto* verify = app.add_subcommand("verify-theorem", "Randomized check of one part of the characterization");
    verify->add_option("--part", part, "i | ii | iii | iv1 | iv2 | iv3")->required();
    verify->add_option("--n", n, "Number of inputs")->capture_default_str();
    verify->add_option("--trials", trials, "Random instances")->capture_default_str();
    verify->add_option("--seed", seed, "Parameter seed (default: PRODGEO_SEED or 0)");

    auto* sweep = app.add_subcommand("sweep", "Tabulate the quantities over a lattice");
    sweep->add_option("--fn", fn, "Model spec JSON")->required();
    sweep->add_option("--box", box, "lo:hi (all axes) or lo:hi,lo:hi,... (per axis)")->required();
    sweep->add_option("--steps", steps, "Lattice points per axis")->capture_default_str();

    // the format default differs per command, so pick it from argv first
    std::string format_default = "json";
    for (int i = 1; i < argc; ++i)
        if (std::string_view(argv[i]) == "sweep") format_default = "csv";
    for (auto* sub : {analyze, classify_cmd, verify, sweep}) add_common(sub, format_default);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << '\n';
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return bad_input;
    }

    try {
        if (*analyze) return cmd_analyze(fn, point, common, out);
        if (*classify_cmd) return cmd_classify(fn, samples, tol, resolve_seed(seed), common, out);
        if (*verify) return cmd_verify_theorem(part, n, trials, resolve_seed(seed), common, out);
        if (*sweep) return cmd_sweep(fn, box, steps, common, out);
    } catch (const invalid_argument_error& e) {
        err << "error: " << e.what() << '\n';
        return bad_input;
    } catch (const domain_error& e) {
        err << "error: evaluation domain: " << e.what() << '\n';
        return eval_domain;
    } catch (const error& e) {
        err << "error: " << e.what() << '\n';
        return bad_input;
    }
    return bad_input;
}

}  // namespace prodgeo::cli
