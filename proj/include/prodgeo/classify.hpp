#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "prodgeo/derivatives.hpp"
#include "prodgeo/econ.hpp"
#include "prodgeo/geom.hpp"
#include "prodgeo/grid.hpp"
#include "prodgeo/models.hpp"

namespace prodgeo {

/// Default relative tolerance for analytic families.
inline constexpr double default_tolerance = 1e-9;
/// Scale-normalized threshold under which a curvature counts as zero.
inline constexpr double vanishing_threshold = 1e-10;

// ---------------------------------------------------------------------------
// Constant elasticity

struct FactorElasticity {
    double mean = 0.0;
    double max_deviation = 0.0;
    bool constant = false;
};

struct ConstantElasticityVerdict {
    std::vector<FactorElasticity> factors;
    std::vector<PointError> errors;

    bool determined() const noexcept { return errors.empty(); }

    bool all_constant() const {
        return determined() && std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.constant; });
    }

    std::size_t constant_count() const {
        return determined() ? static_cast<std::size_t>(std::count_if(factors.begin(), factors.end(),
                                                                     [](const auto& f) { return f.constant; }))
                            : 0;
    }
};

/// For each factor: E_i is constant on the grid iff its largest deviation
/// from the grid mean is at most tol * (1 + |mean|).
inline ConstantElasticityVerdict detect_constant_elasticity(const ProductionModel& model, const SampleGrid& grid,
                                                            double tol) {
    if (grid.empty()) throw invalid_argument_error("detect_constant_elasticity: empty grid");
    const std::size_t n = model.arity();
    ConstantElasticityVerdict v;
    std::vector<std::vector<double>> samples;
    samples.reserve(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) {
        try {
            samples.push_back(elasticity(model, grid.points()[p]).values);
        } catch (const domain_error& e) {
            v.errors.push_back({p, e.what()});
        }
    }
    if (!v.errors.empty()) return v;
    v.factors.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& s : samples) sum += s[i];
        const double mean = sum / static_cast<double>(samples.size());
        double dev = 0.0;
        for (const auto& s : samples) dev = std::max(dev, std::abs(s[i] - mean));
        v.factors[i] = {mean, dev, dev <= tol * (1.0 + std::abs(mean))};
    }
    return v;
}

// ---------------------------------------------------------------------------
// Classification

enum class Family { eq2, eq7, eq8, eq9, eq10, none };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::eq2: return "Eq2";
    case Family::eq7: return "Eq7";
    case Family::eq8: return "Eq8";
    case Family::eq9: return "Eq9";
    case Family::eq10: return "Eq10";
    case Family::none: return "none";
    }
    return "none";
}

/// A property sampled over the grid. `holds` is empty when some point could
/// not be evaluated.
struct SampledCheck {
    std::optional<bool> holds;
    /// Raw magnitude: max |K|, max |K_ij|, or min |n w^3 H| for minimality.
    double magnitude = 0.0;
    /// Extreme of the scale-normalized measure compared against tol.
    double normalized = 0.0;
    std::size_t worst_point = 0;
    std::vector<PointError> errors;
};

/// Parameters of the closed form a model was matched to.
struct FittedFamily {
    std::optional<double> A;
    std::optional<double> shift;
    std::vector<double> exponents;
    std::optional<double> k;
    std::optional<std::size_t> index;
    std::optional<double> common_elasticity;
    /// Largest |fit(x) - f(x)| / (1 + |f(x)|) over the grid.
    double reproduction_residual = 0.0;
};

struct ClassificationVerdict {
    std::size_t arity = 0;
    double tol = default_tolerance;
    ConstantElasticityVerdict constant_elasticity;
    ProportionalMrsVerdict proportional_mrs;
    SampledCheck vanishing_gk;
    SampledCheck vanishing_sectional;
    SampledCheck minimal;
    Family matched_family = Family::none;
    std::optional<FittedFamily> fitted;
    std::vector<std::string> notes;
};

namespace detail {

struct GeometrySamples {
    SampledCheck gk, sectional, minimal;
};

inline GeometrySamples sample_geometry(const ProductionModel& model, const SampleGrid& grid, double tol) {
    GeometrySamples s;
    s.minimal.magnitude = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < grid.size(); ++p) {
        try {
            const CurvatureReport r = curvature(model, grid.points()[p]);
            auto track = [p](SampledCheck& c, double measure) {
                if (measure >= c.normalized) {
                    c.normalized = measure;
                    c.worst_point = p;
                }
            };
            s.gk.magnitude = std::max(s.gk.magnitude, std::abs(r.gauss_kronecker));
            track(s.gk, r.normalized_gauss_kronecker());
            s.sectional.magnitude = std::max(s.sectional.magnitude, r.max_abs_sectional());
            track(s.sectional, r.max_normalized_sectional());
            // minimal needs H ~ 0 everywhere: track the largest normalized
            // residual, and report the smallest raw one
            s.minimal.magnitude = std::min(s.minimal.magnitude, std::abs(r.minimality_lhs));
            track(s.minimal, r.normalized_minimality());
        } catch (const domain_error& e) {
            for (auto* c : {&s.gk, &s.sectional, &s.minimal}) c->errors.push_back({p, e.what()});
        }
    }
    for (auto* c : {&s.gk, &s.sectional, &s.minimal})
        if (c->errors.empty()) c->holds = c->normalized <= tol;
    return s;
}

inline EvalPoint diagonal_point(std::size_t n, double t) { return EvalPoint(std::vector<double>(n, t)); }

template <class Fn>
std::optional<double> reproduction_residual(const ProductionModel& model, const SampleGrid& grid, Fn fitted) {
    double worst = 0.0;
    try {
        for (const auto& x : grid.points()) {
            const double f = eval(model, x);
            const double g = fitted(x);
            if (!std::isfinite(g)) return std::nullopt;
            worst = std::max(worst, std::abs(g - f) / (1.0 + std::abs(f)));
        }
    } catch (const error&) {
        return std::nullopt;
    }
    return worst;
}

/// A * prod x_i^e + shift, with A and shift read off the diagonal
/// f(t, ..., t) = A t^{n e} + shift at t = 1 and t = 2.
inline std::optional<FittedFamily> fit_translated_power(const ProductionModel& model, const SampleGrid& grid,
                                                        double exponent, double tol) {
    const std::size_t n = model.arity();
    try {
        const double f1 = eval(model, diagonal_point(n, 1.0));
        const double f2 = eval(model, diagonal_point(n, 2.0));
        const double A = (f2 - f1) / (std::pow(2.0, exponent * static_cast<double>(n)) - 1.0);
        if (!(A > 0.0)) return std::nullopt;
        const double shift = f1 - A;
        auto res = reproduction_residual(model, grid, [&](const EvalPoint& x) {
            double prod = 1.0;
            for (double xi : x.coords()) prod *= std::pow(xi, exponent);
            return A * prod + shift;
        });
        if (!res || *res > tol) return std::nullopt;
        FittedFamily fit;
        fit.A = A;
        fit.shift = shift;
        fit.exponents.assign(n, exponent);
        fit.reproduction_residual = *res;
        return fit;
    } catch (const error&) {
        return std::nullopt;
    }
}

inline std::optional<FittedFamily> fit_cobb_douglas(const ProductionModel& model, const SampleGrid& grid,
                                                    const ConstantElasticityVerdict& ce, double tol) {
    const std::size_t n = model.arity();
    try {
        const double A = eval(model, diagonal_point(n, 1.0));
        if (!(A > 0.0)) return std::nullopt;
        std::vector<double> alphas;
        for (const auto& f : ce.factors) alphas.push_back(f.mean);
        auto res = reproduction_residual(model, grid, [&](const EvalPoint& x) {
            double prod = A;
            for (std::size_t i = 0; i < n; ++i) prod *= std::pow(x[i], alphas[i]);
            return prod;
        });
        if (!res || *res > tol) return std::nullopt;
        FittedFamily fit;
        fit.A = A;
        fit.exponents = std::move(alphas);
        fit.reproduction_residual = *res;
        return fit;
    } catch (const error&) {
        return std::nullopt;
    }
}

/// f(x) == f(g, ..., g) with g the geometric mean of x: f depends on x only
/// through prod x_i. k is reported normalized to +-1 (F absorbs |k|).
inline std::optional<FittedFamily> fit_homothetic(const ProductionModel& model, const SampleGrid& grid, double tol) {
    const std::size_t n = model.arity();
    try {
        const EvalPoint ones = diagonal_point(n, 1.0);
        const double e = elasticity(model, ones).values.front();
        auto res = reproduction_residual(model, grid, [&](const EvalPoint& x) {
            double logsum = 0.0;
            for (double xi : x.coords()) logsum += std::log(xi);
            return eval(model, diagonal_point(n, std::exp(logsum / static_cast<double>(n))));
        });
        if (!res || *res > tol) return std::nullopt;
        FittedFamily fit;
        fit.k = e >= 0.0 ? 1.0 : -1.0;
        fit.common_elasticity = e;
        fit.reproduction_residual = *res;
        return fit;
    } catch (const error&) {
        return std::nullopt;
    }
}

/// f(x) == A x_i^k prod_{j != i} phi_j(x_j) with phi_j(t) = f(1,..,t,..,1) / A.
inline std::optional<FittedFamily> fit_single_constant_elasticity(const ProductionModel& model, const SampleGrid& grid,
                                                                  std::size_t index, double k, double tol) {
    const std::size_t n = model.arity();
    try {
        const double A = eval(model, diagonal_point(n, 1.0));
        if (!(A > 0.0)) return std::nullopt;
        auto res = reproduction_residual(model, grid, [&](const EvalPoint& x) {
            double g = A * std::pow(x[index], k);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == index) continue;
                std::vector<double> y(n, 1.0);
                y[j] = x[j];
                g *= eval(model, EvalPoint(std::move(y))) / A;
            }
            return g;
        });
        if (!res || *res > tol) return std::nullopt;
        FittedFamily fit;
        fit.A = A;
        fit.k = k;
        fit.index = index;
        fit.reproduction_residual = *res;
        return fit;
    } catch (const error&) {
        return std::nullopt;
    }
}

}  // namespace detail

/**
 * Runs every detector and walks the decision tree, most specific family
 * first:
 *
 *   prop-MRS and K == 0      -> Eq9   A prod x_i^{1/n} (+ translation)
 *   prop-MRS and K_ij == 0   -> Eq10  A prod sqrt(x_i) (+ translation)
 *   every E_i constant       -> Eq2   A prod x_i^{alpha_i}
 *   prop-MRS                 -> Eq8   F(prod x_i^k)
 *   some E_i constant        -> Eq7   A x_i^{k_i} exp(D sum_{j!=i} h_j)
 *
 * A candidate is accepted only if its fitted closed form reproduces the
 * model on the grid to tol; otherwise the next branch is tried.
 */
inline ClassificationVerdict classify(const ProductionModel& model, const SampleGrid& grid,
                                      double tol = default_tolerance) {
    if (grid.empty()) throw invalid_argument_error("classify: empty grid");
    if (grid.dimension() != model.arity()) throw dimension_error("classify: grid dimension does not match model arity");
    const std::size_t n = model.arity();

    ClassificationVerdict v;
    v.arity = n;
    v.tol = tol;
    v.constant_elasticity = detect_constant_elasticity(model, grid, tol);
    v.proportional_mrs = is_proportional_mrs(model, grid, tol);
    auto geo = detail::sample_geometry(model, grid, tol);
    v.vanishing_gk = std::move(geo.gk);
    v.vanishing_sectional = std::move(geo.sectional);
    v.minimal = std::move(geo.minimal);

    const bool pm = v.proportional_mrs.holds.value_or(false);
    const bool gk = v.vanishing_gk.holds.value_or(false);
    const bool sec = v.vanishing_sectional.holds.value_or(false);
    if (!v.proportional_mrs.holds) v.notes.push_back("proportional_mrs undetermined: some grid points failed");
    if (!v.constant_elasticity.determined()) v.notes.push_back("constant_elasticity undetermined: some grid points failed");
    if (!v.vanishing_gk.holds) v.notes.push_back("curvatures undetermined: some grid points failed");

    auto accept = [&](Family f, std::optional<FittedFamily> fit) {
        if (!fit) return false;
        v.matched_family = f;
        v.fitted = std::move(fit);
        return true;
    };

    bool done = false;
    if (pm && gk) {
        done = accept(Family::eq9, detail::fit_translated_power(model, grid, 1.0 / static_cast<double>(n), tol));
        if (done && n == 2) v.notes.push_back("n = 2: Eq9 and Eq10 coincide (exponents 1/2)");
    }
    if (!done && pm && sec) done = accept(Family::eq10, detail::fit_translated_power(model, grid, 0.5, tol));
    if (!done && v.constant_elasticity.all_constant())
        done = accept(Family::eq2, detail::fit_cobb_douglas(model, grid, v.constant_elasticity, tol));
    if (!done && pm) done = accept(Family::eq8, detail::fit_homothetic(model, grid, tol));
    if (!done && v.constant_elasticity.constant_count() > 0 && !v.constant_elasticity.all_constant()) {
        for (std::size_t i = 0; i < n && !done; ++i) {
            const auto& fe = v.constant_elasticity.factors[i];
            if (fe.constant)
                done = accept(Family::eq7, detail::fit_single_constant_elasticity(model, grid, i, fe.mean, tol));
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Randomized verification of the theorem's forward implications

struct TrialResult {
    std::size_t index = 0;
    bool passed = false;
    /// Worst residual of the check, in the units of TheoremReport::measure_name.
    double measure = 0.0;
    std::string model;
    std::string error;
};

struct TheoremReport {
    TheoremPart part = TheoremPart::i;
    std::size_t n = 2;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string measure_name;
    std::vector<TrialResult> results;

    std::size_t passed_count() const {
        return static_cast<std::size_t>(
            std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; }));
    }
    bool all_passed() const { return passed_count() == results.size(); }

    /// Largest measure over trials (smallest for iv2, where larger is better).
    double worst_measure() const {
        if (results.empty()) return 0.0;
        double w = results.front().measure;
        for (const auto& r : results) w = part == TheoremPart::iv2 ? std::min(w, r.measure) : std::max(w, r.measure);
        return w;
    }
};

namespace detail {

class ParameterSampler {
public:
    explicit ParameterSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return lo + unit_uniform(rng_) * (hi - lo); }
    double amplitude() { return uniform(0.5, 4.0); }
    double rate() { return uniform(0.25, 2.0); }
    /// k in [-2, -1/4] U [1/4, 2]
    double exponent() {
        const double sign = unit_uniform(rng_) < 0.5 ? -1.0 : 1.0;
        return sign * uniform(0.25, 2.0);
    }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(unit_uniform(rng_) * static_cast<double>(n)); }

    InnerFn inner() {
        switch (index(3)) {
        case 0: return InnerFn::linear(rate(), uniform(-1.0, 1.0));
        case 1: return InnerFn::power(rate(), exponent());
        default: return InnerFn::log(exponent(), uniform(-1.0, 1.0));
        }
    }

    /// Outer F of a homothetic model over the default box [1/2, 2]^n. The
    /// exponential rate is divided by the largest product 2^{n|k|} reachable
    /// there so F stays finite.
    OuterFn homothetic_outer(std::size_t n, double k) {
        switch (index(3)) {
        case 0: return OuterFn::identity();
        case 1: return OuterFn::affine(amplitude(), uniform(-1.0, 1.0));
        default: {
            const double reach = std::pow(2.0, static_cast<double>(n) * std::abs(k));
            return OuterFn::exp_affine(amplitude(), rate() / reach, uniform(-1.0, 1.0));
        }
        }
    }

private:
    std::mt19937_64 rng_;
};

inline std::string describe(const ProductionModel& m);

}  // namespace detail

/// For each trial draws an admissible member of the part's closed-form family
/// and checks the forward implication of the theorem on the default grid.
inline TheoremReport verify_theorem(TheoremPart part, std::size_t n, std::size_t trials, std::uint64_t seed) {
    if (n < 2) throw invalid_argument_error("verify_theorem: n must be at least 2");
    if (trials < 1) throw invalid_argument_error("verify_theorem: trials must be at least 1");
    TheoremReport rep;
    rep.part = part;
    rep.n = n;
    rep.trials = trials;
    rep.seed = seed;
    switch (part) {
    case TheoremPart::i:
    case TheoremPart::ii: rep.measure_name = "max_elasticity_deviation"; break;
    case TheoremPart::iii: rep.measure_name = "max_mrs_residual"; break;
    case TheoremPart::iv1: rep.measure_name = "max_abs_gauss_kronecker"; break;
    case TheoremPart::iv2: rep.measure_name = "min_minimality_residual"; break;
    case TheoremPart::iv3: rep.measure_name = "max_abs_sectional"; break;
    }

    const SampleGrid grid = SampleGrid::default_grid(n);
    detail::ParameterSampler draw(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        TrialResult tr;
        tr.index = t;
        try {
            switch (part) {
            case TheoremPart::i: {
                ConstantElasticityParams p{draw.amplitude(), draw.rate(), draw.index(n), draw.exponent(), {}};
                for (std::size_t j = 0; j + 1 < n; ++j) p.others.push_back(draw.inner());
                const auto model = make_theorem_family(p);
                tr.model = detail::describe(model);
                const auto ce = detect_constant_elasticity(model, grid, default_tolerance);
                const auto& fe = ce.factors.at(p.index);
                tr.measure = std::max(fe.max_deviation, std::abs(fe.mean - p.k));
                tr.passed = fe.constant && std::abs(fe.mean - p.k) <= default_tolerance * (1.0 + std::abs(p.k));
                break;
            }
            case TheoremPart::ii: {
                CobbDouglasParams p{draw.amplitude(), {}};
                for (std::size_t j = 0; j < n; ++j) p.alphas.push_back(draw.rate());
                const auto model = make_theorem_family(p);
                tr.model = detail::describe(model);
                const auto ce = detect_constant_elasticity(model, grid, default_tolerance);
                tr.passed = ce.all_constant();
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& fe = ce.factors.at(j);
                    const double err = std::abs(fe.mean - p.alphas[j]);
                    tr.measure = std::max({tr.measure, fe.max_deviation, err});
                    tr.passed = tr.passed && err <= default_tolerance * (1.0 + p.alphas[j]);
                }
                break;
            }
            case TheoremPart::iii:
            case TheoremPart::iv2: {
                const double k = draw.exponent();
                const auto model = make_theorem_family(HomotheticParams{draw.homothetic_outer(n, k), k, n});
                tr.model = detail::describe(model);
                if (part == TheoremPart::iii) {
                    const auto pm = is_proportional_mrs(model, grid, default_tolerance);
                    tr.measure = pm.worst_residual;
                    tr.passed = pm.holds.value_or(false);
                } else {
                    tr.measure = minimality_residual(model, grid);
                    tr.passed = tr.measure > 0.0;
                }
                break;
            }
            case TheoremPart::iv1:
            case TheoremPart::iv3: {
                const double A = draw.amplitude();
                const auto model = part == TheoremPart::iv1 ? make_theorem_family(ConstantReturnsParams{A, n})
                                                            : make_theorem_family(SqrtProductParams{A, n});
                tr.model = detail::describe(model);
                tr.passed = true;
                for (const auto& x : grid.points()) {
                    const auto r = curvature(model, x);
                    if (part == TheoremPart::iv1) {
                        tr.measure = std::max(tr.measure, std::abs(r.gauss_kronecker));
                        tr.passed = tr.passed && r.normalized_gauss_kronecker() <= vanishing_threshold;
                    } else {
                        tr.measure = std::max(tr.measure, r.max_abs_sectional());
                        tr.passed = tr.passed && r.max_normalized_sectional() <= vanishing_threshold;
                    }
                }
                break;
            }
            }
        } catch (const error& e) {
            tr.passed = false;
            tr.error = e.what();
        }
        rep.results.push_back(std::move(tr));
    }
    return rep;
}

namespace detail {

inline std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string describe(const InnerFn& h, const std::string& var) {
    switch (h.kind()) {
    case InnerFn::Kind::log: return fmt_num(h.first()) + "*ln(" + var + ")+" + fmt_num(h.second());
    case InnerFn::Kind::power: return fmt_num(h.first()) + "*" + var + "^" + fmt_num(h.second());
    case InnerFn::Kind::linear: return fmt_num(h.first()) + "*" + var + "+" + fmt_num(h.second());
    }
    return "?";
}

inline std::string describe(const OuterFn& g, const std::string& arg) {
    switch (g.kind()) {
    case OuterFn::Kind::identity: return arg;
    case OuterFn::Kind::exp_affine:
        return fmt_num(g.c()) + "*exp(" + fmt_num(g.d()) + "*" + arg + ")+" + fmt_num(g.shift());
    case OuterFn::Kind::affine: return fmt_num(g.m()) + "*" + arg + "+" + fmt_num(g.b());
    }
    return arg;
}

inline std::string describe(const ProductionModel& m) {
    if (const auto* cd = std::get_if<CobbDouglas>(&m.form())) {
        std::string s = fmt_num(cd->A);
        for (std::size_t i = 0; i < cd->alphas.size(); ++i)
            s += "*x" + std::to_string(i + 1) + "^" + fmt_num(cd->alphas[i]);
        return s;
    }
    if (const auto* qs = std::get_if<QuasiSum>(&m.form())) {
        std::string u;
        for (std::size_t i = 0; i < qs->inners.size(); ++i) {
            u += (i ? " + " : "") + describe(qs->inners[i], "x" + std::to_string(i + 1));
        }
        return describe(qs->outer, "(" + u + ")");
    }
    if (const auto* h = std::get_if<Homothetic>(&m.form()))
        return describe(h->outer, "prod(x_i^" + fmt_num(h->k) + ")");
    return std::get<Opaque>(m.form()).label;
}

}  // namespace detail

}  // namespace prodgeo
