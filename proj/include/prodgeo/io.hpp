#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "prodgeo/error.hpp"
#include "prodgeo/models.hpp"

namespace prodgeo::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Number formatting

/// 17 significant digits (trailing zeros dropped); re-parses to the same double.
/// Integral values keep a trailing ".0" so they read back as reals.
inline std::string format_real(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

/// Same as format_real, but an empty field for non-finite values.
inline std::string format_csv_real(double v) { return std::isfinite(v) ? format_real(v) : std::string(); }

/// Locale-independent decimal parse of the whole string.
inline std::optional<double> parse_real(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// "1.5,2,3e-1" -> {1.5, 2, 0.3}
inline std::vector<double> parse_real_list(std::string_view s, char sep = ',') {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = s.find(sep, start);
        const auto token = s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        const auto v = parse_real(token);
        if (!v) throw spec_error("not a decimal number: '" + std::string(token) + "'");
        out.push_back(*v);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON writer with fixed real formatting

inline void write_json(std::ostream& os, const Json& j, int indent = 2, int depth = 0) {
    const auto pad = [&](int d) {
        if (indent >= 0) os << '\n' << std::string(static_cast<std::size_t>(d * indent), ' ');
    };
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{';
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) os << ',';
            first = false;
            pad(depth + 1);
            os << Json(key).dump() << (indent >= 0 ? ": " : ":");
            write_json(os, value, indent, depth + 1);
        }
        pad(depth);
        os << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << '[';
        bool first = true;
        for (const auto& value : j) {
            if (!first) os << ',';
            first = false;
            pad(depth + 1);
            write_json(os, value, indent, depth + 1);
        }
        pad(depth);
        os << ']';
        return;
    }
    case Json::value_t::number_float: os << format_real(j.get<double>()); return;
    default: os << j.dump(); return;
    }
}

inline std::string to_json_text(const Json& j) {
    std::ostringstream os;
    write_json(os, j);
    os << '\n';
    return os.str();
}

/// Non-finite doubles become JSON null.
inline Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json reals(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(real(x));
    return a;
}

// ---------------------------------------------------------------------------
// Model spec documents

namespace detail {

/// Byte offset of the value at `path` inside an already-valid JSON text.
class Locator {
public:
    explicit Locator(std::string_view text) : t_(text) {}

    std::size_t find(const std::vector<std::string>& path) {
        pos_ = 0;
        ws();
        for (const auto& token : path) {
            if (pos_ >= t_.size()) break;
            if (t_[pos_] == '{') {
                if (!enter_member(token)) break;
            } else if (t_[pos_] == '[') {
                if (!enter_element(token)) break;
            } else {
                break;
            }
        }
        return pos_;
    }

private:
    void ws() {
        while (pos_ < t_.size() && (t_[pos_] == ' ' || t_[pos_] == '\n' || t_[pos_] == '\r' || t_[pos_] == '\t')) ++pos_;
    }

    std::string string() {
        std::string s;
        ++pos_;  // opening quote
        while (pos_ < t_.size() && t_[pos_] != '"') {
            if (t_[pos_] == '\\') ++pos_;
            if (pos_ < t_.size()) s += t_[pos_++];
        }
        ++pos_;
        return s;
    }

    void skip_value() {
        ws();
        if (pos_ >= t_.size()) return;
        if (t_[pos_] == '"') {
            string();
            return;
        }
        if (t_[pos_] == '{' || t_[pos_] == '[') {
            int depth = 0;
            do {
                const char c = t_[pos_];
                if (c == '"') {
                    string();
                    continue;
                }
                if (c == '{' || c == '[') ++depth;
                if (c == '}' || c == ']') --depth;
                ++pos_;
            } while (depth > 0 && pos_ < t_.size());
            return;
        }
        while (pos_ < t_.size() && t_[pos_] != ',' && t_[pos_] != '}' && t_[pos_] != ']') ++pos_;
    }

    bool enter_member(const std::string& key) {
        const std::size_t start = pos_;
        ++pos_;
        while (true) {
            ws();
            if (pos_ >= t_.size() || t_[pos_] != '"') {
                pos_ = start;
                return false;
            }
            const std::size_t key_pos = pos_;
            const std::string k = string();
            ws();
            ++pos_;  // ':'
            ws();
            if (k == key) {
                (void)key_pos;
                return true;
            }
            skip_value();
            ws();
            if (pos_ < t_.size() && t_[pos_] == ',') ++pos_;
        }
    }

    bool enter_element(const std::string& index) {
        const std::size_t start = pos_;
        std::size_t target = 0;
        try {
            target = std::stoul(index);
        } catch (...) {
            return false;
        }
        ++pos_;
        for (std::size_t i = 0;; ++i) {
            ws();
            if (pos_ >= t_.size() || t_[pos_] == ']') {
                pos_ = start;
                return false;
            }
            if (i == target) return true;
            skip_value();
            ws();
            if (pos_ < t_.size() && t_[pos_] == ',') ++pos_;
        }
    }

    std::string_view t_;
    std::size_t pos_ = 0;
};

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Walks a spec document, recording the JSON path for error messages.
class SpecReader {
public:
    struct Failure {
        std::vector<std::string> path;
        std::string message;
    };

    ProductionModel read(const Json& doc) {
        expect_object(doc, {"arity", "form", "description", "A", "alphas", "outer", "inners", "part", "D", "k", "index"});
        const std::size_t n = arity(doc);
        const std::string form = string_at(doc, "form");
        if (form == "cobb-douglas") {
            only_keys(doc, {"arity", "form", "description", "A", "alphas"});
            const double A = number_at(doc, "A");
            const auto alphas = number_list_at(doc, "alphas", n);
            return build([&] { return make_cobb_douglas(A, alphas); });
        }
        if (form == "quasi-sum") {
            only_keys(doc, {"arity", "form", "description", "outer", "inners"});
            const OuterFn outer = outer_at(doc, "outer");
            const auto inners = inner_list_at(doc, "inners", n);
            return build([&] { return ProductionModel::quasi_sum(outer, inners); });
        }
        if (form == "family") {
            const std::string part = string_at(doc, "part");
            if (part == "i") {
                only_keys(doc, {"arity", "form", "description", "part", "A", "D", "index", "k", "inners"});
                const double A = number_at(doc, "A"), D = number_at(doc, "D"), k = number_at(doc, "k");
                const double index = number_at(doc, "index");
                if (index != std::floor(index) || index < 1 || index > static_cast<double>(n))
                    fail({"index"}, "index must be an integer in 1.." + std::to_string(n));
                const auto others = inner_list_at(doc, "inners", n - 1);
                return build([&] {
                    return make_theorem_family(
                        ConstantElasticityParams{A, D, static_cast<std::size_t>(index) - 1, k, others});
                });
            }
            if (part == "ii") {
                only_keys(doc, {"arity", "form", "description", "part", "A", "alphas"});
                const double A = number_at(doc, "A");
                const auto alphas = number_list_at(doc, "alphas", n);
                return build([&] { return make_theorem_family(CobbDouglasParams{A, alphas}); });
            }
            if (part == "iii") {
                only_keys(doc, {"arity", "form", "description", "part", "k", "outer"});
                const double k = number_at(doc, "k");
                const OuterFn outer = outer_at(doc, "outer");
                return build([&] { return make_theorem_family(HomotheticParams{outer, k, n}); });
            }
            if (part == "iv1" || part == "iv3") {
                only_keys(doc, {"arity", "form", "description", "part", "A"});
                const double A = number_at(doc, "A");
                return build([&] {
                    return part == "iv1" ? make_theorem_family(ConstantReturnsParams{A, n})
                                         : make_theorem_family(SqrtProductParams{A, n});
                });
            }
            fail({"part"}, "unknown family part '" + part + "' (expected i, ii, iii, iv1, iv3)");
        }
        fail({"form"}, "unknown form '" + form + "' (expected cobb-douglas, quasi-sum, family)");
    }

private:
    [[noreturn]] void fail(std::vector<std::string> tail, const std::string& msg) {
        std::vector<std::string> p = path_;
        p.insert(p.end(), tail.begin(), tail.end());
        throw Failure{std::move(p), msg};
    }

    template <class F>
    ProductionModel build(F f) {
        try {
            return f();
        } catch (const invalid_argument_error& e) {
            fail({}, e.what());
        }
    }

    std::string where(const std::string& key) const {
        std::string s;
        for (const auto& p : path_) s += "/" + p;
        return s + "/" + key;
    }

    void expect_object(const Json& j, std::initializer_list<const char*> allowed) {
        if (!j.is_object()) fail({}, "expected an object");
        only_keys(j, allowed);
    }

    void only_keys(const Json& j, std::initializer_list<const char*> allowed) {
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [key, value] : j.items())
            if (!ok.count(key)) fail({key}, "unknown key '" + key + "'");
    }

    const Json& at(const Json& j, const std::string& key) {
        if (!j.contains(key)) fail({}, "missing required key '" + key + "'");
        return j.at(key);
    }

    std::size_t arity(const Json& doc) {
        const Json& a = at(doc, "arity");
        if (!a.is_number_integer() || a.get<long long>() < 2) fail({"arity"}, "arity must be an integer >= 2");
        return static_cast<std::size_t>(a.get<long long>());
    }

    std::string string_at(const Json& j, const std::string& key) {
        const Json& v = at(j, key);
        if (!v.is_string()) fail({key}, "'" + key + "' must be a string");
        return v.get<std::string>();
    }

    double number_at(const Json& j, const std::string& key) {
        const Json& v = at(j, key);
        if (!v.is_number()) fail({key}, "'" + key + "' must be a number");
        return v.get<double>();
    }

    std::vector<double> number_list_at(const Json& j, const std::string& key, std::size_t n) {
        const Json& v = at(j, key);
        if (!v.is_array()) fail({key}, "'" + key + "' must be an array");
        if (v.size() != n) fail({key}, "'" + key + "' must have " + std::to_string(n) + " entries (arity)");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail({key, std::to_string(i)}, "entry must be a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    OuterFn outer_at(const Json& j, const std::string& key) {
        const Json& o = at(j, key);
        path_.push_back(key);
        if (!o.is_object()) fail({}, "outer function must be an object");
        const std::string kind = string_at(o, "kind");
        OuterFn result = OuterFn::identity();
        try {
            if (kind == "identity") {
                only_keys(o, {"kind"});
            } else if (kind == "exp_affine") {
                only_keys(o, {"kind", "C", "D", "shift"});
                result = OuterFn::exp_affine(number_at(o, "C"), number_at(o, "D"), number_at(o, "shift"));
            } else if (kind == "affine") {
                only_keys(o, {"kind", "m", "b"});
                result = OuterFn::affine(number_at(o, "m"), number_at(o, "b"));
            } else {
                fail({"kind"}, "unknown outer kind '" + kind + "' (expected identity, exp_affine, affine)");
            }
        } catch (const invalid_argument_error& e) {
            fail({}, e.what());
        }
        path_.pop_back();
        return result;
    }

    InnerFn inner_at(const Json& h) {
        if (!h.is_object()) fail({}, "inner function must be an object");
        const std::string kind = string_at(h, "kind");
        try {
            if (kind == "log") {
                only_keys(h, {"kind", "k", "c"});
                return InnerFn::log(number_at(h, "k"), number_at(h, "c"));
            }
            if (kind == "power") {
                only_keys(h, {"kind", "a", "p"});
                return InnerFn::power(number_at(h, "a"), number_at(h, "p"));
            }
            if (kind == "linear") {
                only_keys(h, {"kind", "a", "b"});
                return InnerFn::linear(number_at(h, "a"), number_at(h, "b"));
            }
        } catch (const invalid_argument_error& e) {
            fail({}, e.what());
        }
        fail({"kind"}, "unknown inner kind '" + kind + "' (expected log, power, linear)");
    }

    std::vector<InnerFn> inner_list_at(const Json& j, const std::string& key, std::size_t n) {
        const Json& v = at(j, key);
        if (!v.is_array()) fail({key}, "'" + key + "' must be an array");
        if (v.size() != n) fail({key}, "'" + key + "' must have " + std::to_string(n) + " entries");
        std::vector<InnerFn> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            path_.push_back(key);
            path_.push_back(std::to_string(i));
            out.push_back(inner_at(v[i]));
            path_.pop_back();
            path_.pop_back();
        }
        return out;
    }

    std::vector<std::string> path_;
};

}  // namespace detail

/// Build a model from a parsed spec document. `source` and `text` are used
/// only to anchor error messages to a line and column.
inline ProductionModel model_from_json(const Json& doc, const std::string& source = "<spec>",
                                       std::string_view text = {}) {
    try {
        return detail::SpecReader{}.read(doc);
    } catch (const detail::SpecReader::Failure& f) {
        std::string pointer;
        for (const auto& p : f.path) pointer += "/" + p;
        std::string loc = source;
        if (!text.empty()) {
            const auto [line, col] = detail::line_column(text, detail::Locator(text).find(f.path));
            loc += ":" + std::to_string(line) + ":" + std::to_string(col);
        }
        throw spec_error(loc + ": " + (pointer.empty() ? "" : pointer + ": ") + f.message);
    }
}

struct LoadedSpec {
    Json document;
    ProductionModel model;
};

inline LoadedSpec parse_model_spec(std::string_view text, const std::string& source = "<spec>") {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw spec_error(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON: " +
                         e.what());
    }
    ProductionModel model = model_from_json(doc, source, text);
    return {std::move(doc), std::move(model)};
}

inline LoadedSpec load_model_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw spec_error(path + ": cannot open model spec");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_spec(ss.str(), path);
}

}  // namespace prodgeo::io
