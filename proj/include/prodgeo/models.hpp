#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prodgeo/error.hpp"
#include "prodgeo/jet.hpp"

namespace prodgeo {

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw invalid_argument_error(what);
}

inline void require_finite(double v, const char* name) {
    require(std::isfinite(v), std::string(name) + " must be finite");
}

}  // namespace detail

/// Strictly monotone one-variable inner function h_i of a quasi-sum.
class InnerFn {
public:
    enum class Kind { log, power, linear };

    /// k * ln(x) + c
    static InnerFn log(double k, double c) {
        detail::require_finite(k, "log inner k");
        detail::require_finite(c, "log inner c");
        detail::require(k != 0.0, "log inner: k must be nonzero");
        return InnerFn(Kind::log, k, c);
    }

    /// a * x^p
    static InnerFn power(double a, double p) {
        detail::require_finite(a, "power inner a");
        detail::require_finite(p, "power inner p");
        detail::require(a != 0.0, "power inner: a must be nonzero");
        detail::require(p != 0.0, "power inner: p must be nonzero");
        return InnerFn(Kind::power, a, p);
    }

    /// a * x + b
    static InnerFn linear(double a, double b) {
        detail::require_finite(a, "linear inner a");
        detail::require_finite(b, "linear inner b");
        detail::require(a != 0.0, "linear inner: a must be nonzero");
        return InnerFn(Kind::linear, a, b);
    }

    Kind kind() const noexcept { return kind_; }
    double first() const noexcept { return p0_; }
    double second() const noexcept { return p1_; }

    template <class T>
    T operator()(const T& x) const {
        switch (kind_) {
        case Kind::log: return p0_ * checked_log(x) + p1_;
        case Kind::power: return p0_ * checked_pow(x, p1_);
        case Kind::linear: return p0_ * x + p1_;
        }
        return x;
    }

    double derivative(double x) const {
        switch (kind_) {
        case Kind::log: return p0_ / x;
        case Kind::power: return p0_ * p1_ * std::pow(x, p1_ - 1.0);
        case Kind::linear: return p0_;
        }
        return 0.0;
    }

    double second_derivative(double x) const {
        switch (kind_) {
        case Kind::log: return -p0_ / (x * x);
        case Kind::power: return p0_ * p1_ * (p1_ - 1.0) * std::pow(x, p1_ - 2.0);
        case Kind::linear: return 0.0;
        }
        return 0.0;
    }

    /// +1 if increasing on (0, inf), -1 if decreasing.
    int direction() const noexcept {
        switch (kind_) {
        case Kind::log: return p0_ > 0 ? 1 : -1;
        case Kind::power: return p0_ * p1_ > 0 ? 1 : -1;
        case Kind::linear: return p0_ > 0 ? 1 : -1;
        }
        return 1;
    }

    bool operator==(const InnerFn&) const = default;

private:
    InnerFn(Kind k, double a, double b) : kind_(k), p0_(a), p1_(b) {}

    Kind kind_;
    double p0_;
    double p1_;
};

/// Outer function G of a quasi-sum; strictly increasing.
class OuterFn {
public:
    enum class Kind { identity, exp_affine, affine };

    static OuterFn identity() { return OuterFn(Kind::identity, 1.0, 0.0, 0.0); }

    /// C * e^{D u} + shift, with C > 0 and D > 0 so that G' > 0.
    static OuterFn exp_affine(double C, double D, double shift) {
        detail::require_finite(C, "exp_affine C");
        detail::require_finite(D, "exp_affine D");
        detail::require_finite(shift, "exp_affine shift");
        detail::require(C > 0.0, "exp_affine outer: C must be positive");
        detail::require(D != 0.0, "exp_affine outer: D must be nonzero");
        detail::require(D > 0.0, "exp_affine outer: D must be positive for an increasing outer function");
        return OuterFn(Kind::exp_affine, C, D, shift);
    }

    /// m * u + b, with m > 0.
    static OuterFn affine(double m, double b) {
        detail::require_finite(m, "affine m");
        detail::require_finite(b, "affine b");
        detail::require(m > 0.0, "affine outer: m must be positive");
        return OuterFn(Kind::affine, m, b, 0.0);
    }

    Kind kind() const noexcept { return kind_; }
    double c() const noexcept { return p0_; }
    double d() const noexcept { return p1_; }
    double shift() const noexcept { return p2_; }
    double m() const noexcept { return p0_; }
    double b() const noexcept { return p1_; }

    template <class T>
    T operator()(const T& u) const {
        switch (kind_) {
        case Kind::identity: return u;
        case Kind::exp_affine: return p0_ * checked_exp(p1_ * u) + p2_;
        case Kind::affine: return p0_ * u + p1_;
        }
        return u;
    }

    double derivative(double u) const {
        switch (kind_) {
        case Kind::identity: return 1.0;
        case Kind::exp_affine: return p0_ * p1_ * std::exp(p1_ * u);
        case Kind::affine: return p0_;
        }
        return 1.0;
    }

    double second_derivative(double u) const {
        switch (kind_) {
        case Kind::identity: return 0.0;
        case Kind::exp_affine: return p0_ * p1_ * p1_ * std::exp(p1_ * u);
        case Kind::affine: return 0.0;
        }
        return 0.0;
    }

    /// c * G(u), c > 0, expressed in the same vocabulary.
    OuterFn scaled(double c) const {
        detail::require(c > 0.0, "output scale must be positive");
        switch (kind_) {
        case Kind::identity: return affine(c, 0.0);
        case Kind::exp_affine: return exp_affine(c * p0_, p1_, c * p2_);
        case Kind::affine: return affine(c * p0_, c * p1_);
        }
        return *this;
    }

    bool operator==(const OuterFn&) const = default;

private:
    OuterFn(Kind k, double a, double b, double c) : kind_(k), p0_(a), p1_(b), p2_(c) {}

    Kind kind_;
    double p0_;
    double p1_;
    double p2_;
};

/// f(x) = A * prod x_i^{alpha_i}
struct CobbDouglas {
    double A;
    std::vector<double> alphas;
};

/// f(x) = G(h_1(x_1) + ... + h_n(x_n))
struct QuasiSum {
    OuterFn outer;
    std::vector<InnerFn> inners;
};

/// f(x) = F(prod x_i^k): the homothetic Cobb-Douglas form.
struct Homothetic {
    OuterFn outer;
    double k;
    std::size_t arity;
};

/// Black-box model given as two instantiations of the same formula.
struct Opaque {
    std::function<double(std::span<const double>)> value;
    std::function<Jet2(std::span<const Jet2>)> jet;
    std::string label;
};

class ProductionModel {
public:
    using Form = std::variant<CobbDouglas, QuasiSum, Homothetic, Opaque>;

    std::size_t arity() const noexcept { return arity_; }
    const Form& form() const noexcept { return form_; }

    template <class F>
    bool holds() const noexcept {
        return std::holds_alternative<F>(form_);
    }

    template <class F>
    const F& as() const {
        return std::get<F>(form_);
    }

    /// Unchecked generic evaluation over double or Jet2 inputs.
    template <class T>
    T evaluate(std::span<const T> x) const;

    static ProductionModel cobb_douglas(double A, std::vector<double> alphas) {
        detail::require_finite(A, "A");
        detail::require(A > 0.0, "Cobb-Douglas: A must be positive");
        detail::require(alphas.size() >= 2, "Cobb-Douglas: arity must be at least 2");
        for (double a : alphas) {
            detail::require_finite(a, "exponent");
            detail::require(a != 0.0, "Cobb-Douglas: exponents must be nonzero");
        }
        const std::size_t n = alphas.size();
        return ProductionModel(n, CobbDouglas{A, std::move(alphas)});
    }

    static ProductionModel quasi_sum(OuterFn outer, std::vector<InnerFn> inners) {
        detail::require(inners.size() >= 2, "quasi-sum: arity must be at least 2");
        const std::size_t n = inners.size();
        return ProductionModel(n, QuasiSum{outer, std::move(inners)});
    }

    static ProductionModel homothetic(OuterFn outer, double k, std::size_t n) {
        detail::require_finite(k, "k");
        detail::require(k != 0.0, "homothetic: k must be nonzero");
        detail::require(n >= 2, "homothetic: arity must be at least 2");
        return ProductionModel(n, Homothetic{outer, k, n});
    }

    static ProductionModel opaque(std::size_t n, Opaque fn) {
        detail::require(n >= 2, "opaque: arity must be at least 2");
        detail::require(static_cast<bool>(fn.value) && static_cast<bool>(fn.jet), "opaque: missing callable");
        return ProductionModel(n, std::move(fn));
    }

private:
    ProductionModel(std::size_t n, Form form) : arity_(n), form_(std::move(form)) {}

    std::size_t arity_;
    Form form_;
};

/// Wrap a generic callable `f(span<const T>) -> T` as an Opaque model.
template <class F>
ProductionModel make_opaque(std::size_t n, F f, std::string label = "opaque") {
    Opaque o;
    o.value = [f](std::span<const double> x) { return f(x); };
    o.jet = [f](std::span<const Jet2> x) { return f(x); };
    o.label = std::move(label);
    return ProductionModel::opaque(n, std::move(o));
}

template <class T>
T ProductionModel::evaluate(std::span<const T> x) const {
    return std::visit(
        [&](const auto& form) -> T {
            using F = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<F, CobbDouglas>) {
                T acc = checked_pow(x[0], form.alphas[0]);
                for (std::size_t i = 1; i < x.size(); ++i) acc = acc * checked_pow(x[i], form.alphas[i]);
                return form.A * acc;
            } else if constexpr (std::is_same_v<F, QuasiSum>) {
                T u = form.inners[0](x[0]);
                for (std::size_t i = 1; i < x.size(); ++i) u = u + form.inners[i](x[i]);
                return form.outer(u);
            } else if constexpr (std::is_same_v<F, Homothetic>) {
                T prod = checked_pow(x[0], form.k);
                for (std::size_t i = 1; i < x.size(); ++i) prod = prod * checked_pow(x[i], form.k);
                return form.outer(prod);
            } else {
                if constexpr (std::is_same_v<T, double>)
                    return form.value(x);
                else
                    return form.jet(x);
            }
        },
        form_);
}

namespace detail {

inline void check_point(const ProductionModel& model, const EvalPoint& point) {
    if (point.size() != model.arity())
        throw dimension_error("point has " + std::to_string(point.size()) + " coordinates, model arity is " +
                              std::to_string(model.arity()));
}

}  // namespace detail

/// f(point), with the point validated against the model.
inline double eval(const ProductionModel& model, const EvalPoint& point) {
    detail::check_point(model, point);
    const double v = model.evaluate<double>(point.coords());
    if (!std::isfinite(v)) throw domain_error("model value is not finite");
    return v;
}

/// Output scaled by c > 0, in the same representation when possible.
inline ProductionModel scale_output(const ProductionModel& model, double c) {
    detail::require(c > 0.0, "output scale must be positive");
    return std::visit(
        [&](const auto& form) -> ProductionModel {
            using F = std::decay_t<decltype(form)>;
            if constexpr (std::is_same_v<F, CobbDouglas>) {
                return ProductionModel::cobb_douglas(c * form.A, form.alphas);
            } else if constexpr (std::is_same_v<F, QuasiSum>) {
                return ProductionModel::quasi_sum(form.outer.scaled(c), form.inners);
            } else if constexpr (std::is_same_v<F, Homothetic>) {
                return ProductionModel::homothetic(form.outer.scaled(c), form.k, form.arity);
            } else {
                Opaque o;
                o.value = [c, v = form.value](std::span<const double> x) { return c * v(x); };
                o.jet = [c, j = form.jet](std::span<const Jet2> x) { return c * j(x); };
                o.label = std::to_string(c) + "*" + form.label;
                return ProductionModel::opaque(model.arity(), std::move(o));
            }
        },
        model.form());
}

/// Monotonicity direction of f in each factor (+1 / -1), when it follows from
/// the structure of the model. Opaque models report nothing.
inline std::optional<std::vector<int>> monotone_directions(const ProductionModel& model) {
    std::vector<int> dirs(model.arity(), 1);
    if (const auto* cd = std::get_if<CobbDouglas>(&model.form())) {
        for (std::size_t i = 0; i < dirs.size(); ++i) dirs[i] = cd->alphas[i] > 0 ? 1 : -1;
        return dirs;
    }
    if (const auto* qs = std::get_if<QuasiSum>(&model.form())) {
        for (std::size_t i = 0; i < dirs.size(); ++i) dirs[i] = qs->inners[i].direction();
        return dirs;
    }
    if (const auto* h = std::get_if<Homothetic>(&model.form())) {
        for (auto& d : dirs) d = h->k > 0 ? 1 : -1;
        return dirs;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Quasi-sum view: every closed-form family written as G(sum h_i(x_i)) with
// analytic G', G'', h_i', h_i''.

/// G(u), or F(e^u) when `through_exp` is set (the homothetic form, where F
/// acts on the product prod x_i^k = e^{k sum ln x_i}).
struct OuterChain {
    OuterFn outer;
    bool through_exp = false;

    double value(double u) const { return through_exp ? outer(std::exp(u)) : outer(u); }

    double derivative(double u) const {
        if (!through_exp) return outer.derivative(u);
        const double v = std::exp(u);
        return outer.derivative(v) * v;
    }

    double second_derivative(double u) const {
        if (!through_exp) return outer.second_derivative(u);
        const double v = std::exp(u);
        return outer.second_derivative(v) * v * v + outer.derivative(v) * v;
    }
};

struct QuasiSumView {
    OuterChain outer;
    std::vector<InnerFn> inners;
};

/// Quasi-sum decomposition of a model, if it has one.
inline std::optional<QuasiSumView> quasi_sum_view(const ProductionModel& model) {
    if (const auto* cd = std::get_if<CobbDouglas>(&model.form())) {
        QuasiSumView v{OuterChain{OuterFn::exp_affine(cd->A, 1.0, 0.0), false}, {}};
        for (double a : cd->alphas) v.inners.push_back(InnerFn::log(a, 0.0));
        return v;
    }
    if (const auto* qs = std::get_if<QuasiSum>(&model.form())) return QuasiSumView{OuterChain{qs->outer, false}, qs->inners};
    if (const auto* h = std::get_if<Homothetic>(&model.form()))
        return QuasiSumView{OuterChain{h->outer, true}, std::vector<InnerFn>(h->arity, InnerFn::log(h->k, 0.0))};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Closed-form families.

/// A * prod x_i^{alpha_i}. Exponents may be negative; zero is rejected.
inline ProductionModel make_cobb_douglas(double A, std::vector<double> alphas) {
    return ProductionModel::cobb_douglas(A, std::move(alphas));
}

enum class TheoremPart { i, ii, iii, iv1, iv2, iv3 };

inline const char* to_string(TheoremPart p) {
    switch (p) {
    case TheoremPart::i: return "i";
    case TheoremPart::ii: return "ii";
    case TheoremPart::iii: return "iii";
    case TheoremPart::iv1: return "iv1";
    case TheoremPart::iv2: return "iv2";
    case TheoremPart::iv3: return "iv3";
    }
    return "?";
}

inline std::optional<TheoremPart> parse_theorem_part(std::string_view s) {
    if (s == "i") return TheoremPart::i;
    if (s == "ii") return TheoremPart::ii;
    if (s == "iii") return TheoremPart::iii;
    if (s == "iv1") return TheoremPart::iv1;
    if (s == "iv2") return TheoremPart::iv2;
    if (s == "iv3") return TheoremPart::iv3;
    return std::nullopt;
}

/// A * x_i^{k_i} * exp(D * sum_{j != i} h_j(x_j)); `others` lists h_j for
/// j != i in increasing j. `index` is zero-based.
struct ConstantElasticityParams {
    double A;
    double D;
    std::size_t index;
    double k;
    std::vector<InnerFn> others;
};

/// Generalized Cobb-Douglas with strictly positive exponents.
struct CobbDouglasParams {
    double A;
    std::vector<double> alphas;
};

/// F(prod x_i^k).
struct HomotheticParams {
    OuterFn outer;
    double k;
    std::size_t n;
};

/// A * prod x_i^{1/n}.
struct ConstantReturnsParams {
    double A;
    std::size_t n;
};

/// A * prod sqrt(x_i).
struct SqrtProductParams {
    double A;
    std::size_t n;
};

using FamilyParams =
    std::variant<ConstantElasticityParams, CobbDouglasParams, HomotheticParams, ConstantReturnsParams, SqrtProductParams>;

inline TheoremPart family_part(const FamilyParams& p) {
    switch (p.index()) {
    case 0: return TheoremPart::i;
    case 1: return TheoremPart::ii;
    case 2: return TheoremPart::iii;
    case 3: return TheoremPart::iv1;
    default: return TheoremPart::iv3;
    }
}

inline ProductionModel make_theorem_family(const ConstantElasticityParams& p) {
    const std::size_t n = p.others.size() + 1;
    detail::require(n >= 2, "part i: need at least one other factor");
    detail::require(p.index < n, "part i: distinguished index out of range");
    detail::require(std::isfinite(p.A) && p.A > 0.0, "part i: A must be positive");
    detail::require(std::isfinite(p.D) && p.D > 0.0, "part i: D must be positive");
    detail::require(std::isfinite(p.k) && p.k != 0.0, "part i: k must be nonzero");
    std::vector<InnerFn> inners;
    inners.reserve(n);
    for (std::size_t j = 0, o = 0; j < n; ++j) inners.push_back(j == p.index ? InnerFn::log(p.k / p.D, 0.0) : p.others[o++]);
    return ProductionModel::quasi_sum(OuterFn::exp_affine(p.A, p.D, 0.0), std::move(inners));
}

inline ProductionModel make_theorem_family(const CobbDouglasParams& p) {
    for (double a : p.alphas) detail::require(std::isfinite(a) && a > 0.0, "part ii: exponents must be positive");
    return make_cobb_douglas(p.A, p.alphas);
}

inline ProductionModel make_theorem_family(const HomotheticParams& p) {
    return ProductionModel::homothetic(p.outer, p.k, p.n);
}

inline ProductionModel make_theorem_family(const ConstantReturnsParams& p) {
    detail::require(p.n >= 2, "part iv1: n must be at least 2");
    return make_cobb_douglas(p.A, std::vector<double>(p.n, 1.0 / static_cast<double>(p.n)));
}

inline ProductionModel make_theorem_family(const SqrtProductParams& p) {
    detail::require(p.n >= 2, "part iv3: n must be at least 2");
    return make_cobb_douglas(p.A, std::vector<double>(p.n, 0.5));
}

inline ProductionModel make_theorem_family(const FamilyParams& p) {
    return std::visit([](const auto& params) { return make_theorem_family(params); }, p);
}

}  // namespace prodgeo
