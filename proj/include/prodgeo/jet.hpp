#pragma once

/**
 * Second-order forward-mode automatic differentiation.
 *
 * A Jet2 carries the value, gradient and Hessian of an intermediate quantity
 * with respect to the n model inputs. Every arithmetic operation propagates
 * all three through the chain rule:
 *
 *   g(a)   : grad = g' * da,            hess = g' * Ha + g'' * da da^T
 *   a * b  : grad = a db + b da,        hess = a Hb + b Ha + da db^T + db da^T
 *
 * Only the upper triangle of the Hessian is computed; the lower triangle is a
 * copy of it, so h(i, j) == h(j, i) holds bitwise for every jet.
 */

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "prodgeo/error.hpp"
#include "prodgeo/matrix.hpp"

namespace prodgeo {

namespace detail {
inline std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

class Jet2 {
public:
    Jet2() = default;

    /// A constant: zero gradient and Hessian.
    static Jet2 constant(std::size_t n, double c) {
        Jet2 j(n);
        j.value_ = c;
        return j;
    }

    /// The i-th independent variable evaluated at x.
    static Jet2 variable(std::size_t n, std::size_t i, double x) {
        Jet2 j(n);
        j.value_ = x;
        j.gradient_.at(i) = 1.0;
        return j;
    }

    /// Assemble a jet from explicit parts. The Hessian is symmetrized by
    /// copying its upper triangle.
    static Jet2 from_parts(double value, std::vector<double> gradient, Matrix hessian) {
        const std::size_t n = gradient.size();
        if (hessian.rows() != n || hessian.cols() != n)
            throw dimension_error("jet: Hessian shape does not match gradient length");
        Jet2 j;
        j.value_ = value;
        j.gradient_ = std::move(gradient);
        j.hessian_ = std::move(hessian);
        j.mirror();
        return j;
    }

    std::size_t arity() const noexcept { return gradient_.size(); }
    double value() const noexcept { return value_; }
    const std::vector<double>& gradient() const noexcept { return gradient_; }
    double gradient(std::size_t i) const { return gradient_.at(i); }
    const Matrix& hessian() const noexcept { return hessian_; }
    double hessian(std::size_t i, std::size_t j) const { return hessian_(i, j); }

    bool is_finite() const {
        if (!std::isfinite(value_)) return false;
        for (double g : gradient_)
            if (!std::isfinite(g)) return false;
        for (double h : hessian_.data())
            if (!std::isfinite(h)) return false;
        return true;
    }

    /// Apply a scalar function given its value and first two derivatives at
    /// value().
    Jet2 chain(double f, double d1, double d2) const {
        const std::size_t n = arity();
        Jet2 r(n);
        r.value_ = f;
        for (std::size_t i = 0; i < n; ++i) r.gradient_[i] = d1 * gradient_[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                r.hessian_(i, j) = d1 * hessian_(i, j) + d2 * gradient_[i] * gradient_[j];
        r.mirror();
        return r;
    }

    Jet2 operator-() const { return chain(-value_, -1.0, 0.0); }

    friend Jet2 operator+(const Jet2& a, const Jet2& b) {
        check_same_arity(a, b);
        const std::size_t n = a.arity();
        Jet2 r(n);
        r.value_ = a.value_ + b.value_;
        for (std::size_t i = 0; i < n; ++i) r.gradient_[i] = a.gradient_[i] + b.gradient_[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) r.hessian_(i, j) = a.hessian_(i, j) + b.hessian_(i, j);
        r.mirror();
        return r;
    }

    friend Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }

    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        check_same_arity(a, b);
        const std::size_t n = a.arity();
        Jet2 r(n);
        r.value_ = a.value_ * b.value_;
        for (std::size_t i = 0; i < n; ++i)
            r.gradient_[i] = a.value_ * b.gradient_[i] + b.value_ * a.gradient_[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                r.hessian_(i, j) = a.value_ * b.hessian_(i, j) + b.value_ * a.hessian_(i, j) +
                                   a.gradient_[i] * b.gradient_[j] + b.gradient_[i] * a.gradient_[j];
        r.mirror();
        return r;
    }

    friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

    friend Jet2 operator+(const Jet2& a, double c) { return a.chain(a.value_ + c, 1.0, 0.0); }
    friend Jet2 operator+(double c, const Jet2& a) { return a + c; }
    friend Jet2 operator-(const Jet2& a, double c) { return a + (-c); }
    friend Jet2 operator-(double c, const Jet2& a) { return (-a) + c; }
    friend Jet2 operator*(const Jet2& a, double c) { return a.chain(a.value_ * c, c, 0.0); }
    friend Jet2 operator*(double c, const Jet2& a) { return a * c; }
    friend Jet2 operator/(const Jet2& a, double c) {
        if (c == 0.0) throw domain_error("jet: division by zero");
        return a * (1.0 / c);
    }
    friend Jet2 operator/(double c, const Jet2& a) { return c * reciprocal(a); }

    friend Jet2 reciprocal(const Jet2& a) {
        const double x = a.value_;
        if (x == 0.0) throw domain_error("jet: division by zero");
        const double inv = 1.0 / x;
        return a.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
    }

private:
    explicit Jet2(std::size_t n) : gradient_(n, 0.0), hessian_(Matrix::square(n)) {}

    static void check_same_arity(const Jet2& a, const Jet2& b) {
        if (a.arity() != b.arity())
            throw dimension_error("jet: operands have arities " + std::to_string(a.arity()) + " and " +
                                  std::to_string(b.arity()));
    }

    void mirror() {
        const std::size_t n = arity();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) hessian_(i, j) = hessian_(j, i);
    }

    double value_ = 0.0;
    std::vector<double> gradient_;
    Matrix hessian_;
};

inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.value());
    return a.chain(e, e, e);
}

inline Jet2 log(const Jet2& a) {
    const double x = a.value();
    if (!(x > 0.0)) throw domain_error("log of non-positive argument " + detail::num_str(x));
    return a.chain(std::log(x), 1.0 / x, -1.0 / (x * x));
}

inline Jet2 sqrt(const Jet2& a) {
    const double x = a.value();
    if (!(x > 0.0)) throw domain_error("sqrt of non-positive argument " + detail::num_str(x));
    const double s = std::sqrt(x);
    return a.chain(s, 0.5 / s, -0.25 / (s * x));
}

/// x^p for real p; requires x > 0 unless p is an integer.
inline Jet2 pow(const Jet2& a, double p) {
    const double x = a.value();
    const bool integral = std::trunc(p) == p;
    if (x < 0.0 && !integral) throw domain_error("pow of negative base with non-integer exponent");
    if (x == 0.0 && p < 2.0 && p != 0.0 && p != 1.0)
        throw domain_error("pow: derivative singular at zero base");
    if (p == 0.0) return Jet2::constant(a.arity(), 1.0);
    if (p == 1.0) return a;
    const double xp2 = std::pow(x, p - 2.0);
    const double xp1 = xp2 * x;
    return a.chain(xp1 * x, p * xp1, p * (p - 1.0) * xp2);
}

inline double value_of(double x) noexcept { return x; }
inline double value_of(const Jet2& j) noexcept { return j.value(); }

// Domain-checked elementary functions usable on both double and Jet2.

template <class T>
T checked_log(const T& x) {
    if (!(value_of(x) > 0.0)) throw domain_error("log of non-positive argument " + detail::num_str(value_of(x)));
    using std::log;
    return log(x);
}

template <class T>
T checked_pow(const T& x, double p) {
    const double v = value_of(x);
    if (v < 0.0 && std::trunc(p) != p) throw domain_error("pow of negative base with non-integer exponent");
    if (v == 0.0 && p < 0.0) throw domain_error("pow of zero base with negative exponent");
    using std::pow;
    return pow(x, p);
}

template <class T>
T checked_sqrt(const T& x) {
    if (!(value_of(x) > 0.0)) throw domain_error("sqrt of non-positive argument " + detail::num_str(value_of(x)));
    using std::sqrt;
    return sqrt(x);
}

template <class T>
T checked_exp(const T& x) {
    using std::exp;
    return exp(x);
}

/// A point of the open positive orthant.
class EvalPoint {
public:
    EvalPoint() = default;

    explicit EvalPoint(std::vector<double> coords) : coords_(std::move(coords)) {
        if (coords_.empty()) throw dimension_error("evaluation point has no coordinates");
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (!std::isfinite(coords_[i]) || !(coords_[i] > 0.0))
                throw domain_error("coordinate x" + std::to_string(i + 1) + " = " + detail::num_str(coords_[i]) +
                                   " is not strictly positive");
        }
    }

    EvalPoint(std::initializer_list<double> coords) : EvalPoint(std::vector<double>(coords)) {}

    std::size_t size() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    std::span<const double> coords() const noexcept { return coords_; }
    const std::vector<double>& vector() const noexcept { return coords_; }

    bool operator==(const EvalPoint&) const = default;

private:
    std::vector<double> coords_;
};

}  // namespace prodgeo
