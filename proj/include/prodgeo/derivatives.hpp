#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "prodgeo/error.hpp"
#include "prodgeo/jet.hpp"
#include "prodgeo/models.hpp"

namespace prodgeo {

/// Value, gradient and Hessian of the model at a point, by forward-mode AD.
inline Jet2 jet_eval(const ProductionModel& model, const EvalPoint& point) {
    detail::check_point(model, point);
    const std::size_t n = model.arity();
    std::vector<Jet2> vars;
    vars.reserve(n);
    for (std::size_t i = 0; i < n; ++i) vars.push_back(Jet2::variable(n, i, point[i]));
    Jet2 out = model.evaluate<Jet2>(std::span<const Jet2>(vars));
    if (out.arity() != n) throw dimension_error("model returned a jet of the wrong arity");
    if (!out.is_finite()) throw domain_error("model derivatives are not finite at the point");
    return out;
}

/// Relative step used by fd_oracle when none is given.
inline constexpr double default_fd_step = 1e-4;

/**
 * Central-difference gradient and Hessian. Coordinate i uses the step
 * h_i = step * max(1, |x_i|); truncation error is O(h^2) for both.
 *
 *   f_i  ~ (f(x + h_i e_i) - f(x - h_i e_i)) / (2 h_i)
 *   f_ii ~ (f(x + h_i e_i) - 2 f(x) + f(x - h_i e_i)) / h_i^2
 *   f_ij ~ (f(++) - f(+-) - f(-+) + f(--)) / (4 h_i h_j)
 */
inline Jet2 fd_oracle(const ProductionModel& model, const EvalPoint& point, double step = default_fd_step) {
    detail::check_point(model, point);
    if (!(step > 0.0) || !std::isfinite(step)) throw invalid_argument_error("fd_oracle: step must be positive");
    const std::size_t n = model.arity();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = point[i];
        h[i] = step * std::max(1.0, std::abs(x));
        if (h[i] < std::ldexp(std::abs(x), -26))
            throw invalid_argument_error("fd_oracle: step below 2^-26 of coordinate x" + std::to_string(i + 1));
        if (!(x - h[i] > 0.0))
            throw domain_error("fd_oracle: stencil leaves the positive orthant at coordinate x" + std::to_string(i + 1));
    }

    std::vector<double> x = point.vector();
    auto f = [&](const std::vector<double>& y) {
        const double v = model.evaluate<double>(std::span<const double>(y));
        if (!std::isfinite(v)) throw domain_error("fd_oracle: non-finite model value in stencil");
        return v;
    };
    auto shifted = [&](std::size_t i, double si, std::size_t j, double sj) {
        std::vector<double> y = x;
        y[i] += si * h[i];
        y[j] += sj * h[j];
        return f(y);
    };

    const double f0 = f(x);
    std::vector<double> grad(n);
    Matrix hess = Matrix::square(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> yp = x, ym = x;
        yp[i] += h[i];
        ym[i] -= h[i];
        const double fp = f(yp), fm = f(ym);
        grad[i] = (fp - fm) / (2.0 * h[i]);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            hess(i, j) = (shifted(i, 1, j, 1) - shifted(i, 1, j, -1) - shifted(i, -1, j, 1) + shifted(i, -1, j, -1)) /
                         (4.0 * h[i] * h[j]);
    return Jet2::from_parts(f0, std::move(grad), std::move(hess));
}

/// Analytic part derivatives of a quasi-sum at a point.
struct QuasiSumParts {
    double u = 0.0;          // sum of h_i(x_i)
    double g = 0.0;          // G(u)
    double g1 = 0.0;         // G'(u)
    double g2 = 0.0;         // G''(u)
    std::vector<double> h1;  // h_i'(x_i)
    std::vector<double> h2;  // h_i''(x_i)
};

inline QuasiSumParts quasi_sum_parts(const QuasiSumView& view, const EvalPoint& point) {
    if (view.inners.size() != point.size())
        throw dimension_error("point has " + std::to_string(point.size()) + " coordinates, model arity is " +
                              std::to_string(view.inners.size()));
    QuasiSumParts p;
    const std::size_t n = point.size();
    p.h1.resize(n);
    p.h2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.u += view.inners[i](point[i]);
        p.h1[i] = view.inners[i].derivative(point[i]);
        p.h2[i] = view.inners[i].second_derivative(point[i]);
    }
    p.g = view.outer.value(p.u);
    p.g1 = view.outer.derivative(p.u);
    p.g2 = view.outer.second_derivative(p.u);
    if (!std::isfinite(p.g) || !std::isfinite(p.g1) || !std::isfinite(p.g2))
        throw domain_error("outer function overflows at u = " + std::to_string(p.u));
    return p;
}

inline QuasiSumView require_quasi_sum(const ProductionModel& model) {
    auto view = quasi_sum_view(model);
    if (!view) throw invalid_argument_error("model has no quasi-sum representation");
    return *view;
}

/**
 * Jet of a quasi-sum assembled from the closed-form partials
 *
 *   f_i  = G'(u) h_i'
 *   f_ii = G''(u) (h_i')^2 + G'(u) h_i''
 *   f_ij = G''(u) h_i' h_j'            (i != j)
 *
 * This path shares nothing with jet_eval beyond the model parameters.
 */
inline Jet2 quasi_sum_derivatives(const ProductionModel& model, const EvalPoint& point) {
    detail::check_point(model, point);
    const QuasiSumParts p = quasi_sum_parts(require_quasi_sum(model), point);
    const std::size_t n = point.size();
    std::vector<double> grad(n);
    Matrix hess = Matrix::square(n);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = p.g1 * p.h1[i];
        for (std::size_t j = i; j < n; ++j)
            hess(i, j) = i == j ? p.g2 * p.h1[i] * p.h1[i] + p.g1 * p.h2[i] : p.g2 * p.h1[i] * p.h1[j];
    }
    return Jet2::from_parts(p.g, std::move(grad), std::move(hess));
}

}  // namespace prodgeo
