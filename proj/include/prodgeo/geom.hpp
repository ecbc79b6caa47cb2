#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "prodgeo/derivatives.hpp"
#include "prodgeo/grid.hpp"
#include "prodgeo/matrix.hpp"

namespace prodgeo {

/// Curvature invariants of the graph hypersurface (x, f(x)) at one point.
struct CurvatureReport {
    double w = 1.0;                // sqrt(1 + |grad f|^2)
    double gauss_kronecker = 0.0;  // det(Hess f) / w^{n+2}
    double mean = 0.0;             // H
    Matrix sectional;              // K_ij, quiet NaN on the diagonal
    double hessian_det = 0.0;
    double pivot_span = 1.0;
    bool ill_conditioned = false;

    /// Magnitudes that set the roundoff floor of each quantity; a value is
    /// "vanishing" when it is small relative to 1 + scale.
    double gauss_kronecker_scale = 0.0;  // roundoff floor of det: |ad| + |bc| for n = 2, Hadamard bound above
    Matrix sectional_scale;              // (|f_ii f_jj| + f_ij^2) / denominator
    double minimality_lhs = 0.0;         // n w^3 H
    double minimality_scale = 0.0;

    std::size_t arity() const noexcept { return sectional.rows(); }

    double normalized_gauss_kronecker() const { return std::abs(gauss_kronecker) / (1.0 + gauss_kronecker_scale); }

    double normalized_sectional(std::size_t i, std::size_t j) const {
        return std::abs(sectional(i, j)) / (1.0 + sectional_scale(i, j));
    }

    double max_normalized_sectional() const {
        double m = 0.0;
        for (std::size_t i = 0; i < arity(); ++i)
            for (std::size_t j = i + 1; j < arity(); ++j) m = std::max(m, normalized_sectional(i, j));
        return m;
    }

    double max_abs_sectional() const {
        double m = 0.0;
        for (std::size_t i = 0; i < arity(); ++i)
            for (std::size_t j = i + 1; j < arity(); ++j) m = std::max(m, std::abs(sectional(i, j)));
        return m;
    }

    double normalized_minimality() const { return std::abs(minimality_lhs) / (1.0 + minimality_scale); }
};

inline CurvatureReport curvature_from_jet(const Jet2& jet) {
    const std::size_t n = jet.arity();
    const auto& g = jet.gradient();
    const Matrix& hs = jet.hessian();

    double grad2 = 0.0;
    for (double gi : g) grad2 += gi * gi;
    const double w2 = 1.0 + grad2;

    CurvatureReport r;
    r.w = std::sqrt(w2);
    // w^{n+2} as a power of w^2 (times w for odd n); for n = 2 this is w2 * w2,
    // the same product as the sectional denominator below
    double wn2 = 1.0;
    for (std::size_t k = 0; k < (n + 2) / 2; ++k) wn2 *= w2;
    if (n % 2 == 1) wn2 *= r.w;

    const Determinant det = lu_determinant(hs);
    r.hessian_det = det.value;
    r.pivot_span = det.pivot_span;
    r.ill_conditioned = det.ill_conditioned();
    r.gauss_kronecker = det.value / wn2;
    // the 2x2 determinant is the closed form a*d - b*c, whose roundoff floor is
    // |a*d| + |b*c|; larger matrices use Hadamard's bound
    r.gauss_kronecker_scale =
        (n == 2 ? std::abs(hs(0, 0) * hs(1, 1)) + std::abs(hs(0, 1) * hs(1, 0)) : hadamard_bound(hs)) / wn2;

    // n w^3 H = w^2 sum_i f_ii - sum_{i,j} f_i f_j f_ij
    double trace = 0.0, trace_abs = 0.0, quad = 0.0, quad_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trace += hs(i, i);
        trace_abs += std::abs(hs(i, i));
        for (std::size_t j = 0; j < n; ++j) {
            const double t = g[i] * g[j] * hs(i, j);
            quad += t;
            quad_abs += std::abs(t);
        }
    }
    r.minimality_lhs = w2 * trace - quad;
    r.minimality_scale = w2 * trace_abs + quad_abs;
    r.mean = r.minimality_lhs / (static_cast<double>(n) * w2 * r.w);

    r.sectional = Matrix::square(n, std::numeric_limits<double>::quiet_NaN());
    r.sectional_scale = Matrix::square(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double num = hs(i, i) * hs(j, j) - hs(i, j) * hs(i, j);
            const double den = w2 * (1.0 + (g[i] * g[i] + g[j] * g[j]));
            const double scale = (std::abs(hs(i, i) * hs(j, j)) + hs(i, j) * hs(i, j)) / den;
            r.sectional(i, j) = r.sectional(j, i) = num / den;
            r.sectional_scale(i, j) = r.sectional_scale(j, i) = scale;
        }
    return r;
}

/// K, H and K_ij of the production hypersurface at a point.
inline CurvatureReport curvature(const ProductionModel& model, const EvalPoint& point) {
    return curvature_from_jet(jet_eval(model, point));
}

/// Closed-form Hessian determinant of a quasi-sum:
///   (G')^n prod h_i'' + (G')^{n-1} G'' sum_i (h_i')^2 prod_{j != i} h_j''
inline double quasi_sum_hessian_det(const ProductionModel& model, const EvalPoint& point) {
    detail::check_point(model, point);
    const QuasiSumParts p = quasi_sum_parts(require_quasi_sum(model), point);
    const std::size_t n = point.size();
    double prod_h2 = 1.0;
    for (double v : p.h2) prod_h2 *= v;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double term = p.h1[i] * p.h1[i];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) term *= p.h2[j];
        sum += term;
    }
    const double g1n1 = std::pow(p.g1, static_cast<double>(n - 1));
    return g1n1 * p.g1 * prod_h2 + g1n1 * p.g2 * sum;
}

/// min over the grid of |n w^3 H|, i.e. of the left side of the minimal
/// hypersurface equation
///   sum_i f_ii + sum_{i != j} (f_i^2 f_jj - f_i f_j f_ij) = 0.
/// A strictly positive result certifies the graph is not minimal on the sample.
inline double minimality_residual(const ProductionModel& model, const SampleGrid& grid) {
    if (grid.empty()) throw invalid_argument_error("minimality_residual: empty grid");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : grid.points()) best = std::min(best, std::abs(curvature(model, x).minimality_lhs));
    return best;
}

}  // namespace prodgeo
