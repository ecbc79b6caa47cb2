#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "prodgeo/derivatives.hpp"
#include "prodgeo/grid.hpp"
#include "prodgeo/matrix.hpp"

namespace prodgeo {

/// Quantities at or below this magnitude count as vanishing denominators.
inline constexpr double vanishing_guard = 1e-300;

/// E_i = x_i f_i / f
struct ElasticityVector {
    std::vector<double> values;
};

/// (i, j) entry is f_j / f_i.
struct MrsMatrix {
    Matrix values;
};

inline ElasticityVector elasticity_from_jet(const Jet2& jet, const EvalPoint& point) {
    const double f = jet.value();
    if (!(std::abs(f) > vanishing_guard)) throw degenerate_error("elasticity: f vanishes at the point", 0);
    ElasticityVector e;
    e.values.resize(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) e.values[i] = point[i] * jet.gradient(i) / f;
    return e;
}

inline ElasticityVector elasticity(const ProductionModel& model, const EvalPoint& point) {
    return elasticity_from_jet(jet_eval(model, point), point);
}

inline MrsMatrix mrs_from_jet(const Jet2& jet) {
    const std::size_t n = jet.arity();
    for (std::size_t i = 0; i < n; ++i)
        if (!(std::abs(jet.gradient(i)) > vanishing_guard))
            throw degenerate_error("MRS: partial derivative f_x" + std::to_string(i + 1) + " vanishes", i);
    MrsMatrix m{Matrix::square(n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.values(i, j) = i == j ? 1.0 : jet.gradient(j) / jet.gradient(i);
    return m;
}

inline MrsMatrix mrs(const ProductionModel& model, const EvalPoint& point) {
    return mrs_from_jet(jet_eval(model, point));
}

/// A grid point whose evaluation failed inside a sampled check.
struct PointError {
    std::size_t point = 0;
    std::string message;
};

struct ProportionalMrsVerdict {
    /// Empty when some grid point could not be evaluated.
    std::optional<bool> holds;
    /// max over points and pairs of |MRS_ij - x_i/x_j| / (1 + x_i/x_j)
    double worst_residual = 0.0;
    std::size_t worst_point = 0;
    std::size_t worst_i = 0;
    std::size_t worst_j = 1;
    /// MRS_ij / (x_i/x_j) at the worst entry.
    double worst_ratio = 1.0;
    std::vector<PointError> errors;
};

/// MRS_ij == x_i / x_j for all i != j, sampled over the grid.
inline ProportionalMrsVerdict is_proportional_mrs(const ProductionModel& model, const SampleGrid& grid, double tol) {
    if (grid.empty()) throw invalid_argument_error("is_proportional_mrs: empty grid");
    ProportionalMrsVerdict v;
    bool first = true;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const EvalPoint& x = grid.points()[p];
        try {
            const MrsMatrix m = mrs(model, x);
            for (std::size_t i = 0; i < x.size(); ++i)
                for (std::size_t j = 0; j < x.size(); ++j) {
                    if (i == j) continue;
                    const double target = x[i] / x[j];
                    const double r = std::abs(m.values(i, j) - target) / (1.0 + std::abs(target));
                    if (first || r > v.worst_residual) {
                        first = false;
                        v.worst_residual = r;
                        v.worst_point = p;
                        v.worst_i = i;
                        v.worst_j = j;
                        v.worst_ratio = m.values(i, j) / target;
                    }
                }
        } catch (const domain_error& e) {
            v.errors.push_back({p, e.what()});
        }
    }
    if (v.errors.empty()) v.holds = v.worst_residual <= tol;
    return v;
}

}  // namespace prodgeo
