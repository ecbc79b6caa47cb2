#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace prodgeo {

/// Small dense row-major matrix. Sizes here are the model arity (2..8).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix square(std::size_t n, double fill = 0.0) { return Matrix(n, n, fill); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    const std::vector<double>& data() const noexcept { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_)
            if (std::isfinite(v)) m = std::max(m, std::abs(v));
        return m;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct Determinant {
    double value = 0.0;
    /// max |pivot| / min |pivot|; infinite when a pivot is exactly zero.
    double pivot_span = 1.0;

    /// An exactly zero pivot: the matrix is singular in floating point.
    bool singular() const { return std::isinf(pivot_span); }
    bool ill_conditioned() const { return !singular() && !(pivot_span <= 1e12); }
};

/// Determinant by LU factorization with row pivoting. The 2x2 case uses the
/// closed form a*d - b*c so it agrees bitwise with the sectional-curvature
/// numerator of a symmetric matrix.
inline Determinant lu_determinant(const Matrix& m) {
    assert(m.rows() == m.cols());
    const std::size_t n = m.rows();
    if (n == 0) return {1.0, 1.0};
    if (n == 1) return {m(0, 0), m(0, 0) == 0.0 ? std::numeric_limits<double>::infinity() : 1.0};
    if (n == 2) {
        const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        // pivots of the eliminated form, for the conditioning flag only
        const bool swap = std::abs(m(1, 0)) > std::abs(m(0, 0));
        const double p0 = swap ? m(1, 0) : m(0, 0);
        const double p1 = p0 == 0.0 ? 0.0 : det / p0;
        const double hi = std::max(std::abs(p0), std::abs(p1));
        const double lo = std::min(std::abs(p0), std::abs(p1));
        return {det, lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo};
    }

    Matrix a = m;
    double det = 1.0;
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a(r, k)) > std::abs(a(piv, k))) piv = r;
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(piv, c));
            det = -det;
        }
        const double p = a(k, k);
        hi = std::max(hi, std::abs(p));
        lo = std::min(lo, std::abs(p));
        if (p == 0.0) return {0.0, std::numeric_limits<double>::infinity()};
        det *= p;
        for (std::size_t r = k + 1; r < n; ++r) {
            const double factor = a(r, k) / p;
            for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= factor * a(k, c);
        }
    }
    return {det, hi / lo};
}

/// Hadamard's bound: |det(m)| <= product of row norms.
inline double hadamard_bound(const Matrix& m) {
    double bound = 1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * m(i, j);
        bound *= std::sqrt(s);
    }
    return bound;
}

}  // namespace prodgeo
