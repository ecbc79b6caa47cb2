#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "prodgeo/error.hpp"
#include "prodgeo/jet.hpp"

namespace prodgeo {

/// How a grid was produced; enough to regenerate it bit for bit.
struct GridDescriptor {
    enum class Kind { log_uniform, lattice, explicit_points };

    Kind kind = Kind::explicit_points;
    std::vector<double> lows;
    std::vector<double> highs;
    std::size_t count = 0;  // total points (log_uniform) or steps per axis (lattice)
    std::uint64_t seed = 0;
};

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; fixed
/// across standard libraries, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class SampleGrid {
public:
    /// `count` points with log(x_i) uniform in [log lows_i, log highs_i].
    static SampleGrid log_uniform(std::vector<double> lows, std::vector<double> highs, std::size_t count,
                                  std::uint64_t seed) {
        check_box(lows, highs);
        if (count < 2) throw invalid_argument_error("grid: need at least 2 points");
        std::mt19937_64 rng(seed);
        SampleGrid g;
        g.points_.reserve(count);
        const std::size_t n = lows.size();
        for (std::size_t p = 0; p < count; ++p) {
            std::vector<double> c(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double lo = std::log(lows[i]), hi = std::log(highs[i]);
                c[i] = std::exp(lo + unit_uniform(rng) * (hi - lo));
            }
            g.points_.emplace_back(std::move(c));
        }
        g.descriptor_ = {GridDescriptor::Kind::log_uniform, std::move(lows), std::move(highs), count, seed};
        return g;
    }

    /// Cartesian product of `steps` evenly spaced values per axis, endpoints
    /// included; the last coordinate varies fastest.
    static SampleGrid lattice(std::vector<double> lows, std::vector<double> highs, std::size_t steps) {
        check_box(lows, highs);
        if (steps < 2) throw invalid_argument_error("grid: need at least 2 steps per axis");
        const std::size_t n = lows.size();
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i) total *= steps;
        SampleGrid g;
        g.points_.reserve(total);
        std::vector<std::size_t> idx(n, 0);
        for (std::size_t p = 0; p < total; ++p) {
            std::vector<double> c(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(idx[i]) / static_cast<double>(steps - 1);
                c[i] = idx[i] + 1 == steps ? highs[i] : lows[i] + t * (highs[i] - lows[i]);
            }
            g.points_.emplace_back(std::move(c));
            for (std::size_t i = n; i-- > 0;) {
                if (++idx[i] < steps) break;
                idx[i] = 0;
            }
        }
        g.descriptor_ = {GridDescriptor::Kind::lattice, std::move(lows), std::move(highs), steps, 0};
        return g;
    }

    static SampleGrid from_points(std::vector<EvalPoint> points) {
        if (points.size() < 2) throw invalid_argument_error("grid: need at least 2 points");
        for (const auto& p : points)
            if (p.size() != points.front().size()) throw dimension_error("grid: points of mixed dimension");
        SampleGrid g;
        g.points_ = std::move(points);
        g.descriptor_.count = g.points_.size();
        return g;
    }

    /// 64 log-uniform points in [1/2, 2]^n, seed 0.
    static SampleGrid default_grid(std::size_t n, std::uint64_t seed = 0, std::size_t count = 64) {
        return log_uniform(std::vector<double>(n, 0.5), std::vector<double>(n, 2.0), count, seed);
    }

    const std::vector<EvalPoint>& points() const& noexcept { return points_; }
    // by value on temporaries, so `for (auto& p : make_grid().points())` is safe
    std::vector<EvalPoint> points() && noexcept { return std::move(points_); }
    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dimension() const noexcept { return points_.empty() ? 0 : points_.front().size(); }
    bool empty() const noexcept { return points_.empty(); }
    const GridDescriptor& descriptor() const noexcept { return descriptor_; }

private:
    static void check_box(const std::vector<double>& lows, const std::vector<double>& highs) {
        if (lows.empty() || lows.size() != highs.size()) throw dimension_error("grid: box bounds of mismatched length");
        for (std::size_t i = 0; i < lows.size(); ++i) {
            if (!std::isfinite(lows[i]) || !std::isfinite(highs[i]) || !(lows[i] > 0.0) || !(lows[i] < highs[i]))
                throw invalid_argument_error("grid: axis " + std::to_string(i + 1) + " needs 0 < low < high");
        }
    }

    std::vector<EvalPoint> points_;
    GridDescriptor descriptor_;
};

}  // namespace prodgeo
