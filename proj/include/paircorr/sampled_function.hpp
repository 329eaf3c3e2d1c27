#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "paircorr/errors.hpp"
#include "paircorr/quadrature.hpp"
#include "paircorr/summation.hpp"

namespace paircorr {

/// A function known through (grid, values) samples, linearly interpolated
/// between knots. Grid density is the caller's responsibility.
class SampledFunction {
public:
    SampledFunction(std::vector<double> grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        detail::require(grid_.size() >= 2 && grid_.size() == values_.size(),
                        "SampledFunction: need >= 2 knots and matching value count");
        for (std::size_t i = 1; i < grid_.size(); ++i)
            detail::require(grid_[i] > grid_[i - 1], "SampledFunction: grid must be strictly ascending");
    }

    /// Samples f at the given knots.
    template <typename F>
    static SampledFunction sample(std::vector<double> grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
        return SampledFunction(std::move(grid), std::move(v));
    }

    double lo() const noexcept { return grid_.front(); }
    double hi() const noexcept { return grid_.back(); }
    std::span<const double> grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }

    double operator()(double x) const {
        detail::require_range(x >= lo() && x <= hi(), "SampledFunction: argument outside sampled range");
        auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        if (it == grid_.end()) return values_.back();
        const auto i = static_cast<std::size_t>(it - grid_.begin());
        if (i == 0) return values_.front();
        const double t = (x - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
        return values_[i - 1] + t * (values_[i] - values_[i - 1]);
    }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }

    /// Exact integral of the interpolant over [a, b] within the sampled range.
    double integral(double a, double b) const {
        detail::require_range(a >= lo() && b <= hi() && a <= b, "SampledFunction::integral: range");
        CompensatedSum s;
        const auto pts = knots_between(a, b);
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            s.add(0.5 * (pts[i + 1] - pts[i]) * ((*this)(pts[i]) + (*this)(pts[i + 1])));
        return s.value();
    }

    /// Running integral J(x_k) = int_lo^{x_k} f at every knot.
    std::vector<double> cumulative_integral() const {
        std::vector<double> out(grid_.size(), 0.0);
        CompensatedSum s;
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            s.add(0.5 * (grid_[i] - grid_[i - 1]) * (values_[i] + values_[i - 1]));
            out[i] = s.value();
        }
        return out;
    }

    /// Adaptive quadrature of w(x) f(x) over [a, b], split at the knots.
    template <typename W>
    quad::Result integrate_weighted(W&& w, double a, double b, double abs_tol) const {
        const auto pts = knots_between(a, b);
        return quad::integrate_split([&](double x) { return w(x) * (*this)(x); }, pts, abs_tol);
    }

    /// {a, knots strictly inside (a, b), b}
    std::vector<double> knots_between(double a, double b) const {
        std::vector<double> pts{a};
        auto first = std::upper_bound(grid_.begin(), grid_.end(), a);
        for (auto it = first; it != grid_.end() && *it < b; ++it) pts.push_back(*it);
        pts.push_back(b);
        return pts;
    }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
};

} // namespace paircorr
