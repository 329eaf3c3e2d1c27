#pragma once

/// @file quadrature.hpp
/// @brief Adaptive Gauss-Kronrod (7/15) integration with deterministic
/// bisection order, plus panelled and composite rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "paircorr/errors.hpp"
#include "paircorr/summation.hpp"

namespace paircorr::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const {
        // max-heap on error; ties broken by position for determinism
        if (error != o.error) return error < o.error;
        return a > o.a;
    }
};

template <typename F>
Interval gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kronrod_nodes[i];
        const double s = f(c - dx) + f(c + dx);
        kron += kronrod_weights[i] * s;
        if (i % 2 == 1) gauss += gauss_weights[i / 2] * s;
    }
    return {a, b, kron * h, std::fabs((kron - gauss) * h)};
}

} // namespace detail

/// Globally adaptive GK15 on [a, b] until the summed error estimate falls
/// below max(abs_tol, rel_tol * |I|) or max_intervals is reached.
template <typename F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                 std::size_t max_intervals = 20000) {
    if (a == b) return {};
    std::priority_queue<detail::Interval> heap;
    auto first = detail::gk15(f, a, b);
    std::size_t evals = 15;
    double total_err = first.error;
    double total_val = first.value;
    heap.push(first);
    while (true) {
        const double target = std::max(abs_tol, rel_tol * std::fabs(total_val));
        if (total_err <= target) break;
        if (heap.size() >= max_intervals) break;
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        heap.pop();
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        evals += 30;
        total_val += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum in position order so the value does not depend on heap history.
    std::vector<detail::Interval> parts;
    parts.reserve(heap.size());
    while (!heap.empty()) {
        parts.push_back(heap.top());
        heap.pop();
    }
    std::sort(parts.begin(), parts.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    CompensatedSum v, e;
    for (const auto& p : parts) {
        v.add(p.value);
        e.add(p.error);
    }
    Result r{v.value(), e.value(), evals, true};
    r.converged = r.error <= std::max(abs_tol, rel_tol * std::fabs(r.value));
    return r;
}

/// Same as integrate() but throws NumericError when the tolerance is missed.
template <typename F>
Result integrate_or_throw(F&& f, double a, double b, double abs_tol, const char* what,
                          std::size_t max_intervals = 20000) {
    auto r = integrate(f, a, b, abs_tol, 0.0, max_intervals);
    if (!r.converged) throw NumericError(std::string(what) + ": quadrature did not converge", r.error);
    return r;
}

/// Adaptive integration over consecutive panels split at the given ascending
/// points. Each panel gets a share of abs_tol proportional to its length.
template <typename F>
Result integrate_split(F&& f, std::span<const double> points, double abs_tol,
                       std::size_t max_intervals_per_panel = 2000, double rel_tol = 0.0) {
    Result total;
    if (points.size() < 2) return total;
    const double span = points.back() - points.front();
    CompensatedSum v, e;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double a = points[i], b = points[i + 1];
        if (b <= a) continue;
        const double tol = span > 0 ? abs_tol * (b - a) / span : abs_tol;
        auto r = integrate(f, a, b, tol, rel_tol, max_intervals_per_panel);
        v.add(r.value);
        e.add(r.error);
        total.evaluations += r.evaluations;
        total.converged = total.converged && r.converged;
    }
    total.value = v.value();
    total.error = e.value();
    return total;
}

/// Uniform panels of width at most panel on [a, b], also split at the given
/// extra points (e.g. where the integrand switches evaluation branch).
template <typename F>
Result integrate_panelled(F&& f, double a, double b, double panel, double abs_tol,
                          std::span<const double> extra = {}, double rel_tol = 0.0,
                          std::size_t max_intervals_per_panel = 2000) {
    if (b <= a) return {};
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / panel));
    std::vector<double> pts(n + 1);
    for (std::size_t i = 0; i <= n; ++i) pts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    pts[n] = b;
    for (double x : extra)
        if (x > a && x < b) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return integrate_split(f, pts, abs_tol, max_intervals_per_panel, rel_tol);
}

/// Composite Simpson rule with an even number of intervals (rounded up).
template <typename F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
    if (b == a) return 0.0;
    if (intervals < 2) intervals = 2;
    if (intervals % 2) ++intervals;
    const double h = (b - a) / static_cast<double>(intervals);
    CompensatedSum s;
    s.add(f(a));
    s.add(f(b));
    for (std::size_t i = 1; i < intervals; ++i) {
        const double x = a + h * static_cast<double>(i);
        s.add((i % 2 ? 4.0 : 2.0) * f(x));
    }
    return s.value() * h / 3.0;
}

} // namespace paircorr::quad
