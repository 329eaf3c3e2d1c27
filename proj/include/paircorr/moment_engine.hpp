#pragma once

/// @file moment_engine.hpp
/// @brief Exact second moments of psi increments over short windows.
///
/// The integrand is a step function of x (fixed window) or a step function
/// minus a linear term (proportional window), so each integral is summed
/// piece by piece between the jumps of psi(x) and psi(x + h) (resp.
/// psi((1 + delta) x)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "paircorr/constants.hpp"
#include "paircorr/errors.hpp"
#include "paircorr/parallel.hpp"
#include "paircorr/prime_core.hpp"
#include "paircorr/quadrature.hpp"
#include "paircorr/report.hpp"
#include "paircorr/summation.hpp"

namespace paircorr {

enum class WindowKind { fixed_h, proportional };

inline const char* to_string(WindowKind k) { return k == WindowKind::fixed_h ? "h" : "delta"; }

struct MomentResult {
    double X = 0.0;
    WindowKind kind = WindowKind::fixed_h;
    double parameter = 0.0; ///< h or delta
    double value = 0.0;
    double main_term = 0.0;
    double second_term = 0.0;
    double residual = 0.0;
    double normalized_residual = 0.0;
};

/// Events closer than this (relative to max(1, |x|)) are merged.
inline constexpr double kBreakpointGuard = 1e-12;

namespace detail {

// Sweep over [lo, hi]: i = #{bp <= x}, j = #{entry(bp) <= x}, where a prime
// power n enters the window at entry(n) and leaves it at n. piece(w, m, A)
// returns the integral over a piece of width w, midpoint m, step value A.
template <typename Entry, typename Piece>
double sweep(const PsiTable& table, double lo, double hi, Entry entry, Piece piece) {
    const auto& bp = table.breakpoints();
    const std::size_t nbp = bp.size();
    std::size_t i = static_cast<std::size_t>(
        std::partition_point(bp.begin(), bp.end(), [&](std::uint64_t n) { return static_cast<double>(n) <= lo; }) -
        bp.begin());
    std::size_t j = static_cast<std::size_t>(
        std::partition_point(bp.begin(), bp.end(), [&](std::uint64_t n) { return entry(n) <= lo; }) - bp.begin());
    constexpr double inf = std::numeric_limits<double>::infinity();
    CompensatedSum total;
    double x = lo;
    while (x < hi) {
        const double next_exit = i < nbp ? static_cast<double>(bp[i]) : inf;
        const double next_entry = j < nbp ? entry(bp[j]) : inf;
        const double x_next = std::min({next_exit, next_entry, hi});
        const double A = table.psi_after_breakpoints(j) - table.psi_after_breakpoints(i);
        if (x_next > x) total.add(piece(x_next - x, 0.5 * (x + x_next), A));
        if (x_next >= hi) break;
        const double guard = kBreakpointGuard * std::max(1.0, std::fabs(x_next));
        if (next_exit <= x_next + guard) ++i;
        if (next_entry <= x_next + guard) ++j;
        x = x_next;
    }
    return total.value();
}

} // namespace detail

/// int_lo^hi (psi(x + h) - psi(x) - h)^2 dx, exact.
inline double integrate_fixed_h(const PsiTable& table, double h, double lo, double hi) {
    detail::require_range(h > 0.0 && lo >= 0.0 && lo <= hi && hi + h <= static_cast<double>(table.limit()),
                          "integrate_fixed_h: need h > 0, 0 <= lo <= hi, hi + h <= table limit");
    return detail::sweep(
        table, lo, hi, [h](std::uint64_t n) { return static_cast<double>(n) - h; },
        [h](double w, double, double A) { return w * (A - h) * (A - h); });
}

/// int_lo^hi (psi((1 + delta) x) - psi(x) - delta x)^2 dx, exact.
inline double integrate_delta(const PsiTable& table, double delta, double lo, double hi) {
    detail::require_range(delta > 0.0 && delta < 1.0 && lo >= 0.0 && lo <= hi &&
                              (1.0 + delta) * hi <= static_cast<double>(table.limit()),
                          "integrate_delta: need 0 < delta < 1, 0 <= lo <= hi, (1 + delta) hi <= table limit");
    const double q = 1.0 + delta;
    return detail::sweep(
        table, lo, hi, [q](std::uint64_t n) { return static_cast<double>(n) / q; },
        [delta](double w, double m, double A) {
            const double c = A - delta * m;
            return w * (c * c + delta * delta * w * w / 12.0);
        });
}

inline MomentResult second_moment_fixed_h(const PsiTable& table, double X, double h) {
    detail::require_range(X >= 1.0 && h > 0.0 && X + h <= static_cast<double>(table.limit()),
                          "second_moment_fixed_h: need X >= 1, h > 0, X + h <= table limit");
    MomentResult r;
    r.X = X;
    r.kind = WindowKind::fixed_h;
    r.parameter = h;
    r.value = integrate_fixed_h(table, h, 1.0, X);
    r.main_term = h * X * std::log(X / h);
    r.second_term = constants().B * h * X;
    r.residual = r.value - r.main_term - r.second_term;
    r.normalized_residual = r.residual / (h * X);
    return r;
}

inline MomentResult second_moment_delta(const PsiTable& table, double X, double delta) {
    detail::require_range(X >= 1.0 && delta > 0.0 && delta < 1.0 &&
                              (1.0 + delta) * X <= static_cast<double>(table.limit()),
                          "second_moment_delta: need X >= 1, 0 < delta < 1, (1 + delta) X <= table limit");
    MomentResult r;
    r.X = X;
    r.kind = WindowKind::proportional;
    r.parameter = delta;
    r.value = integrate_delta(table, delta, 1.0, X);
    r.main_term = 0.5 * delta * X * X * std::log(1.0 / delta);
    r.second_term = constants().C * delta * X * X;
    r.residual = r.value - r.main_term - r.second_term;
    r.normalized_residual = r.residual / (delta * X * X);
    return r;
}

/// int_0^Delta int_1^X (psi((1+d)x) - psi(x) - d x)^2 dx dd against
/// (1/4) Delta^2 X^2 log(1/Delta) + K Delta^2 X^2. Simpson over d; the
/// normalized residual /(Delta^2 X^2) is compared to tolerance.
inline VerifierReport averaged_double_integral(const PsiTable& table, double X, double Delta, std::size_t grid,
                                               double tolerance = 0.5, const Threads& threads = {}) {
    detail::require(Delta > 0.0 && Delta < 1.0, "averaged_double_integral: need 0 < Delta < 1");
    detail::require(grid >= 16, "averaged_double_integral: need grid >= 16");
    detail::require_range(X >= 1.0 && (1.0 + Delta) * X <= static_cast<double>(table.limit()),
                          "averaged_double_integral: need X >= 1, (1 + Delta) X <= table limit");
    if (grid % 2) ++grid;
    std::vector<double> inner(grid + 1, 0.0);
    parallel_blocks(grid, threads, [&](std::size_t k) {
        const double d = Delta * static_cast<double>(k + 1) / static_cast<double>(grid);
        inner[k + 1] = integrate_delta(table, d, 1.0, X);
    });
    CompensatedSum s;
    for (std::size_t k = 0; k <= grid; ++k)
        s.add((k == 0 || k == grid) ? inner[k] : (k % 2 ? 4.0 : 2.0) * inner[k]);
    const double value = s.value() * (Delta / static_cast<double>(grid)) / 3.0;
    const double scale = Delta * Delta * X * X;
    const double predicted = 0.25 * scale * std::log(1.0 / Delta) + averaged_moment_K() * scale;
    const double normalized = scale > 0.0 ? (value - predicted) / scale : 0.0;
    auto r = VerifierReport::make("averaged_double_integral", value, predicted, std::fabs(normalized), tolerance,
                                  "Simpson over delta in [0, Delta] with " + std::to_string(grid) +
                                      " intervals, exact inner integrals; abs_error is |value - predicted| / "
                                      "(Delta^2 X^2); K = 3/8 + B/4");
    r.extra["X"] = X;
    r.extra["Delta"] = Delta;
    r.extra["normalized_residual"] = normalized;
    return r;
}

struct MomentSample {
    double X;
    WindowKind kind;
    double parameter;
};

/// value / bound with bound hX (log 2X/h)^2 or delta X^2 (log 2/delta)^2.
inline std::vector<double> sv_bound_ratios(const PsiTable& table, const std::vector<MomentSample>& samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.kind == WindowKind::fixed_h) {
            const auto m = second_moment_fixed_h(table, s.X, s.parameter);
            const double l = std::log(2.0 * s.X / s.parameter);
            out.push_back(m.value / (s.parameter * s.X * l * l));
        } else {
            const auto m = second_moment_delta(table, s.X, s.parameter);
            const double l = std::log(2.0 / s.parameter);
            out.push_back(m.value / (s.parameter * s.X * s.X * l * l));
        }
    }
    return out;
}

struct FitResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t points = 0;
    WindowKind kind = WindowKind::fixed_h;
};

/// Unweighted least squares of (value - main)/(hX) (resp. /(delta X^2))
/// against a constant: the mean, with standard error sd / sqrt(n).
inline FitResult fit_constant(const std::vector<MomentResult>& results) {
    detail::require(results.size() >= 3, "fit_constant: need at least 3 results");
    const WindowKind kind = results.front().kind;
    for (const auto& r : results)
        detail::require(r.kind == kind, "fit_constant: results mix fixed-h and proportional windows");
    std::vector<double> y;
    y.reserve(results.size());
    for (const auto& r : results) {
        const double scale = kind == WindowKind::fixed_h ? r.parameter * r.X : r.parameter * r.X * r.X;
        y.push_back((r.value - r.main_term) / scale);
    }
    const double n = static_cast<double>(y.size());
    const double mean = compensated_total(y) / n;
    CompensatedSum ss;
    for (double v : y) ss.add((v - mean) * (v - mean));
    FitResult f;
    f.estimate = mean;
    f.stderr_ = std::sqrt(ss.value() / (n - 1.0)) / std::sqrt(n);
    f.points = y.size();
    f.kind = kind;
    return f;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_moment_csv_header(std::ostream& out) {
    out << "X,kind,h_or_delta,value,main_term,second_term,residual,normalized_residual\n";
}

inline void write_moment_csv_row(std::ostream& out, const MomentResult& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.9g,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.X, to_string(r.kind), r.parameter,
                  r.value, r.main_term, r.second_term, r.residual, r.normalized_residual);
    out << buf;
}

inline nlohmann::ordered_json to_json(const MomentResult& r) {
    nlohmann::ordered_json j;
    j["X"] = r.X;
    j["kind"] = to_string(r.kind);
    j["h_or_delta"] = r.parameter;
    j["value"] = r.value;
    j["main_term"] = r.main_term;
    j["second_term"] = r.second_term;
    j["residual"] = r.residual;
    j["normalized_residual"] = r.normalized_residual;
    return j;
}

} // namespace paircorr
