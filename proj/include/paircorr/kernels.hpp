#pragma once

/// @file kernels.hpp
/// @brief a(s) = ((1+delta)^s - 1)/s and the band-limited kernel
/// K_eta(x) = (sin 2pi x + sin 2pi(1+eta)x) / (2pi x (1 - 4 eta^2 x^2)),
/// its Fourier transform and its second derivative.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "paircorr/errors.hpp"

namespace paircorr {

/// a(s) = ((1+delta)^s - 1)/s, with the removable point s = 0 by series.
inline std::complex<double> a_of_s(double delta, std::complex<double> s) {
    detail::require(delta > 0.0 && delta < 1.0, "a_of_s: need 0 < delta < 1");
    const double L = std::log1p(delta);
    if (std::abs(s) < 1e-4) {
        // sum_{k>=0} L^{k+1} s^k / (k+1)!
        std::complex<double> term = L, sum = 0.0;
        for (int k = 0; k < 8; ++k) {
            sum += term;
            term *= s * L / static_cast<double>(k + 2);
        }
        return sum;
    }
    // expm1 keeps accuracy for small |s L|
    const std::complex<double> z = s * L;
    std::complex<double> num;
    if (std::abs(z) < 0.5) {
        std::complex<double> term = z, sum = 0.0;
        for (int k = 1; k < 30; ++k) {
            sum += term;
            term *= z / static_cast<double>(k + 1);
        }
        num = sum;
    } else {
        num = std::exp(z) - 1.0;
    }
    return num / s;
}

/// Parameter of the kernel family; 0 < eta < 1/4.
class KernelParams {
public:
    explicit KernelParams(double eta) : eta_(eta) {
        detail::require(eta > 0.0 && eta < 0.25, "KernelParams: need 0 < eta < 1/4");
    }
    double eta() const noexcept { return eta_; }
    /// Location of the removable pole of the rational factor.
    double pole() const noexcept { return 0.5 / eta_; }

private:
    double eta_;
};

/// Distance from a removable point below which K uses its local expansion.
inline constexpr double kKernelSeriesRadius = 1e-4;
/// Same for K''; the direct formula cancels ~1/u^2 poles, so a wider radius.
inline constexpr double kKernelSecondSeriesRadius = 0.25;

namespace detail {

// Derivatives of S(x) = sin(w1 x) + sin(w2 x) at x0 and the Taylor
// coefficients of Q(u) = S(x0 + u) / u (requires S(x0) = 0).
struct QuotientSeries {
    static constexpr int terms = 40;
    std::array<double, terms> q{}; // Q(u) = sum q[k] u^k

    QuotientSeries(double w1, double w2, double x0) {
        const double s1 = std::sin(w1 * x0), c1 = std::cos(w1 * x0);
        const double s2 = std::sin(w2 * x0), c2 = std::cos(w2 * x0);
        // d^m/dx^m sin(w x) = w^m sin(w x + m pi/2)
        const auto phase = [](double s, double c, int m) {
            switch (m & 3) {
            case 0: return s;
            case 1: return c;
            case 2: return -s;
            default: return -c;
            }
        };
        double p1 = 1.0, p2 = 1.0, fact = 1.0;
        for (int m = 1; m <= terms; ++m) {
            p1 *= w1;
            p2 *= w2;
            fact *= m;
            q[m - 1] = (p1 * phase(s1, c1, m) + p2 * phase(s2, c2, m)) / fact;
        }
    }

    // value, first and second derivative at u
    std::array<double, 3> eval(double u) const {
        double v = 0.0, d1 = 0.0, d2 = 0.0;
        for (int k = terms - 1; k >= 0; --k) {
            d2 = d2 * u + 2.0 * d1;
            d1 = d1 * u + v;
            v = v * u + q[k];
        }
        return {v, d1, d2};
    }
};

inline double sin_sum(double eta, double x) {
    return std::sin(2.0 * std::numbers::pi * x) + std::sin(2.0 * std::numbers::pi * (1.0 + eta) * x);
}

// K near x = 0: K = Q0(x) R0(x) / (2 pi), R0 = 1 / (1 - 4 eta^2 x^2).
// K near x0 = 1/(2 eta): K = -Q(u) R(x) / (4 pi eta), R = 1/(x (1 + 2 eta x)).
// Returns {K, K', K''}.
inline std::array<double, 3> kernel_local(double eta, double ax) {
    constexpr double pi = std::numbers::pi;
    const double w1 = 2.0 * pi, w2 = 2.0 * pi * (1.0 + eta);
    const double x0 = 0.5 / eta;
    if (ax < x0 / 2) {
        static thread_local double cached_eta = -1.0;
        static thread_local QuotientSeries series(w1, w2, 0.0);
        if (cached_eta != eta) {
            series = QuotientSeries(w1, w2, 0.0);
            cached_eta = eta;
        }
        const auto [q, q1, q2] = series.eval(ax);
        const double e2 = 4.0 * eta * eta;
        const double den = 1.0 - e2 * ax * ax;
        const double r = 1.0 / den;
        const double r1 = 2.0 * e2 * ax / (den * den);
        const double r2 = 2.0 * e2 / (den * den) + 8.0 * e2 * e2 * ax * ax / (den * den * den);
        return {q * r / (2.0 * pi), (q1 * r + q * r1) / (2.0 * pi), (q2 * r + 2.0 * q1 * r1 + q * r2) / (2.0 * pi)};
    }
    static thread_local double cached_eta = -1.0;
    static thread_local QuotientSeries series(w1, w2, 1.0);
    if (cached_eta != eta) {
        series = QuotientSeries(w1, w2, x0);
        cached_eta = eta;
    }
    const double u = ax - x0;
    const auto [q, q1, q2] = series.eval(u);
    const double e = 2.0 * eta;
    // R = 1/x - e/(1 + e x)
    const double r = 1.0 / ax - e / (1.0 + e * ax);
    const double r1 = -1.0 / (ax * ax) + e * e / ((1.0 + e * ax) * (1.0 + e * ax));
    const double r2 = 2.0 / (ax * ax * ax) - 2.0 * e * e * e / std::pow(1.0 + e * ax, 3);
    const double scale = -1.0 / (4.0 * pi * eta);
    return {scale * q * r, scale * (q1 * r + q * r1), scale * (q2 * r + 2.0 * q1 * r1 + q * r2)};
}

// R = 1/(x - 4 eta^2 x^3) and its first two derivatives.
inline std::array<double, 3> rational_factor(double eta, double x) {
    const double e2 = 4.0 * eta * eta;
    const double d = x - e2 * x * x * x;
    const double d1 = 1.0 - 3.0 * e2 * x * x;
    const double d2 = -6.0 * e2 * x;
    const double r = 1.0 / d;
    return {r, -d1 * r * r, (2.0 * d1 * d1 - d * d2) * r * r * r};
}

} // namespace detail

/// K_eta(x); even, with removable points at 0 and +-1/(2 eta).
inline double kernel_K(const KernelParams& p, double x) {
    const double eta = p.eta();
    const double ax = std::fabs(x);
    if (ax < kKernelSeriesRadius || std::fabs(ax - p.pole()) < kKernelSeriesRadius)
        return detail::kernel_local(eta, ax)[0];
    return detail::sin_sum(eta, ax) / (2.0 * std::numbers::pi * ax * (1.0 - 4.0 * eta * eta * ax * ax));
}

/// Fourier transform of K_eta: 1 on |t| <= 1, cos^2 taper to 0 at 1 + eta.
inline double kernel_K_hat(const KernelParams& p, double t) {
    const double at = std::fabs(t);
    const double eta = p.eta();
    if (at <= 1.0) return 1.0;
    if (at >= 1.0 + eta) return 0.0;
    const double c = std::cos(std::numbers::pi * (at - 1.0) / (2.0 * eta));
    return c * c;
}

/// K_eta'(x); odd.
inline double kernel_K_first_derivative(const KernelParams& p, double x) {
    constexpr double pi = std::numbers::pi;
    const double eta = p.eta();
    const double ax = std::fabs(x);
    const double sign = x < 0 ? -1.0 : 1.0;
    if (ax < kKernelSecondSeriesRadius || std::fabs(ax - p.pole()) < kKernelSecondSeriesRadius)
        return sign * detail::kernel_local(eta, ax)[1];
    const double w1 = 2.0 * pi, w2 = 2.0 * pi * (1.0 + eta);
    const double s = std::sin(w1 * ax) + std::sin(w2 * ax);
    const double c1 = w1 * std::cos(w1 * ax) + w2 * std::cos(w2 * ax);
    const auto [f0, f1, f2] = detail::rational_factor(eta, ax);
    (void)f2;
    return sign * (c1 * f0 + s * f1) / (2.0 * pi);
}

/// K_eta''(x) from the partial-fraction form
///   K = S(x) [1/x + eta/(1 - 2 eta x) - eta/(1 + 2 eta x)] / (2 pi),
/// switching to the local quotient expansion near the removable points.
/// The bracket is evaluated as 1/(x - 4 eta^2 x^3): summing the partial
/// fractions loses (eta x)^2 digits for large x.
inline double kernel_K_second_derivative(const KernelParams& p, double x) {
    constexpr double pi = std::numbers::pi;
    const double eta = p.eta();
    const double ax = std::fabs(x);
    if (ax < kKernelSecondSeriesRadius || std::fabs(ax - p.pole()) < kKernelSecondSeriesRadius)
        return detail::kernel_local(eta, ax)[2];
    const double w1 = 2.0 * pi, w2 = 2.0 * pi * (1.0 + eta);
    const double s = std::sin(w1 * ax) + std::sin(w2 * ax);
    const double c1 = w1 * std::cos(w1 * ax) + w2 * std::cos(w2 * ax);
    const double s2 = -(w1 * w1 * std::sin(w1 * ax) + w2 * w2 * std::sin(w2 * ax));
    const auto [f0, f1, f2] = detail::rational_factor(eta, ax);
    return (s2 * f0 + 2.0 * c1 * f1 + s * f2) / (2.0 * pi);
}

} // namespace paircorr
