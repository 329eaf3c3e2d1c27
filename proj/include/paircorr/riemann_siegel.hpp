#pragma once

/// @file riemann_siegel.hpp
/// @brief theta(t), Z(t) and zeta(s) at desk-scale heights.
///
/// Z(t) uses the Riemann-Siegel main sum with correction terms C0..C4 when
/// t >= kRiemannSiegelThreshold and Euler-Maclaurin summation of zeta below.
/// N(t) = theta(t)/pi + 1 + S(t), with S(t) from continuous tracking of
/// arg zeta(sigma + it) from sigma = 4 down to 1/2.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "paircorr/errors.hpp"

namespace paircorr {

/// Below this height Z(t) is evaluated through Euler-Maclaurin.
inline constexpr double kRiemannSiegelThreshold = 1000.0;

/// Riemann-Siegel theta function (Stirling series; accurate for t >= 5).
inline double rs_theta(double t) {
    constexpr double pi = std::numbers::pi;
    const double r = 1.0 / t, r2 = r * r;
    return 0.5 * t * std::log(t / (2.0 * pi)) - 0.5 * t - pi / 8.0 +
           r * (1.0 / 48.0 + r2 * (7.0 / 5760.0 + r2 * (31.0 / 80640.0 + r2 * (127.0 / 430080.0))));
}

inline double rs_theta_prime(double t) {
    constexpr double pi = std::numbers::pi;
    const double r2 = 1.0 / (t * t);
    return 0.5 * std::log(t / (2.0 * pi)) - r2 * (1.0 / 48.0 + r2 * (7.0 / 1920.0 + r2 * (31.0 / 16128.0)));
}

namespace detail {

// B_{2k}/(2k)! for k = 1..kEulerMaclaurinTerms, from 2 zeta(2k)/(2 pi)^{2k}.
inline constexpr int kEulerMaclaurinTerms = 20;

inline const std::array<double, kEulerMaclaurinTerms>& bernoulli_ratios() {
    static const auto table = [] {
        std::array<double, kEulerMaclaurinTerms> b{};
        constexpr double two_pi = 2.0 * std::numbers::pi;
        for (int k = 1; k <= kEulerMaclaurinTerms; ++k) {
            const int e = 2 * k;
            double z;
            if (k == 1) z = std::numbers::pi * std::numbers::pi / 6.0;
            else if (k == 2) z = std::pow(std::numbers::pi, 4) / 90.0;
            else {
                z = 0.0;
                for (int n = 2000; n >= 1; --n) z += std::pow(static_cast<double>(n), -e);
            }
            const double mag = 2.0 * z / std::pow(two_pi, e);
            b[k - 1] = (k % 2 == 1) ? mag : -mag;
        }
        return b;
    }();
    return table;
}

// Taylor coefficients of Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
// about p = 1/2, from a 128-point Cauchy integral on the unit circle.
inline constexpr int kPsiTerms = 100;

inline const std::array<double, kPsiTerms>& psi_taylor() {
    static const auto table = [] {
        constexpr int M = 128;
        constexpr double pi = std::numbers::pi;
        std::array<double, kPsiTerms> c{};
        std::array<std::complex<double>, M> vals;
        for (int j = 0; j < M; ++j) {
            const std::complex<double> w = std::polar(1.0, 2.0 * pi * j / M);
            // with p = 1/2 + w: p^2 - p = w^2 - 1/4
            vals[j] = -std::cos(2.0 * pi * (w * w - 5.0 / 16.0)) / std::cos(2.0 * pi * w);
        }
        for (int k = 0; k < kPsiTerms; ++k) {
            std::complex<double> s = 0.0;
            for (int j = 0; j < M; ++j) s += vals[j] * std::polar(1.0, -2.0 * pi * j * k / M);
            c[k] = s.real() / M;
        }
        return c;
    }();
    return table;
}

// Psi^(m)(p) for m = 0..12 at w = p - 1/2.
inline std::array<double, 13> psi_derivatives(double w) {
    const auto& c = psi_taylor();
    std::array<double, 13> d{};
    for (int m = 0; m <= 12; ++m) {
        double acc = 0.0;
        for (int k = kPsiTerms - 1; k >= m; --k) {
            double f = 1.0;
            for (int i = 0; i < m; ++i) f *= static_cast<double>(k - i);
            acc = acc * w + c[k] * f;
        }
        d[m] = acc;
    }
    return d;
}

} // namespace detail

/// zeta(s) by Euler-Maclaurin summation; intended for 0 < Re s <= 4 and
/// moderate |Im s|. Cost grows linearly with |s|.
inline std::complex<double> zeta_em(std::complex<double> s) {
    using cd = std::complex<double>;
    const double as = std::abs(s);
    const auto N = static_cast<long>(std::ceil(as / std::numbers::pi)) + 20;
    cd sum = 0.0;
    for (long n = N - 1; n >= 1; --n) sum += std::exp(-s * std::log(static_cast<double>(n)));
    const double lN = std::log(static_cast<double>(N));
    const cd Ns = std::exp(-s * lN); // N^{-s}
    sum += static_cast<double>(N) * Ns / (s - 1.0) + 0.5 * Ns;
    // sum_k B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    const auto& b = detail::bernoulli_ratios();
    cd rising = s;             // s (s+1) ... (s+2k-2)
    cd power = Ns / static_cast<double>(N); // N^{-s-2k+1}
    const double invN2 = 1.0 / (static_cast<double>(N) * static_cast<double>(N));
    for (int k = 1; k <= detail::kEulerMaclaurinTerms; ++k) {
        sum += b[k - 1] * rising * power;
        rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
        power *= invN2;
    }
    return sum;
}

/// Z(t) by the Riemann-Siegel formula with corrections C0..C4.
inline double rs_Z_riemann_siegel(double t) {
    constexpr double pi = std::numbers::pi;
    const double tau = std::sqrt(t / (2.0 * pi));
    const auto N = static_cast<long>(std::floor(tau));
    const double p = tau - static_cast<double>(N);
    const double th = rs_theta(t);
    double main = 0.0;
    for (long n = N; n >= 1; --n) {
        const double dn = static_cast<double>(n);
        main += std::cos(th - t * std::log(dn)) / std::sqrt(dn);
    }
    main *= 2.0;
    const auto d = detail::psi_derivatives(p - 0.5);
    const double pi2 = pi * pi, pi4 = pi2 * pi2, pi6 = pi4 * pi2, pi8 = pi4 * pi4;
    const double c0 = d[0];
    const double c1 = -d[3] / (96.0 * pi2);
    const double c2 = d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4);
    const double c3 = -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5308416.0 * pi6);
    const double c4 = d[0] / (128.0 * pi2) + 19.0 * d[4] / (24576.0 * pi4) + 11.0 * d[8] / (5898240.0 * pi6) +
                      d[12] / (2038431744.0 * pi8);
    const double r = 1.0 / tau;
    const double corr = c0 + r * (c1 + r * (c2 + r * (c3 + r * c4)));
    const double sign = (N % 2 == 1) ? 1.0 : -1.0; // (-1)^{N-1}
    return main + sign * corr / std::sqrt(tau);
}

/// Z(t) through zeta(1/2 + it) e^{i theta(t)}.
inline double rs_Z_euler_maclaurin(double t) {
    const auto z = zeta_em({0.5, t});
    const double th = rs_theta(t);
    return (std::complex<double>(std::cos(th), std::sin(th)) * z).real();
}

/// Hardy's Z function for t >= 5.
inline double hardy_Z(double t) {
    return t < kRiemannSiegelThreshold ? rs_Z_euler_maclaurin(t) : rs_Z_riemann_siegel(t);
}

/// S(t) = arg zeta(1/2 + it) / pi by continuous variation from sigma = 4.
inline double rs_S(double t) {
    constexpr double pi = std::numbers::pi;
    double sigma = 4.0;
    auto prev = zeta_em({sigma, t});
    double arg = std::arg(prev); // Re zeta(4 + it) > 0
    double step = 0.25;
    int guard = 0;
    while (sigma > 0.5) {
        if (++guard > 200000) throw ComputationError("rs_S: argument tracking did not terminate");
        const double next_sigma = std::max(0.5, sigma - step);
        const auto z = zeta_em({next_sigma, t});
        const double d = std::arg(z / prev);
        if (std::fabs(d) > pi / 4.0 && step > 1e-9) {
            step *= 0.5;
            continue;
        }
        arg += d;
        prev = z;
        sigma = next_sigma;
        if (std::fabs(d) < pi / 16.0) step = std::min(0.25, step * 2.0);
    }
    return arg / pi;
}

/// Zero count N(t) = #{0 < gamma <= t}.
inline long zero_count_N(double t) {
    if (t < 14.0) return 0;
    return std::lround(rs_theta(t) / std::numbers::pi + 1.0 + rs_S(t));
}

/// |S(t)| <= 0.112 log t + 0.278 log log t + 2.51 for t >= e.
inline double S_bound(double t) {
    const double lt = std::log(std::max(t, std::numbers::e));
    return 0.112 * lt + 0.278 * std::log(lt) + 2.51;
}

/// Upper bound on the number of ordinates in any interval [u, u + 1].
inline double unit_count_bound(double u) {
    const double a = std::max(u, 10.0);
    return (rs_theta(a + 1.0) - rs_theta(a)) / std::numbers::pi + 2.0 * S_bound(a + 1.0) + 1.0;
}

} // namespace paircorr
