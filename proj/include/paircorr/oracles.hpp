#pragma once

/// @file oracles.hpp
/// @brief Slow, independent reference computations used only by the tests
/// and the acceptance checks. Nothing in the library proper includes this.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "paircorr/kernels.hpp"
#include "paircorr/summation.hpp"
#include "paircorr/zero_engine.hpp"

namespace paircorr::oracle {

/// Lambda(n) by trial division.
inline double trial_division_lambda(std::uint64_t n) {
    if (n < 2) return 0.0;
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            p = d;
            break;
        }
    if (p == 0) return std::log(static_cast<double>(n));
    std::uint64_t m = n;
    while (m % p == 0) m /= p;
    return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

/// psi(0..limit) from trial-division Lambda, summed in ascending n.
inline std::vector<double> naive_psi(std::uint64_t limit) {
    std::vector<double> out(limit + 1, 0.0);
    CompensatedSum s;
    for (std::uint64_t n = 1; n <= limit; ++n) {
        const double l = trial_division_lambda(n);
        if (l != 0.0) s.add(l);
        out[n] = s.value();
    }
    return out;
}

inline std::size_t prime_power_count(std::uint64_t limit) {
    std::size_t c = 0;
    for (std::uint64_t n = 2; n <= limit; ++n) c += trial_division_lambda(n) != 0.0;
    return c;
}

inline double psi_floor(const std::vector<double>& psi, double x) {
    return psi[static_cast<std::size_t>(std::floor(x))];
}

/// Midpoint Riemann sum of (psi(x+h) - psi(x) - h)^2 over [1, X].
inline double riemann_fixed_h(const std::vector<double>& psi, double X, double h, double step) {
    const auto n = static_cast<std::size_t>(std::ceil((X - 1.0) / step));
    if (n == 0) return 0.0;
    const double dx = (X - 1.0) / static_cast<double>(n);
    CompensatedSum s;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = 1.0 + (static_cast<double>(k) + 0.5) * dx;
        const double v = psi_floor(psi, x + h) - psi_floor(psi, x) - h;
        s.add(v * v);
    }
    return s.value() * dx;
}

/// Midpoint Riemann sum of (psi((1+delta)x) - psi(x) - delta x)^2 over [1, X].
inline double riemann_delta(const std::vector<double>& psi, double X, double delta, double step) {
    const auto n = static_cast<std::size_t>(std::ceil((X - 1.0) / step));
    if (n == 0) return 0.0;
    const double dx = (X - 1.0) / static_cast<double>(n);
    CompensatedSum s;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = 1.0 + (static_cast<double>(k) + 0.5) * dx;
        const double v = psi_floor(psi, (1.0 + delta) * x) - psi_floor(psi, x) - delta * x;
        s.add(v * v);
    }
    return s.value() * dx;
}

/// F(X,T) as the full double loop over ordered pairs.
inline double pair_correlation_direct(const ZeroList& zeros, double X, double T) {
    const auto& z = zeros.ordinates();
    const std::size_t n = zeros.count_upto(T);
    const double lx = std::log(X);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double u = z[i] - z[j];
            s += std::cos(u * lx) * 4.0 / (4.0 + u * u);
        }
    return s;
}

/// -sum_{|gamma| <= Z} a(rho) x^rho over both signs in complex arithmetic.
inline std::complex<double> zero_sum_complex(const ZeroList& zeros, double delta, double Z, double x) {
    std::complex<double> s = 0.0;
    for (double g : zeros.ordinates()) {
        if (g > Z) break;
        for (double sg : {1.0, -1.0}) {
            const std::complex<double> rho(0.5, sg * g);
            s += a_of_s(delta, rho) * std::exp(rho * std::log(x));
        }
    }
    return -s;
}

/// Central second difference of kernel_K.
inline double kernel_second_difference(const KernelParams& p, double x, double h = 1e-5) {
    return (kernel_K(p, x + h) - 2.0 * kernel_K(p, x) + kernel_K(p, x - h)) / (h * h);
}

} // namespace paircorr::oracle
