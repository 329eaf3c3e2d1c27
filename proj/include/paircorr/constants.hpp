#pragma once

#include <numbers>

namespace paircorr {

/// Second-main-term constants of the short-interval moments and of the
/// pair-correlation sum.
struct Constants {
    double euler_c0;
    /// fixed-window moment: hX log(X/h) + B hX
    double B;
    /// proportional-window moment: (1/2) delta X^2 log(1/delta) + C delta X^2
    double C;
    /// pair correlation: (T/2pi) log T + (D/2pi) T
    double D;
    /// sinc^2-smoothed zero sum: (pi/2) k log(1/k) + pi C' k
    double C_prime;
};

inline constexpr Constants constants() noexcept {
    constexpr double c0 = std::numbers::egamma;
    constexpr double log2pi = 1.8378770664093454835606594728112; // log(2 pi)
    constexpr double B = -c0 - log2pi;
    constexpr double D = -log2pi - 1.0;
    return Constants{
        .euler_c0 = c0,
        .B = B,
        .C = (1.0 + B) / 2.0,
        .D = D,
        .C_prime = D / 2.0 - (c0 + std::numbers::ln2) / 2.0 + 1.0,
    };
}

/// Constant of the delta-averaged proportional moment: K = 3/8 + B/4.
inline constexpr double averaged_moment_K() noexcept { return 3.0 / 8.0 + constants().B / 4.0; }

} // namespace paircorr
