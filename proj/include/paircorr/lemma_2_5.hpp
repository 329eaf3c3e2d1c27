#pragma once

/// @file lemma_2_5.hpp
/// @brief Concrete check of the truncation lemma for the smoothed zero sum,
/// with c(gamma) = X^{i gamma}.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "paircorr/errors.hpp"
#include "paircorr/kernels.hpp"
#include "paircorr/lemmas.hpp"
#include "paircorr/quadrature.hpp"
#include "paircorr/report.hpp"
#include "paircorr/zero_engine.hpp"

namespace paircorr {

struct Lemma25Options {
    /// tolerance = constant * (delta^2 log(2/delta)^3 + log(Z)^3 / Z)
    double constant = 10.0;
    double window = 50.0;
    double quad_tolerance = 1e-7;
};

namespace detail {

// Bound on sum over all ordinates (both signs) of 1/(1 + (t - gamma)^2).
inline double lorentz_sum_bound(double t) {
    return unit_count_bound(t - 1.0) + unit_count_bound(t) + 2.0 * density_tail_bound(t, 1.0);
}

} // namespace detail

inline VerifierReport verify_lemma_2_5(const ZeroList& zeros, double delta, double Z, double X,
                                       const Lemma25Options& opt = {}) {
    using cd = std::complex<double>;
    detail::require(delta > 0.0 && delta < 1.0, "verify_lemma_2_5: need 0 < delta < 1");
    detail::require(Z >= 1.0 / delta, "verify_lemma_2_5: hypothesis Z >= 1/delta violated");
    detail::require(X >= 1.0, "verify_lemma_2_5: need X >= 1");
    const double L2d = std::log(2.0 / delta);
    const double budget = delta * delta * L2d * L2d * L2d + std::pow(std::log(Z), 3) / Z;
    const double tolerance = opt.constant * budget;
    if (zeros.empty()) {
        auto r = VerifierReport::make("lemma_2_5", 0.0, 0.0, 0.0, tolerance, "empty zero list; both sides vanish");
        r.extra["Z"] = Z;
        return r;
    }
    detail::require_range(zeros.t_max() >= Z + opt.window, "verify_lemma_2_5: need t_max >= Z + 50");

    const auto& z = zeros.ordinates();
    const double lx = std::log(X);
    std::vector<cd> c(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) c[i] = std::polar(1.0, z[i] * lx);
    const double W = opt.window;

    // left: 2 int_0^inf |a(it)|^2 |sum_gamma c / (1 + (t - gamma)^2)|^2 dt
    const double TL = zeros.t_max() - W;
    const double E = 2.0 * density_tail_bound(TL, W);
    const auto inner_all = [&](double t) {
        cd s = 0.0;
        auto lo = std::lower_bound(z.begin(), z.end(), t - W);
        for (auto it = lo; it != z.end() && *it <= t + W; ++it) {
            const double u = t - *it;
            s += c[static_cast<std::size_t>(it - z.begin())] / (1.0 + u * u);
        }
        for (std::size_t i = 0; i < z.size() && z[i] <= W - t; ++i) {
            const double u = t + z[i];
            s += std::conj(c[i]) / (1.0 + u * u);
        }
        return s;
    };
    const auto a2 = [&](double t) { return std::norm(a_of_s(delta, cd(0.0, t))); };
    auto left = quad::integrate_panelled([&](double t) { return a2(t) * std::norm(inner_all(t)); }, 0.0, TL, 0.5,
                                         opt.quad_tolerance);
    auto left_err = quad::integrate_panelled(
        [&](double t) { return a2(t) * (2.0 * std::abs(inner_all(t)) * E + E * E); }, 0.0, TL, 2.0, 1e-6);
    // beyond TL: |a(it)|^2 <= 4/t^2 and the inner sum obeys the density bound
    double far = 0.0;
    for (int m = 0; m < 60; ++m) {
        const double a = TL * std::ldexp(1.0, m), b = 2.0 * a;
        const double G = detail::lorentz_sum_bound(b);
        far += 4.0 * G * G * (1.0 / a - 1.0 / b);
    }
    const double left_value = 2.0 * left.value;
    const double left_bound = 2.0 * (left.error + left_err.value + far);

    // right: 2 int_0^inf |sum_{|gamma| <= Z} a(1/2 + i gamma) c / (1 + (t - gamma)^2)|^2 dt
    const std::size_t nz = zeros.count_upto(Z);
    std::vector<cd> ac(nz);
    double atot = 0.0;
    for (std::size_t i = 0; i < nz; ++i) {
        ac[i] = a_of_s(delta, cd(0.5, z[i])) * c[i];
        atot += 2.0 * std::abs(ac[i]);
    }
    const auto inner_z = [&](double t) {
        cd s = 0.0;
        for (std::size_t i = 0; i < nz; ++i) {
            const double u = t - z[i], v = t + z[i];
            s += ac[i] / (1.0 + u * u) + std::conj(ac[i]) / (1.0 + v * v);
        }
        return s;
    };
    const double TR = Z + 1000.0;
    auto right = quad::integrate_panelled([&](double t) { return std::norm(inner_z(t)); }, 0.0, TR, 0.5,
                                          opt.quad_tolerance);
    // |sum| <= atot / (t - Z)^2 past TR
    const double right_tail = atot * atot / (3.0 * std::pow(TR - Z, 3));
    const double right_value = 2.0 * right.value;
    const double right_bound = 2.0 * (right.error + right_tail);

    if (!left.converged || !right.converged)
        throw NumericError("verify_lemma_2_5: quadrature did not converge", left.error + right.error);

    const double diff = std::fabs(left_value - right_value);
    auto r = VerifierReport::make(
        "lemma_2_5", left_value, right_value, diff + left_bound + right_bound, tolerance,
        "delta=" + detail::fmt_g(delta) + ", Z=" + detail::fmt_g(Z) + ", X=" + detail::fmt_g(X) +
            ", c(gamma)=X^{i gamma}; both signs of gamma, t integrated over [0, " + detail::fmt_g(TL) +
            "] (left) and [0, " + detail::fmt_g(TR) + "] (right), doubled by evenness; |difference|=" +
            detail::fmt_g(diff) + ", certified tails " + detail::fmt_g(left_bound) + " + " +
            detail::fmt_g(right_bound) + " are added to abs_error; recorded constant " + detail::fmt_g(opt.constant));
    r.extra["Z"] = Z;
    r.extra["difference"] = diff;
    r.extra["left_tail_bound"] = left_bound;
    r.extra["right_tail_bound"] = right_bound;
    r.extra["budget"] = budget;
    return r;
}

} // namespace paircorr
