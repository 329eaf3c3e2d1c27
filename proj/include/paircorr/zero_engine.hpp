#pragma once

/// @file zero_engine.hpp
/// @brief Zeta-zero ordinates (import / Gram-block computation), the pair
/// correlation sum F(X,T), the integral J(X,T) and the local density check.
///
/// RH is assumed: a zero is stored as its ordinate gamma > 0, rho = 1/2 + i gamma.
/// Zeros are treated as simple.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "paircorr/constants.hpp"
#include "paircorr/errors.hpp"
#include "paircorr/parallel.hpp"
#include "paircorr/quadrature.hpp"
#include "paircorr/report.hpp"
#include "paircorr/riemann_siegel.hpp"
#include "paircorr/summation.hpp"

namespace paircorr {

enum class ZeroSource { imported, computed };

/// Ascending positive ordinates, complete up to t_max.
class ZeroList {
public:
    ZeroList() = default;
    ZeroList(std::vector<double> ordinates, ZeroSource source, double t_max)
        : ordinates_(std::move(ordinates)), source_(source), t_max_(t_max) {
        for (std::size_t i = 0; i < ordinates_.size(); ++i) {
            detail::require(ordinates_[i] > 0.0, "ZeroList: ordinates must be positive");
            detail::require(i == 0 || ordinates_[i] > ordinates_[i - 1], "ZeroList: ordinates must be ascending");
        }
        detail::require(ordinates_.empty() || ordinates_.back() <= t_max_, "ZeroList: ordinate above t_max");
    }

    const std::vector<double>& ordinates() const noexcept { return ordinates_; }
    ZeroSource source() const noexcept { return source_; }
    double t_max() const noexcept { return t_max_; }
    std::size_t size() const noexcept { return ordinates_.size(); }
    bool empty() const noexcept { return ordinates_.empty(); }

    /// Number of ordinates <= t.
    std::size_t count_upto(double t) const {
        return static_cast<std::size_t>(std::upper_bound(ordinates_.begin(), ordinates_.end(), t) -
                                        ordinates_.begin());
    }

    /// Maximum number of ordinates <= T in a closed interval of length 1.
    std::size_t max_unit_count(double T) const {
        const std::size_t n = count_upto(T);
        std::size_t best = 0, j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (ordinates_[j] < ordinates_[i] - 1.0) ++j;
            best = std::max(best, i - j + 1);
        }
        return best;
    }

private:
    std::vector<double> ordinates_;
    ZeroSource source_ = ZeroSource::imported;
    double t_max_ = 0.0;
};

// ---------------------------------------------------------------------------
// file format: one ordinate per line, '#' comments, ascending. A comment
// containing "complete to t_max=H" sets the list height to H.

inline ZeroList parse_zeros(std::istream& in) {
    std::vector<double> z;
    std::string line;
    std::size_t lineno = 0;
    double certified = 0.0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view v(line);
        while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
        while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
        if (!v.empty() && v.front() == '#') {
            // header written by write_zeros
            const auto k = v.find("complete to t_max=");
            if (k != std::string_view::npos) {
                const auto num = v.substr(k + 18);
                double h = 0.0;
                const auto [p, e] = std::from_chars(num.data(), num.data() + num.size(), h);
                if (e != std::errc() || p != num.data() + num.size() || !(h > 0.0))
                    throw ParseError(lineno, "bad t_max in header");
                certified = h;
            }
            continue;
        }
        if (v.empty()) continue;
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size())
            throw ParseError(lineno, "not a decimal ordinate: '" + std::string(v) + "'");
        if (!(x > 0.0) || !std::isfinite(x)) throw ParseError(lineno, "ordinate must be positive");
        if (!z.empty() && !(x > z.back())) throw ParseError(lineno, "ordinates must be strictly ascending");
        z.push_back(x);
    }
    if (z.empty()) throw InputError("zero file contains no ordinates");
    const double t_max = std::max(z.back(), certified);
    return ZeroList(std::move(z), ZeroSource::imported, t_max);
}

inline ZeroList import_zeros(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open zero file '" + path + "'");
    return parse_zeros(in);
}

inline void write_zeros(const ZeroList& zeros, std::ostream& out) {
    out << "# zeta zero ordinates, complete to t_max=";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10f", zeros.t_max());
    out << buf << '\n';
    for (double g : zeros.ordinates()) {
        std::snprintf(buf, sizeof buf, "%.10f", g);
        out << buf << '\n';
    }
}

inline void export_zeros(const ZeroList& zeros, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write zero file '" + path + "'");
    write_zeros(zeros, out);
}

// ---------------------------------------------------------------------------
// computation

struct ZeroSearchConfig {
    unsigned initial_subdivision = 2;
    unsigned refine_factor = 8;
    unsigned refine_rounds = 4;
    double tolerance = 1e-10;
    Threads threads{};
};

namespace detail {

/// g with theta(g) = n pi, Newton from a start on the increasing branch.
inline double gram_point(long n, double start) {
    double g = std::max(start, 7.0);
    const double target = static_cast<double>(n) * std::numbers::pi;
    for (int it = 0; it < 100; ++it) {
        const double step = (rs_theta(g) - target) / rs_theta_prime(g);
        g -= step;
        if (std::fabs(step) < 1e-13 * g) break;
    }
    return g;
}

/// Root of Z in [a, b] with sign(Z(a)) != sign(Z(b)), Illinois false position.
inline double refine_root(double a, double b, double fa, double fb, double tol) {
    int side = 0;
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        double c = (a * fb - b * fa) / (fb - fa);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        // guard against stagnation at a tiny bracket end
        if (it % 8 == 7) c = 0.5 * (a + b);
        const double fc = hardy_Z(c);
        if (fc == 0.0) return c;
        if ((fc > 0) == (fb > 0)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (a + b);
}

struct GramBlock {
    long j, k;          // good Gram indices bounding the block
    double lo, hi;      // g_j, g_k
    std::vector<double> inner; // g_{j+1} .. g_{k-1}
};

inline std::vector<double> block_zeros(const GramBlock& blk, const ZeroSearchConfig& cfg) {
    const long expected = blk.k - blk.j;
    std::vector<double> knots{blk.lo};
    knots.insert(knots.end(), blk.inner.begin(), blk.inner.end());
    knots.push_back(blk.hi);
    unsigned sub = cfg.initial_subdivision;
    for (unsigned round = 0; round <= cfg.refine_rounds; ++round, sub *= cfg.refine_factor) {
        std::vector<double> ts, zs;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i)
            for (unsigned s = 0; s < sub; ++s)
                ts.push_back(knots[i] + (knots[i + 1] - knots[i]) * s / sub);
        ts.push_back(blk.hi);
        zs.reserve(ts.size());
        for (double t : ts) zs.push_back(hardy_Z(t));
        std::vector<std::size_t> brackets;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i)
            if ((zs[i] > 0) != (zs[i + 1] > 0)) brackets.push_back(i);
        if (static_cast<long>(brackets.size()) >= expected) {
            std::vector<double> out;
            out.reserve(brackets.size());
            for (auto i : brackets) out.push_back(refine_root(ts[i], ts[i + 1], zs[i], zs[i + 1], cfg.tolerance));
            return out;
        }
    }
    std::ostringstream os;
    os.precision(12);
    os << "compute_zeros: Gram block [g_" << blk.j << ", g_" << blk.k << "] = [" << blk.lo << ", " << blk.hi
       << "] expected " << expected << " sign changes, refinement exhausted";
    throw ComputationError(os.str());
}

} // namespace detail

/// All ordinates in (0, t_max], 10 <= t_max <= 1e5, certified against N(t_max).
inline ZeroList compute_zeros(double t_max, const ZeroSearchConfig& cfg = {}) {
    detail::require(t_max >= 10.0 && t_max <= 1e5, "compute_zeros: need 10 <= t_max <= 1e5");
    // Gram points from g_{-1} until a good one lies beyond t_max
    std::vector<double> g;
    std::vector<bool> good;
    long n = -1;
    double start = 10.0;
    while (true) {
        const double gn = detail::gram_point(n, start);
        const double z = hardy_Z(gn);
        const bool is_good = ((n % 2 == 0) ? z : -z) > 0;
        g.push_back(gn);
        good.push_back(is_good);
        if (gn > t_max && is_good) break;
        start = gn + std::numbers::pi / rs_theta_prime(gn);
        ++n;
    }
    if (!good.front()) throw ComputationError("compute_zeros: g_-1 is not a good Gram point");

    std::vector<detail::GramBlock> blocks;
    for (std::size_t a = 0; a + 1 < g.size();) {
        std::size_t b = a + 1;
        while (!good[b]) ++b;
        detail::GramBlock blk{static_cast<long>(a) - 1, static_cast<long>(b) - 1, g[a], g[b], {}};
        for (std::size_t i = a + 1; i < b; ++i) blk.inner.push_back(g[i]);
        blocks.push_back(std::move(blk));
        a = b;
    }

    std::vector<std::vector<double>> found(blocks.size());
    parallel_blocks(blocks.size(), cfg.threads, [&](std::size_t i) { found[i] = detail::block_zeros(blocks[i], cfg); });

    std::vector<double> zeros;
    for (const auto& f : found)
        for (double z : f)
            if (z <= t_max) zeros.push_back(z);
    std::sort(zeros.begin(), zeros.end());

    const long expected = zero_count_N(t_max);
    if (static_cast<long>(zeros.size()) != expected) {
        std::ostringstream os;
        os << "compute_zeros: found " << zeros.size() << " ordinates up to " << t_max << " but N(t) = " << expected;
        throw ComputationError(os.str());
    }
    return ZeroList(std::move(zeros), ZeroSource::computed, t_max);
}

// ---------------------------------------------------------------------------
// density bounds beyond the list

/// Bound on sum_{gamma - t > d} 1/(1 + (gamma - t)^2) over all zeros with
/// t <= T, from the unit-interval count bound.
inline double density_tail_bound(double T, double d) {
    CompensatedSum s;
    const long K = 20000;
    for (long k = 0; k < K; ++k) {
        const double v = d + static_cast<double>(k);
        s.add(unit_count_bound(T + v + 1.0) / (1.0 + v * v));
    }
    // unit_count_bound(u) <= 0.6 log u + 7.5; (v - 1) >= v/2 for v >= 2
    const double V = d + static_cast<double>(K);
    const double l = std::log(2.0 * (T + V));
    s.add(4.0 * (0.6 * (l + 1.0) + 7.5) / V);
    return s.value();
}

// ---------------------------------------------------------------------------
// F(X, T)

struct PairCorrelationConfig {
    double weight_cutoff = 2000.0;
    std::size_t block_size = 256;
    Threads threads{};
};

struct PairCorrelationResult {
    double value = 0.0;
    double tail_bound = 0.0;
    std::size_t zeros_used = 0;
    std::size_t max_unit_count = 0;
};

inline double montgomery_weight(double u) { return 4.0 / (4.0 + u * u); }

/// F(X,T) = sum_{0 < gamma, gamma' <= T} X^{i(gamma - gamma')} w(gamma - gamma').
inline PairCorrelationResult pair_correlation_F(const ZeroList& zeros, double X, double T,
                                                const PairCorrelationConfig& cfg = {}) {
    detail::require(X >= 1.0, "pair_correlation_F: need X >= 1");
    detail::require(T > 0.0, "pair_correlation_F: need T > 0");
    detail::require_range(T <= zeros.t_max(), "pair_correlation_F: T exceeds the height of the zero list");
    detail::require(cfg.weight_cutoff > 0.0 && cfg.block_size > 0, "pair_correlation_F: bad config");
    const auto& z = zeros.ordinates();
    const std::size_t n = zeros.count_upto(T);
    PairCorrelationResult res;
    res.zeros_used = n;
    if (n == 0) return res;
    const double lx = std::log(X);
    const double c = cfg.weight_cutoff;
    const std::size_t nb = (n + cfg.block_size - 1) / cfg.block_size;
    std::vector<double> partial(nb, 0.0);
    parallel_blocks(nb, cfg.threads, [&](std::size_t b) {
        CompensatedSum s;
        const std::size_t i0 = b * cfg.block_size, i1 = std::min(n, i0 + cfg.block_size);
        for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double u = z[j] - z[i];
                if (u > c) break;
                s.add(std::cos(u * lx) * montgomery_weight(u));
            }
        partial[b] = s.value();
    });
    CompensatedSum total(static_cast<double>(n));
    for (double p : partial) total.add(2.0 * p);
    res.value = total.value();

    res.max_unit_count = zeros.max_unit_count(T);
    const double nmax = static_cast<double>(res.max_unit_count);
    CompensatedSum tail;
    for (std::size_t i = 0; i < n; ++i) {
        const double L = T - z[i];
        if (L > c) tail.add(4.0 * nmax * (1.0 / (c * c) + 1.0 / c - 1.0 / L));
    }
    res.tail_bound = 2.0 * tail.value();
    return res;
}

// ---------------------------------------------------------------------------
// J(X, T)

struct JResult {
    double value = 0.0;
    double error_bound = 0.0; ///< inner-sum truncation; Simpson error not included
    double window = 50.0;
    double step = 0.01;
};

/// J(X,T) = 4 int_0^T |sum_gamma X^{i gamma} / (1 + (t - gamma)^2)|^2 dt,
/// sum over both signs of gamma, truncated to |t - gamma| <= window.
inline JResult compute_J(const ZeroList& zeros, double X, double T, double quad_step = 0.01,
                         double window = 50.0, const Threads& threads = {}) {
    detail::require(X >= 1.0 && T > 0.0 && quad_step > 0.0 && window > 0.0, "compute_J: bad arguments");
    detail::require_range(T <= zeros.t_max() - window, "compute_J: need T <= t_max - window");
    JResult res;
    res.window = window;
    res.step = quad_step;
    if (zeros.empty()) return res;
    const auto& z = zeros.ordinates();
    const double lx = std::log(X);
    std::size_t intervals = static_cast<std::size_t>(std::ceil(T / quad_step));
    if (intervals % 2) ++intervals;
    const double h = T / static_cast<double>(intervals);
    const double E = 2.0 * density_tail_bound(T, window);

    // values at nodes, computed in fixed blocks
    const std::size_t nodes = intervals + 1;
    std::vector<double> sq(nodes), abs_s(nodes);
    const std::size_t bs = 1024, nb = (nodes + bs - 1) / bs;
    parallel_blocks(nb, threads, [&](std::size_t b) {
        for (std::size_t k = b * bs; k < std::min(nodes, (b + 1) * bs); ++k) {
            const double t = h * static_cast<double>(k);
            double re = 0.0, im = 0.0;
            auto lo = std::lower_bound(z.begin(), z.end(), t - window);
            for (auto it = lo; it != z.end() && *it <= t + window; ++it) {
                const double w = 1.0 / (1.0 + (t - *it) * (t - *it));
                re += std::cos(*it * lx) * w;
                im += std::sin(*it * lx) * w;
            }
            // negative ordinates -gamma with gamma <= window - t
            for (auto it = z.begin(); it != z.end() && *it <= window - t; ++it) {
                const double w = 1.0 / (1.0 + (t + *it) * (t + *it));
                re += std::cos(*it * lx) * w;
                im -= std::sin(*it * lx) * w;
            }
            sq[k] = re * re + im * im;
            abs_s[k] = std::sqrt(sq[k]);
        }
    });
    CompensatedSum s, e;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double wgt = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        s.add(wgt * sq[k]);
        e.add(wgt * (2.0 * abs_s[k] * E + E * E));
    }
    res.value = 4.0 * s.value() * h / 3.0;
    res.error_bound = 4.0 * e.value() * h / 3.0;
    return res;
}

// ---------------------------------------------------------------------------
// Lemma 2.6 density check

inline VerifierReport verify_zero_density(const ZeroList& zeros, std::span<const double> t_samples,
                                          double constant = 2.0) {
    detail::require(!t_samples.empty(), "verify_zero_density: no sample points");
    const auto& z = zeros.ordinates();
    double worst = 0.0, at = 0.0, worst_tail = 0.0;
    for (double t : t_samples) {
        detail::require(t >= 0.0, "verify_zero_density: need t >= 0");
        detail::require_range(zeros.empty() || t <= zeros.t_max() - 50.0,
                              "verify_zero_density: need t <= t_max - 50");
        CompensatedSum s;
        for (double g : z) {
            s.add(1.0 / (1.0 + (t - g) * (t - g)));
            s.add(1.0 / (1.0 + (t + g) * (t + g)));
        }
        const double lt = std::log(t + 2.0);
        const double ratio = s.value() / lt;
        const double tail = zeros.empty() ? 0.0 : density_tail_bound(t, zeros.t_max() - t) / lt;
        if (ratio > worst || (worst == 0.0 && at == 0.0)) {
            worst = ratio;
            at = t;
            worst_tail = tail;
        }
    }
    auto r = VerifierReport::make("lemma_2_6_density", worst, constant, worst, constant,
                                  "max over " + std::to_string(t_samples.size()) +
                                      " samples of sum_gamma 1/(1+(t-gamma)^2) / log(t+2), both signs; attained at t=" +
                                      std::to_string(at) + "; zeros above the list add at most " +
                                      std::to_string(worst_tail) + " to the ratio; recorded constant " +
                                      std::to_string(constant));
    r.extra["argmax_t"] = at;
    r.extra["tail_bound"] = worst_tail;
    return r;
}

// ---------------------------------------------------------------------------
// asymptotic diagnostics

/// Theorem form when X <= T, refined-conjecture form when X > T.
inline double F_prediction(double X, double T) {
    constexpr double pi = std::numbers::pi;
    if (X <= T) return T / (2.0 * pi) * std::log(X) + T * std::log(T) * std::log(T) / (2.0 * pi * X * X);
    return T / (2.0 * pi) * std::log(T) + constants().D * T / (2.0 * pi);
}

inline VerifierReport compare_F_asymptotics(const ZeroList& zeros, double X, double T,
                                            double tolerance = 0.3, const PairCorrelationConfig& cfg = {}) {
    const auto F = pair_correlation_F(zeros, X, T, cfg);
    const double pred = F_prediction(X, T);
    std::string form = X <= T ? "theorem form (T/2pi) log X + T (log T)^2 / (2 pi X^2)"
                              : "refined form (T/2pi) log T + D T / (2 pi)";
    if (F.zeros_used == 0) {
        auto r = VerifierReport::make("F_asymptotics", 0.0, pred, 0.0, tolerance, form + "; empty spectrum");
        r.hypothesis_ok = false;
        r.extra["ratio"] = 0.0;
        r.extra["zeros_used"] = 0.0;
        return r;
    }
    const double ratio = F.value / pred;
    auto r = VerifierReport::make("F_asymptotics", F.value, pred, std::fabs(ratio - 1.0), tolerance,
                                  form + "; abs_error is |F/prediction - 1|; " + std::to_string(F.zeros_used) +
                                      " zeros, tail bound " + std::to_string(F.tail_bound));
    r.extra["ratio"] = ratio;
    r.extra["X"] = X;
    r.extra["T"] = T;
    r.extra["zeros_used"] = static_cast<double>(F.zeros_used);
    r.extra["tail_bound"] = F.tail_bound;
    return r;
}

} // namespace paircorr
