#pragma once

/// @file prime_core.hpp
/// @brief Von Mangoldt function, cumulative Chebyshev psi and prime-power
/// breakpoints via a segmented sieve of Eratosthenes.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "paircorr/errors.hpp"
#include "paircorr/parallel.hpp"
#include "paircorr/summation.hpp"

namespace paircorr {

/// Lambda(n): log p when n = p^k with p prime and k >= 1, else 0.
inline double von_mangoldt(std::uint64_t n) {
    if (n < 2) return 0.0;
    std::uint64_t p = 0;
    if (n % 2 == 0) {
        p = 2;
    } else {
        for (std::uint64_t d = 3; d * d <= n; d += 2) {
            if (n % d == 0) {
                p = d;
                break;
            }
        }
        if (p == 0) p = n;
    }
    std::uint64_t m = n;
    while (m % p == 0) m /= p;
    return m == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

struct SieveConfig {
    std::uint64_t segment_size = std::uint64_t{1} << 20;
    /// Upper bound on bytes held by the finished table.
    std::uint64_t memory_budget = std::uint64_t{4} << 30;
    Threads threads{};
};

/// Cumulative psi over the integers 0..limit together with the ascending
/// list of prime powers <= limit and their Lambda values.
/// Immutable once built; safe for concurrent reads.
class PsiTable {
public:
    std::uint64_t limit() const noexcept { return limit_; }

    /// psi(n) for integer 0 <= n <= limit.
    double psi_at(std::uint64_t n) const {
        detail::require_range(n <= limit_, "psi_at: n = " + std::to_string(n) +
                                               " exceeds table limit " + std::to_string(limit_));
        return cumulative_[n];
    }

    /// psi(x) = psi(floor(x)); psi is right-continuous with jumps at prime powers.
    double psi(double x) const {
        detail::require_range(x >= 0.0 && x <= static_cast<double>(limit_),
                              "psi: x = " + std::to_string(x) + " outside [0, " +
                                  std::to_string(limit_) + "]");
        return cumulative_[static_cast<std::uint64_t>(std::floor(x))];
    }

    /// Stored Lambda(n) (0 when n is not a prime power).
    double lambda(std::uint64_t n) const {
        detail::require_range(n <= limit_, "lambda: n exceeds table limit");
        const auto it = std::lower_bound(bp_n_.begin(), bp_n_.end(), n);
        if (it == bp_n_.end() || *it != n) return 0.0;
        return bp_lambda_[static_cast<std::size_t>(it - bp_n_.begin())];
    }

    /// Prime powers n with a < n <= b, ascending.
    std::vector<std::uint64_t> breakpoints_in(double a, double b) const {
        detail::require_range(0.0 <= a && a <= b && b <= static_cast<double>(limit_),
                              "breakpoints_in: need 0 <= a <= b <= limit");
        const auto first = std::upper_bound(bp_n_.begin(), bp_n_.end(), a,
                                            [](double v, std::uint64_t n) { return v < static_cast<double>(n); });
        const auto last = std::upper_bound(bp_n_.begin(), bp_n_.end(), b,
                                           [](double v, std::uint64_t n) { return v < static_cast<double>(n); });
        return {first, last};
    }

    const std::vector<std::uint64_t>& breakpoints() const noexcept { return bp_n_; }
    const std::vector<double>& breakpoint_lambdas() const noexcept { return bp_lambda_; }
    const std::vector<double>& cumulative() const noexcept { return cumulative_; }

    /// psi just after the k-th breakpoint (k counts breakpoints, so 0 -> 0).
    double psi_after_breakpoints(std::size_t k) const noexcept {
        return k == 0 ? 0.0 : cumulative_[bp_n_[k - 1]];
    }

    static std::uint64_t estimated_bytes(std::uint64_t limit) {
        const double l = static_cast<double>(limit);
        const double pp = l > 10.0 ? 1.3 * l / std::log(l) + 64.0 : 64.0;
        return (limit + 1) * sizeof(double) +
               static_cast<std::uint64_t>(pp) * (sizeof(std::uint64_t) + sizeof(double));
    }

    /// Assembles a table from breakpoints; the cumulative pass runs here.
    static PsiTable from_breakpoints(std::uint64_t limit, std::vector<std::uint64_t> n,
                                     std::vector<double> lambda) {
        PsiTable t;
        t.limit_ = limit;
        t.bp_n_ = std::move(n);
        t.bp_lambda_ = std::move(lambda);
        t.cumulative_.assign(limit + 1, 0.0);
        CompensatedSum acc;
        std::size_t k = 0;
        for (std::uint64_t m = 1; m <= limit; ++m) {
            if (k < t.bp_n_.size() && t.bp_n_[k] == m) acc.add(t.bp_lambda_[k++]);
            t.cumulative_[m] = acc.value();
        }
        return t;
    }

private:
    std::uint64_t limit_ = 0;
    std::vector<double> cumulative_;
    std::vector<std::uint64_t> bp_n_;
    std::vector<double> bp_lambda_;
};

namespace detail {

inline std::vector<std::uint32_t> small_primes(std::uint32_t bound) {
    std::vector<bool> composite(bound + 1, false);
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i <= bound; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = std::uint64_t{i} * i; j <= bound; j += i) composite[j] = true;
    }
    return primes;
}

struct SegmentOut {
    std::vector<std::uint64_t> n;
    std::vector<double> lambda;
};

} // namespace detail

/// Builds the psi table for 0..limit via a segmented sieve.
inline PsiTable build_psi_table(std::uint64_t limit, const SieveConfig& cfg = {}) {
    detail::require(limit >= 2, "build_psi_table: limit must be >= 2");
    detail::require(cfg.segment_size >= 64, "build_psi_table: segment_size must be >= 64");
    const auto need = PsiTable::estimated_bytes(limit);
    if (need > cfg.memory_budget)
        throw ResourceError("build_psi_table: limit " + std::to_string(limit) + " needs ~" +
                            std::to_string(need) + " bytes, exceeding memory budget of " +
                            std::to_string(cfg.memory_budget) + " bytes");

    auto root = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(limit)));
    while (std::uint64_t{root + 1} * (root + 1) <= limit) ++root;
    while (std::uint64_t{root} * root > limit) --root;
    const auto base = detail::small_primes(std::max<std::uint32_t>(root, 2));

    std::vector<double> base_log(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) base_log[i] = std::log(static_cast<double>(base[i]));

    // Higher powers p^k (k >= 2), ascending.
    std::vector<std::pair<std::uint64_t, double>> powers;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const std::uint64_t p = base[i];
        for (std::uint64_t q = p * p; q <= limit; q *= p) {
            powers.emplace_back(q, base_log[i]);
            if (q > limit / p) break;
        }
    }
    std::sort(powers.begin(), powers.end());

    const std::uint64_t seg = cfg.segment_size;
    const std::uint64_t segments = (limit + 1 + seg - 1) / seg;
    std::vector<detail::SegmentOut> outs(segments);

    parallel_blocks(segments, cfg.threads, [&](std::size_t s) {
        const std::uint64_t lo = s * seg;
        const std::uint64_t hi = std::min<std::uint64_t>(lo + seg, limit + 1);
        std::vector<char> composite(hi - lo, 0);
        for (std::uint32_t p : base) {
            const std::uint64_t pp = std::uint64_t{p} * p;
            if (pp >= hi) break;
            std::uint64_t start = std::max(pp, (lo + p - 1) / p * p);
            for (std::uint64_t j = start; j < hi; j += p) composite[j - lo] = 1;
        }
        auto pw = std::lower_bound(powers.begin(), powers.end(), std::pair<std::uint64_t, double>{lo, 0.0});
        auto& out = outs[s];
        std::size_t bi = 0;
        for (std::uint64_t m = std::max<std::uint64_t>(lo, 2); m < hi; ++m) {
            if (!composite[m - lo]) {
                out.n.push_back(m);
                // base primes reuse their precomputed log
                while (bi < base.size() && base[bi] < m) ++bi;
                if (bi < base.size() && base[bi] == m)
                    out.lambda.push_back(base_log[bi]);
                else
                    out.lambda.push_back(std::log(static_cast<double>(m)));
            } else if (pw != powers.end() && pw->first == m) {
                out.n.push_back(m);
                out.lambda.push_back(pw->second);
                ++pw;
            }
        }
    });

    std::size_t total = 0;
    for (const auto& o : outs) total += o.n.size();
    std::vector<std::uint64_t> n;
    std::vector<double> lambda;
    n.reserve(total);
    lambda.reserve(total);
    for (auto& o : outs) {
        n.insert(n.end(), o.n.begin(), o.n.end());
        lambda.insert(lambda.end(), o.lambda.begin(), o.lambda.end());
    }
    return PsiTable::from_breakpoints(limit, std::move(n), std::move(lambda));
}

// ---------------------------------------------------------------------------
// Binary cache: "PSIT", u32 version, u64 limit, then (u64 n, f64 Lambda)
// pairs, all little-endian. The cumulative array is rebuilt on load.

inline constexpr std::uint32_t kPsiCacheVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& os, T v) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    U u;
    std::memcpy(&u, &v, sizeof(T));
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
bool get_le(std::istream& is, T& v) {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) return false;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(buf[i]) << (8 * i);
    std::memcpy(&v, &u, sizeof(T));
    return true;
}

} // namespace detail

inline void write_psi_cache(const std::string& path, const PsiTable& table) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("write_psi_cache: cannot open " + path);
    os.write("PSIT", 4);
    detail::put_le(os, kPsiCacheVersion);
    detail::put_le(os, table.limit());
    const auto& n = table.breakpoints();
    const auto& l = table.breakpoint_lambdas();
    for (std::size_t i = 0; i < n.size(); ++i) {
        detail::put_le(os, n[i]);
        detail::put_le(os, l[i]);
    }
    if (!os) throw InputError("write_psi_cache: write failed for " + path);
}

inline PsiTable read_psi_cache(const std::string& path, const SieveConfig& cfg = {}) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("read_psi_cache: cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "PSIT", 4) != 0)
        throw ParseError(1, "bad psi cache magic in " + path);
    std::uint32_t version = 0;
    std::uint64_t limit = 0;
    if (!detail::get_le(is, version) || !detail::get_le(is, limit))
        throw ParseError(1, "truncated psi cache header in " + path);
    if (version != kPsiCacheVersion)
        throw ParseError(1, "unsupported psi cache version " + std::to_string(version));
    if (PsiTable::estimated_bytes(limit) > cfg.memory_budget)
        throw ResourceError("read_psi_cache: limit " + std::to_string(limit) +
                            " exceeds memory budget of " + std::to_string(cfg.memory_budget) + " bytes");
    std::vector<std::uint64_t> n;
    std::vector<double> lambda;
    std::uint64_t v = 0;
    double l = 0.0;
    std::size_t record = 0;
    while (detail::get_le(is, v)) {
        ++record;
        if (!detail::get_le(is, l)) throw ParseError(record, "truncated breakpoint record");
        if (v < 2 || v > limit || (!n.empty() && v <= n.back()) || !(l > 0.0))
            throw ParseError(record, "invalid breakpoint record n=" + std::to_string(v));
        n.push_back(v);
        lambda.push_back(l);
    }
    return PsiTable::from_breakpoints(limit, std::move(n), std::move(lambda));
}

} // namespace paircorr
