#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "paircorr/oracles.hpp"
#include "paircorr/prime_core.hpp"

using namespace paircorr;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("paircorr_test_" + name);
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

} // namespace

TEST(VonMangoldt, SmallValues) {
    EXPECT_EQ(von_mangoldt(0), 0.0);
    EXPECT_EQ(von_mangoldt(1), 0.0);
    EXPECT_EQ(von_mangoldt(6), 0.0);
    EXPECT_DOUBLE_EQ(von_mangoldt(8), 0.6931471805599453);
    EXPECT_DOUBLE_EQ(von_mangoldt(2), std::log(2.0));
    EXPECT_DOUBLE_EQ(von_mangoldt(49), std::log(7.0));
    EXPECT_EQ(von_mangoldt(91), 0.0);
}

TEST(VonMangoldt, MatchesTrialDivision) {
    for (std::uint64_t n = 0; n <= 20000; ++n)
        ASSERT_TRUE(same_bits(von_mangoldt(n), oracle::trial_division_lambda(n))) << n;
    // large prime and prime power
    EXPECT_DOUBLE_EQ(von_mangoldt(1'000'003), std::log(1'000'003.0));
    EXPECT_DOUBLE_EQ(von_mangoldt(std::uint64_t{1} << 40), std::log(2.0));
}

TEST(PsiTable, TinyLimits) {
    const auto t2 = build_psi_table(2);
    EXPECT_DOUBLE_EQ(t2.psi_at(2), std::log(2.0));
    EXPECT_EQ(t2.psi_at(1), 0.0);

    const auto t10 = build_psi_table(10);
    const double expected = 3.0 * std::log(2.0) + 2.0 * std::log(3.0) + std::log(5.0) + std::log(7.0);
    EXPECT_NEAR(t10.psi_at(10), expected, 1e-12);
    EXPECT_NEAR(t10.psi_at(10), 7.8320141805, 1e-9);
}

TEST(PsiTable, RejectsTinyLimit) { EXPECT_THROW(build_psi_table(1), InputError); }

TEST(PsiTable, BitIdenticalToNaiveSummation) {
    SieveConfig cfg;
    cfg.segment_size = 4096; // many segments
    const std::uint64_t limit = 300'000;
    const auto table = build_psi_table(limit, cfg);
    const auto naive = oracle::naive_psi(limit);
    for (std::uint64_t n = 0; n <= limit; ++n) ASSERT_TRUE(same_bits(table.psi_at(n), naive[n])) << n;
}

TEST(PsiTable, BreakpointsAreThePrimePowers) {
    const std::uint64_t limit = 50'000;
    const auto table = build_psi_table(limit);
    EXPECT_EQ(table.breakpoints().size(), oracle::prime_power_count(limit));
    for (std::size_t k = 0; k < table.breakpoints().size(); ++k) {
        const auto n = table.breakpoints()[k];
        ASSERT_TRUE(same_bits(table.breakpoint_lambdas()[k], oracle::trial_division_lambda(n))) << n;
    }
}

TEST(PsiTable, IncrementsAreLambdaUpToRounding) {
    const auto table = build_psi_table(100'000);
    for (std::uint64_t n = 2; n <= 100'000; ++n) {
        const double d = table.psi_at(n) - table.psi_at(n - 1);
        const double l = von_mangoldt(n);
        // psi(n) ~ n, so one rounding of the running sum is ~ n * 2^-52
        ASSERT_NEAR(d, l, 4.0 * std::ldexp(static_cast<double>(n), -52)) << n;
        ASSERT_EQ(table.lambda(n), l) << n;
    }
}

TEST(PsiTable, DeterministicAcrossThreadsAndSegments) {
    SieveConfig a, b;
    a.threads = Threads(1);
    a.segment_size = 1 << 20;
    b.threads = Threads(4);
    b.segment_size = 1000;
    const auto ta = build_psi_table(200'000, a);
    const auto tb = build_psi_table(200'000, b);
    ASSERT_EQ(ta.breakpoints(), tb.breakpoints());
    for (std::uint64_t n = 0; n <= 200'000; ++n) ASSERT_TRUE(same_bits(ta.psi_at(n), tb.psi_at(n)));
}

TEST(PsiTable, MemoryBudget) {
    SieveConfig cfg;
    cfg.memory_budget = 1000;
    try {
        build_psi_table(1'000'000, cfg);
        FAIL() << "expected ResourceError";
    } catch (const ResourceError& e) {
        EXPECT_NE(std::string(e.what()).find("1000 bytes"), std::string::npos) << e.what();
    }
}

TEST(PsiEvaluate, RealArguments) {
    const auto t = build_psi_table(100);
    EXPECT_EQ(t.psi(1.9), 0.0);
    EXPECT_DOUBLE_EQ(t.psi(2.0), std::log(2.0));
    EXPECT_NEAR(t.psi(10.5), 7.8320141805, 1e-9);
    EXPECT_EQ(t.psi(10.5), t.psi_at(10));
    EXPECT_EQ(t.psi(0.0), 0.0);
    EXPECT_THROW(t.psi(100.5), RangeError);
    EXPECT_THROW(t.psi(-1.0), RangeError);
    EXPECT_THROW(t.psi_at(101), RangeError);
}

TEST(BreakpointsIn, Examples) {
    const auto t = build_psi_table(100);
    EXPECT_EQ(t.breakpoints_in(1, 10), (std::vector<std::uint64_t>{2, 3, 4, 5, 7, 8, 9}));
    EXPECT_EQ(t.breakpoints_in(24, 25), (std::vector<std::uint64_t>{25}));
    EXPECT_TRUE(t.breakpoints_in(89, 96).empty());
    EXPECT_TRUE(t.breakpoints_in(33, 35).empty());
    EXPECT_EQ(t.breakpoints_in(88.5, 89.0), (std::vector<std::uint64_t>{89}));
    EXPECT_THROW(t.breakpoints_in(10, 5), RangeError);
    EXPECT_THROW(t.breakpoints_in(0, 101), RangeError);
}

TEST(PsiCache, RoundTrip) {
    const auto t = build_psi_table(50'000);
    const auto path = temp_path("cache_roundtrip.bin");
    write_psi_cache(path.string(), t);
    const auto u = read_psi_cache(path.string());
    EXPECT_EQ(u.limit(), t.limit());
    EXPECT_EQ(u.breakpoints(), t.breakpoints());
    for (std::uint64_t n = 0; n <= t.limit(); ++n) ASSERT_TRUE(same_bits(u.psi_at(n), t.psi_at(n)));
    std::filesystem::remove(path);
}

TEST(PsiCache, Errors) {
    EXPECT_THROW(read_psi_cache(temp_path("does_not_exist.bin").string()), InputError);

    const auto bad = temp_path("cache_bad.bin");
    {
        std::ofstream os(bad, std::ios::binary);
        os << "NOPE1234";
    }
    EXPECT_THROW(read_psi_cache(bad.string()), ParseError);

    const auto t = build_psi_table(1000);
    write_psi_cache(bad.string(), t);
    std::filesystem::resize_file(bad, std::filesystem::file_size(bad) - 3);
    EXPECT_THROW(read_psi_cache(bad.string()), ParseError);

    SieveConfig tiny;
    tiny.memory_budget = 16;
    write_psi_cache(bad.string(), t);
    EXPECT_THROW(read_psi_cache(bad.string(), tiny), ResourceError);
    std::filesystem::remove(bad);
}
