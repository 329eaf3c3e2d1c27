#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "paircorr/explicit_formula.hpp"
#include "paircorr/oracles.hpp"

using namespace paircorr;

namespace {

const ZeroList& zeros_to(double h) {
    static const ZeroList z1000 = compute_zeros(1000.0);
    static const ZeroList z10000 = compute_zeros(10000.0);
    return h <= 1000.0 ? z1000 : z10000;
}

const PsiTable& table() {
    static const PsiTable t = build_psi_table(30'000);
    return t;
}

// fraction of 50 sample points where the zero sum is within 25% of the truth
double pointwise_hit_rate(double Z) {
    const ZeroSum S(zeros_to(Z), ZeroSumConfig(Z, 0.01));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e4, 2e4);
    int hits = 0, n = 0;
    while (n < 50) {
        const double x = u(rng), y = 1.01 * x;
        if (std::fabs(x - std::round(x)) < 0.1 || std::fabs(y - std::round(y)) < 0.1) continue;
        ++n;
        const double truth = table().psi(y) - table().psi(x) - 0.01 * x;
        if (std::fabs(S(x) - truth) <= 0.25 * std::fabs(truth)) ++hits;
    }
    return hits / 50.0;
}

} // namespace

TEST(ZeroSumConfig, Validation) {
    EXPECT_THROW(ZeroSumConfig(0.0, 0.1), InputError);
    EXPECT_THROW(ZeroSumConfig(10.0, 0.0), InputError);
    EXPECT_THROW(ZeroSumConfig(10.0, 1.0), InputError);
    EXPECT_NEAR(ZeroSumConfig::recommended_Z(100.0), 100.0 * std::pow(std::log(100.0), 2), 1e-9);
    EXPECT_EQ(ZeroSumConfig::default_Z(5000.0, zeros_to(1000)), zeros_to(1000).t_max());
    EXPECT_EQ(ZeroSumConfig::default_Z(500.0, zeros_to(1000)), 500.0);
}

TEST(ZeroSum, EmptyList) {
    const ZeroList none({}, ZeroSource::imported, 50.0);
    EXPECT_EQ(zero_sum_increment(none, ZeroSumConfig(50.0, 0.1), 1234.5), 0.0);
}

TEST(ZeroSum, SingleOrdinate) {
    const double g = 14.134725141734695, x = 777.7, d = 0.03;
    const ZeroList one({g}, ZeroSource::imported, 20.0);
    const auto a = a_of_s(d, {0.5, g});
    const double expected = -2.0 * std::sqrt(x) * (a * std::exp(std::complex<double>(0.0, g * std::log(x)))).real();
    EXPECT_NEAR(zero_sum_increment(one, ZeroSumConfig(20.0, d), x), expected, 1e-13 * std::fabs(expected) + 1e-15);
}

TEST(ZeroSum, MatchesComplexDoubleLoop) {
    const auto& z = zeros_to(1000);
    for (double x : {100.5, 2345.6, 12345.25}) {
        const double r = zero_sum_increment(z, ZeroSumConfig(1000.0, 0.02), x);
        const auto c = oracle::zero_sum_complex(z, 0.02, 1000.0, x);
        EXPECT_NEAR(r, c.real(), 1e-10 * std::fabs(c.real())) << x;
        EXPECT_LT(std::fabs(c.imag()), 1e-8 * std::fabs(c.real())) << x;
    }
}

TEST(ZeroSum, RangeAndInputErrors) {
    const auto& z = zeros_to(1000);
    EXPECT_THROW(zero_sum_increment(z, ZeroSumConfig(1001.0, 0.1), 100.0), RangeError);
    EXPECT_THROW(zero_sum_increment(z, ZeroSumConfig(100.0, 0.1), 1.5), InputError);
}

TEST(ZeroSum, AdditiveInZ) {
    const auto& z = zeros_to(1000);
    const double x = 5000.5, d = 0.05, lx = std::log(x);
    const ZeroSum lo(z, ZeroSumConfig(500.0, d)), hi(z, ZeroSumConfig(1000.0, d));
    EXPECT_EQ(lo.size(), 269u);
    EXPECT_EQ(hi.size(), 649u);
    double added = 0.0;
    for (double g : z.ordinates())
        if (g > 500.0 && g <= 1000.0) {
            const auto a = a_of_s(d, {0.5, g});
            added += -2.0 * std::sqrt(x) * (a.real() * std::cos(g * lx) - a.imag() * std::sin(g * lx));
        }
    EXPECT_NEAR(hi(x) - lo(x), added, 1e-11 * std::sqrt(x));
}

TEST(ZeroSum, PointwiseDiagnostic) {
    // Z=1e3 is short of the majority; the rate improves with Z
    const double r3 = pointwise_hit_rate(1000.0);
    const double r4 = pointwise_hit_rate(10000.0);
    RecordProperty("hit_rate_Z1000", std::to_string(r3));
    RecordProperty("hit_rate_Z10000", std::to_string(r4));
    EXPECT_GT(r4, r3);
    EXPECT_GT(r4, 0.5);
}

TEST(Lemma27, DeskScaleRun) {
    const auto r = verify_lemma_2_7(table(), zeros_to(1000), 1000.0, 0.05, 1000.0);
    EXPECT_TRUE(r.pass) << r.abs_error << " vs " << r.tolerance;
    EXPECT_EQ(r.name, "lemma_2_7");
    EXPECT_GT(r.computed, 0.0);
    ASSERT_TRUE(r.extra.count("Z_used"));
    ASSERT_TRUE(r.extra.count("Z_recommended"));
    EXPECT_EQ(r.extra.at("Z_used"), 1000.0);
    EXPECT_NEAR(r.extra.at("Z_recommended"), 1000.0 * std::pow(std::log(1000.0), 2), 1e-6);
    EXPECT_LE(r.extra.at("resolution"), 1e-3);
    EXPECT_NEAR(r.predicted, integrate_delta(table(), 0.05, 1000.0, 2000.0), 1e-9 * r.predicted);
    const auto j = to_json(r);
    EXPECT_TRUE(is_valid_report_json(j));
    EXPECT_TRUE(j.contains("Z_used"));
}

TEST(Lemma27, NoZerosGivesZeroSumSide) {
    const ZeroList none({}, ZeroSource::imported, 200.0);
    const auto r = verify_lemma_2_7(table(), none, 100.0, 0.1, 200.0);
    EXPECT_EQ(r.computed, 0.0);
    EXPECT_GT(r.predicted, 0.0);
}

TEST(Lemma27, Errors) {
    const auto& z = zeros_to(1000);
    EXPECT_THROW(verify_lemma_2_7(table(), z, 1000.0, 0.05, 2000.0), RangeError); // t_max < Z
    EXPECT_THROW(verify_lemma_2_7(table(), z, 1000.0, 0.05, 500.0), InputError);  // Z < X
    EXPECT_THROW(verify_lemma_2_7(table(), z, 20000.0, 0.05, 1000.0), RangeError);
    EXPECT_THROW(verify_lemma_2_7(table(), z, 1.0, 0.05, 1000.0), InputError);
}

TEST(Lemma27, SquareIntegralIsNonnegativeAndStepStable) {
    const ZeroSum S(zeros_to(1000), ZeroSumConfig(300.0, 0.05));
    const double a = detail::zero_sum_square_integral(S, 500.0, 0.2 / 300.0, Threads(1));
    const double b = detail::zero_sum_square_integral(S, 500.0, 0.1 / 300.0, Threads(3));
    EXPECT_GT(a, 0.0);
    EXPECT_NEAR(a, b, 1e-3 * b);
}
