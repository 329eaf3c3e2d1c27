#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "paircorr/moment_engine.hpp"
#include "paircorr/oracles.hpp"

using namespace paircorr;

namespace {

// Exact piecewise integral built from an explicit sorted cut list and the
// naive psi array; the integrand is evaluated at each piece midpoint.
template <typename Window>
double piecewise_oracle(const std::vector<double>& psi, double lo, double hi, std::vector<double> cuts,
                        Window window, bool proportional, double delta) {
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = std::max(lo, cuts[k]), b = std::min(hi, cuts[k + 1]);
        if (b <= a) continue;
        const double m = 0.5 * (a + b), w = b - a;
        const double A = oracle::psi_floor(psi, window(m)) - oracle::psi_floor(psi, m);
        if (!proportional) {
            s += w * (A - window(0.0)) * (A - window(0.0));
        } else {
            // int (A - delta x)^2 over [a, b]
            s += ((A - delta * a) * (A - delta * a) * (A - delta * a) - (A - delta * b) * (A - delta * b) * (A - delta * b)) /
                 (3.0 * delta);
        }
    }
    return s;
}

double oracle_fixed_h(const std::vector<double>& psi, double X, double h) {
    std::vector<double> cuts;
    for (std::size_t n = 2; n < psi.size(); ++n) {
        if (psi[n] == psi[n - 1]) continue;
        for (double c : {static_cast<double>(n), static_cast<double>(n) - h})
            if (c > 1.0 && c < X) cuts.push_back(c);
    }
    return piecewise_oracle(
        psi, 1.0, X, cuts, [h](double x) { return x + h; }, false, 0.0);
}

double oracle_delta(const std::vector<double>& psi, double X, double delta) {
    std::vector<double> cuts;
    for (std::size_t n = 2; n < psi.size(); ++n) {
        if (psi[n] == psi[n - 1]) continue;
        for (double c : {static_cast<double>(n), static_cast<double>(n) / (1.0 + delta)})
            if (c > 1.0 && c < X) cuts.push_back(c);
    }
    return piecewise_oracle(
        psi, 1.0, X, cuts, [delta](double x) { return (1.0 + delta) * x; }, true, delta);
}

} // namespace

TEST(FixedH, HandComputedExample) {
    const auto t = build_psi_table(10);
    // pieces [1, 1.5] with A = 0 and [1.5, 2] with A = log 2
    const double expected = 0.5 * 0.25 + 0.5 * (std::log(2.0) - 0.5) * (std::log(2.0) - 0.5);
    const auto r = second_moment_fixed_h(t, 2.0, 0.5);
    EXPECT_NEAR(r.value, expected, 1e-15);
    EXPECT_NEAR(r.value, 0.1436529, 1e-7);
    EXPECT_EQ(r.kind, WindowKind::fixed_h);
    EXPECT_EQ(r.parameter, 0.5);
}

TEST(FixedH, EmptyRange) {
    const auto t = build_psi_table(10);
    EXPECT_EQ(second_moment_fixed_h(t, 1.0, 3.0).value, 0.0);
    EXPECT_EQ(second_moment_fixed_h(t, 1.0, 0.1).value, 0.0);
}

TEST(FixedH, MatchesRiemannSumAt1e4) {
    const auto t = build_psi_table(10'100);
    const auto psi = oracle::naive_psi(10'100);
    const double v = second_moment_fixed_h(t, 1e4, 50.0).value;
    EXPECT_NEAR(v, oracle::riemann_fixed_h(psi, 1e4, 50.0, 0.01), 1e-3 * v);
}

TEST(FixedH, MatchesPiecewiseOracle) {
    const auto t = build_psi_table(3000);
    const auto psi = oracle::naive_psi(3000);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const double X = 2.0 + 2500.0 * u(rng);
        const double h = std::pow(10.0, -1.0 + 3.0 * u(rng)) * (k % 5 == 0 ? 1.0 : 0.37);
        const double v = second_moment_fixed_h(t, X, h).value;
        EXPECT_NEAR(v, oracle_fixed_h(psi, X, h), 1e-9 * std::max(1.0, v)) << "X=" << X << " h=" << h;
    }
    // integer h makes entry and exit events coincide
    for (double h : {1.0, 2.0, 7.0, 30.0}) {
        const double v = second_moment_fixed_h(t, 2000.0, h).value;
        EXPECT_NEAR(v, oracle_fixed_h(psi, 2000.0, h), 1e-9 * v) << h;
    }
}

TEST(FixedH, SmallWindowAgainstFineRiemannSum) {
    // at step 0.01 the midpoint sum is too coarse for h near 1; step 1e-5 is not
    const auto t = build_psi_table(400);
    const auto psi = oracle::naive_psi(400);
    const double v = second_moment_fixed_h(t, 300.0, 1.2).value;
    EXPECT_NEAR(v, oracle::riemann_fixed_h(psi, 300.0, 1.2, 1e-5), 1e-4 * v);
}

TEST(Proportional, ClosedFormBelowFirstBreakpoint) {
    const auto t = build_psi_table(10);
    const double expected = 0.05 * 0.05 * (1.9 * 1.9 * 1.9 - 1.0) / 3.0;
    const auto r = second_moment_delta(t, 1.9, 0.05);
    EXPECT_NEAR(r.value, expected, 1e-15);
    EXPECT_NEAR(r.value, 0.0048825, 1e-7);
    EXPECT_EQ(second_moment_delta(t, 1.0, 0.05).value, 0.0);
}

TEST(Proportional, MatchesRiemannSumAt1e4) {
    const auto t = build_psi_table(10'200);
    const auto psi = oracle::naive_psi(10'200);
    const double v = second_moment_delta(t, 1e4, 0.01).value;
    EXPECT_NEAR(v, oracle::riemann_delta(psi, 1e4, 0.01, 0.005), 1e-3 * v);
}

TEST(Proportional, MatchesPiecewiseOracle) {
    const auto t = build_psi_table(3000);
    const auto psi = oracle::naive_psi(3000);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 30; ++k) {
        const double X = 2.0 + 2500.0 * u(rng);
        const double d = std::pow(10.0, -3.0 + 2.5 * u(rng));
        const double v = second_moment_delta(t, X, d).value;
        EXPECT_NEAR(v, oracle_delta(psi, X, d), 1e-9 * std::max(1.0, v)) << "X=" << X << " delta=" << d;
    }
}

TEST(Proportional, SmallWindowAgainstFineRiemannSum) {
    const auto t = build_psi_table(200);
    const auto psi = oracle::naive_psi(200);
    const double v = second_moment_delta(t, 150.0, 0.002).value;
    EXPECT_NEAR(v, oracle::riemann_delta(psi, 150.0, 0.002, 1e-5), 1e-4 * v);
}

TEST(Integrators, Additivity) {
    const auto t = build_psi_table(20'000);
    const double full = integrate_fixed_h(t, 13.5, 1.0, 19'000.0);
    const double parts = integrate_fixed_h(t, 13.5, 1.0, 7777.7) + integrate_fixed_h(t, 13.5, 7777.7, 19'000.0);
    EXPECT_NEAR(full, parts, 1e-12 * full);
    const double fd = integrate_delta(t, 0.02, 1.0, 19'000.0);
    const double pd = integrate_delta(t, 0.02, 1.0, 1024.0) + integrate_delta(t, 0.02, 1024.0, 19'000.0);
    EXPECT_NEAR(fd, pd, 1e-12 * fd);
}

TEST(Integrators, RangeErrors) {
    const auto t = build_psi_table(100);
    EXPECT_THROW(second_moment_fixed_h(t, 99.0, 2.0), RangeError);
    EXPECT_THROW(second_moment_fixed_h(t, 0.5, 2.0), RangeError);
    EXPECT_THROW(second_moment_fixed_h(t, 10.0, 0.0), RangeError);
    EXPECT_THROW(second_moment_delta(t, 99.0, 0.05), RangeError);
    EXPECT_THROW(second_moment_delta(t, 10.0, 1.5), RangeError);
}

TEST(Integrators, ThreadIndependentValues) {
    SieveConfig a, b;
    a.threads = Threads(1);
    b.threads = Threads(3);
    b.segment_size = 512;
    const auto ta = build_psi_table(50'000, a), tb = build_psi_table(50'000, b);
    EXPECT_EQ(second_moment_fixed_h(ta, 49'000.0, 77.0).value, second_moment_fixed_h(tb, 49'000.0, 77.0).value);
    EXPECT_EQ(second_moment_delta(ta, 40'000.0, 0.01).value, second_moment_delta(tb, 40'000.0, 0.01).value);
}

TEST(AveragedDoubleIntegral, DiagnosticAt1e5) {
    const double X = 1e5, Delta = 1.0 / std::sqrt(X);
    const auto t = build_psi_table(static_cast<std::uint64_t>((1.0 + Delta) * X) + 2);
    const auto r = averaged_double_integral(t, X, Delta, 256);
    EXPECT_TRUE(r.pass) << r.notes << " residual " << r.extra.at("normalized_residual");
    EXPECT_LE(std::fabs(r.extra.at("normalized_residual")), 0.5);
    EXPECT_TRUE(is_valid_report_json(to_json(r)));
}

TEST(AveragedDoubleIntegral, TrivialAndErrors) {
    const auto t = build_psi_table(100);
    const auto r = averaged_double_integral(t, 1.0, 0.1, 32);
    EXPECT_EQ(r.computed, 0.0);
    EXPECT_THROW(averaged_double_integral(t, 10.0, 0.1, 4), InputError);
    EXPECT_THROW(averaged_double_integral(t, 99.0, 0.1, 32), RangeError);
}

TEST(AveragedDoubleIntegral, SimpsonMatchesDirectInnerSum) {
    // the outer rule is plain Simpson over exact inner integrals
    const auto t = build_psi_table(2000);
    const double X = 1500.0, Delta = 0.04;
    const auto r = averaged_double_integral(t, X, Delta, 32);
    double s = 0.0;
    for (int k = 0; k <= 32; ++k) {
        const double d = Delta * k / 32.0;
        const double v = k == 0 ? 0.0 : integrate_delta(t, d, 1.0, X);
        s += (k == 0 || k == 32 ? 1.0 : (k % 2 ? 4.0 : 2.0)) * v;
    }
    EXPECT_NEAR(r.computed, s * (Delta / 32.0) / 3.0, 1e-10 * r.computed);
}

TEST(SaffariVaughan, RatiosInUnitInterval) {
    const auto t = build_psi_table(10'200);
    const auto r = sv_bound_ratios(t, {{1e4, WindowKind::fixed_h, 100.0},
                                       {1e4, WindowKind::proportional, 0.01},
                                       {1.0, WindowKind::fixed_h, 10.0}});
    ASSERT_EQ(r.size(), 3u);
    EXPECT_GT(r[0], 0.0);
    EXPECT_LT(r[0], 1.0);
    EXPECT_GT(r[1], 0.0);
    EXPECT_LT(r[1], 1.0);
    EXPECT_EQ(r[2], 0.0);
}

namespace {

MomentResult synthetic(double X, double h, double constant) {
    MomentResult r;
    r.X = X;
    r.kind = WindowKind::fixed_h;
    r.parameter = h;
    r.main_term = h * X * std::log(X / h);
    r.value = r.main_term + constant * h * X;
    return r;
}

} // namespace

TEST(Fit, ExactSyntheticData) {
    const double B = constants().B;
    std::vector<MomentResult> rs;
    // powers of two keep (value - main) / (hX) exact
    for (int e = 3; e <= 8; ++e) rs.push_back(synthetic(1024.0 * 1024.0, std::ldexp(1.0, e), -2.5));
    const auto f = fit_constant(rs);
    EXPECT_DOUBLE_EQ(f.estimate, -2.5);
    EXPECT_NEAR(f.stderr_, 0.0, 1e-14);
    EXPECT_EQ(f.points, 6u);

    rs.clear();
    for (int e = 1; e <= 6; ++e) rs.push_back(synthetic(1e6, std::pow(10.0, 0.5 * e), B));
    EXPECT_NEAR(fit_constant(rs).estimate, B, 1e-12);
}

TEST(Fit, NoisySyntheticData) {
    const double B = constants().B;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    std::vector<MomentResult> rs;
    for (int e = 0; e < 12; ++e) rs.push_back(synthetic(1e7, std::pow(1e7, 0.3 + 0.03 * e), B + noise(rng)));
    EXPECT_LE(std::fabs(fit_constant(rs).estimate - B), 0.02);
}

TEST(Fit, InputErrors) {
    std::vector<MomentResult> two{synthetic(100, 2, 1), synthetic(100, 3, 1)};
    EXPECT_THROW(fit_constant(two), InputError);
    auto mixed = two;
    mixed.push_back(synthetic(100, 4, 1));
    mixed.back().kind = WindowKind::proportional;
    EXPECT_THROW(fit_constant(mixed), InputError);
}

TEST(Fit, RealDataAt1e7) {
    const double X = 1e7;
    const auto t = build_psi_table(static_cast<std::uint64_t>(X + std::pow(X, 0.6)) + 2);
    std::vector<MomentResult> hs;
    for (double e : {0.35, 0.40, 0.45, 0.50, 0.55, 0.60}) hs.push_back(second_moment_fixed_h(t, X, std::pow(X, e)));
    EXPECT_NEAR(fit_constant(hs).estimate, constants().B, 1.0);
}

TEST(Output, CsvAndJson) {
    const auto t = build_psi_table(10);
    const auto r = second_moment_fixed_h(t, 2.0, 0.5);
    std::ostringstream os;
    write_moment_csv_header(os);
    write_moment_csv_row(os, r);
    const std::string csv = os.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "X,kind,h_or_delta,value,main_term,second_term,residual,normalized_residual");
    EXPECT_NE(csv.find("2,h,0.5,0.143652917,"), std::string::npos) << csv;

    const auto j = to_json(r);
    EXPECT_EQ(j["kind"], "h");
    EXPECT_EQ(j["value"].get<double>(), r.value);
    EXPECT_EQ(nlohmann::ordered_json::parse(j.dump())["value"].get<double>(), r.value);
}
