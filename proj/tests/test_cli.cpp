#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "paircorr/cli.hpp"

using namespace paircorr;

namespace {

struct Outcome {
    int status;
    std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "paircorr");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int st = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {st, out.str(), err.str()};
}

// stdout and exit status of the installed binary
Outcome run_binary(const std::string& args) {
    const std::string cmd = std::string(PAIRCORR_CLI_PATH) + " " + args + " 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> p(popen(cmd.c_str(), "r"), pclose);
    if (!p) return {-1, {}, {}};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p.get())) > 0) out.append(buf.data(), n);
    const int raw = pclose(p.release());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out, {}};
}

std::string temp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("paircorr_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

} // namespace

TEST(Cli, MomentHJson) {
    const auto r = run_cli({"moment-h", "--limit", "1000100", "--x", "1000000", "--h", "1000", "--format", "json"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["X"], 1e6);
    EXPECT_EQ(j["h_or_delta"], 1000.0);
    EXPECT_EQ(j["kind"], "h");
    for (const char* k : {"value", "main_term", "second_term", "residual", "normalized_residual"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_NEAR(j["value"].get<double>(), j["main_term"].get<double>() + j["second_term"].get<double>() +
                                              j["residual"].get<double>(),
                1e-6 * j["value"].get<double>());
    EXPECT_NE(r.err.find("extended to 1001000"), std::string::npos);
}

TEST(Cli, CsvUsesNineDigits) {
    const auto r = run_cli({"moment-h", "--limit", "1001000", "--x", "1000000", "--h", "1000", "--format", "csv"});
    ASSERT_EQ(r.status, 0) << r.err;
    std::istringstream is(r.out);
    std::string head, row;
    std::getline(is, head);
    std::getline(is, row);
    EXPECT_EQ(head, "X,kind,h_or_delta,value,main_term,second_term,residual,normalized_residual");
    const auto j = nlohmann::json::parse(
        run_cli({"moment-h", "--limit", "1001000", "--x", "1000000", "--h", "1000"}).out);
    char expect[64];
    std::snprintf(expect, sizeof expect, "%.9g", j["value"].get<double>());
    EXPECT_NE(row.find(std::string(",") + expect + ","), std::string::npos) << row;
}

TEST(Cli, JsonRoundTripsDoubles) {
    const auto a = run_cli({"moment-delta", "--limit", "60000", "--x", "50000", "--delta", "0.1"});
    ASSERT_EQ(a.status, 0);
    const auto j = nlohmann::json::parse(a.out);
    const double v = j["value"].get<double>();
    const auto t = build_psi_table(60000);
    EXPECT_EQ(v, second_moment_delta(t, 50000.0, 0.1).value);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({"pair-correlation", "--t", "100", "--x", "1"}).status, 2);
    EXPECT_EQ(run_cli({"no-such-command"}).status, 2);
    EXPECT_EQ(run_cli({}).status, 2);
    EXPECT_EQ(run_cli({"moment-h", "--x", "10", "--h", "1", "--bogus", "3"}).status, 2);
    EXPECT_EQ(run_cli({"moment-h", "--x", "10"}).status, 2);
    EXPECT_EQ(run_cli({"moment-h", "--x", "10", "--h", "1"}).status, 2); // no --limit
    EXPECT_EQ(run_cli({"moment-h", "--x", "10", "--h", "1", "--limit", "100", "--format", "xml"}).status, 2);
    EXPECT_EQ(run_cli({"moment-delta", "--x", "100", "--delta", "1.5", "--limit", "1000"}).status, 2);
    EXPECT_EQ(run_cli({"import-zeros", "--zeros-file", temp("missing.txt")}).status, 2);
    const auto h = run_cli({"moment-h", "--help"});
    EXPECT_EQ(h.status, 0);
    EXPECT_NE(h.out.find("--limit"), std::string::npos);
}

TEST(Cli, BadZeroFileIsAnError) {
    const auto path = temp("bad_zeros.txt");
    {
        std::ofstream f(path);
        f << "14.13\nnot-a-number\n";
    }
    const auto r = run_cli({"import-zeros", "--zeros-file", path});
    EXPECT_NE(r.status, 0);
    EXPECT_FALSE(r.err.empty());
    std::filesystem::remove(path);
}

TEST(Cli, ComputeAndImportZeros) {
    const auto path = temp("zeros50.txt");
    const auto c = run_cli({"compute-zeros", "--zmax", "50", "--out", path});
    ASSERT_EQ(c.status, 0) << c.err;
    const auto zl = import_zeros(path);
    ASSERT_EQ(zl.size(), 10u);
    EXPECT_NEAR(zl.ordinates().front(), 14.134725141734695, 1e-9);
    EXPECT_EQ(zl.t_max(), 50.0);

    const auto i = run_cli({"import-zeros", "--zeros-file", path});
    ASSERT_EQ(i.status, 0) << i.err;
    const auto j = nlohmann::json::parse(i.out);
    EXPECT_EQ(j["count"], 10);
    EXPECT_EQ(j["t_max"], 50.0);

    // the same list feeds pair-correlation
    const auto pc = run_cli({"pair-correlation", "--t", "50", "--x", "10", "--zeros-file", path});
    ASSERT_EQ(pc.status, 0) << pc.err;
    EXPECT_EQ(nlohmann::json::parse(pc.out)["zeros_used"], 10);
    std::filesystem::remove(path);
}

TEST(Cli, SieveCacheFeedsMoments) {
    const auto cache = temp("psi.bin");
    ASSERT_EQ(run_cli({"sieve", "--limit", "100000", "--psi-cache", cache}).status, 0);
    const auto a = run_cli({"moment-delta", "--psi-cache", cache, "--x", "50000", "--delta", "0.1"});
    const auto b = run_cli({"moment-delta", "--limit", "100000", "--x", "50000", "--delta", "0.1"});
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    // a cache is never extended
    EXPECT_EQ(run_cli({"moment-delta", "--psi-cache", cache, "--x", "95000", "--delta", "0.1"}).status, 2);
    std::filesystem::remove(cache);
}

TEST(Cli, OutFileMatchesStdout) {
    const auto path = temp("out.json");
    const std::vector<std::string> args{"moment-avg", "--limit", "20000", "--x", "10000", "--Delta", "0.1"};
    const auto direct = run_cli(args);
    ASSERT_EQ(direct.status, 0) << direct.err;
    auto with_out = args;
    with_out.insert(with_out.end(), {"--out", path});
    const auto r = run_cli(with_out);
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(slurp(path), direct.out);
    std::filesystem::remove(path);
}

TEST(Cli, ExplicitPointAndLemma) {
    const auto p = run_cli({"explicit", "--x", "10000.5", "--delta", "0.01", "--zmax", "1000", "--limit", "20000"});
    ASSERT_EQ(p.status, 0) << p.err;
    const auto j = nlohmann::json::parse(p.out);
    EXPECT_EQ(j["Z_used"], 1000.0);
    EXPECT_TRUE(j.contains("zero_sum"));
    EXPECT_TRUE(j.contains("psi_increment"));

    const auto l = run_cli(
        {"explicit", "--lemma", "--x", "1000", "--delta", "0.05", "--zmax", "1000", "--limit", "2100"});
    ASSERT_EQ(l.status, 0) << l.err;
    const auto r = nlohmann::ordered_json::parse(l.out);
    EXPECT_TRUE(is_valid_report_json(r.is_array() ? r[0] : r));
}

TEST(Cli, FitReportsConstant) {
    const auto r = run_cli({"fit", "--limit", "110000", "--x", "100000", "--kind", "h"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["points"], 6);
    EXPECT_EQ(j["moments"].size(), 6u);
    EXPECT_NEAR(j["target"].get<double>(), constants().B, 1e-12);
    EXPECT_LT(std::fabs(j["estimate"].get<double>() - constants().B), 0.5);
}

TEST(Cli, Deterministic) {
    const std::vector<std::string> args{"pair-correlation", "--t", "500", "--x", "50", "--zmax", "500"};
    const auto a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    EXPECT_EQ(run_cli(threaded).out, a.out);
}

TEST(CliBinary, ExitStatuses) {
    EXPECT_EQ(run_binary("pair-correlation --t 100 --x 1").status, 2);
    EXPECT_EQ(run_binary("frobnicate").status, 2);
    const auto r = run_binary("moment-h --limit 1000100 --x 1000000 --h 1000 --format json");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, run_cli({"moment-h", "--limit", "1000100", "--x", "1000000", "--h", "1000", "--format", "json"}).out);
}

TEST(CliBinary, VerifyLemmasAllPass) {
    const auto r = run_binary("verify-lemmas --eta 0.1");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::ordered_json::parse(r.out);
    ASSERT_TRUE(j.is_array());
    EXPECT_GE(j.size(), 10u);
    for (const auto& rep : j) {
        EXPECT_TRUE(is_valid_report_json(rep)) << rep.dump();
        EXPECT_TRUE(rep["pass"].get<bool>()) << rep["name"];
    }
}
