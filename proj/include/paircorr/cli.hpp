#pragma once

/// @file cli.hpp
/// @brief Command dispatch for the `paircorr` tool. Kept in a header so the
/// tests can drive it with string streams.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paircorr/acceptance.hpp"
#include "paircorr/errors.hpp"
#include "paircorr/explicit_formula.hpp"
#include "paircorr/lemma_2_5.hpp"
#include "paircorr/lemmas.hpp"
#include "paircorr/moment_engine.hpp"
#include "paircorr/prime_core.hpp"
#include "paircorr/zero_engine.hpp"

namespace paircorr::cli {

enum class Format { csv, json };

struct RunConfig {
    std::string command;
    double x = 0.0, h = 0.0, delta = 0.0, Delta = 0.0, t = 0.0;
    std::optional<double> zmax;
    std::uint64_t limit = 0;
    std::string zeros_file, psi_cache, out;
    Format format = Format::json;
    double eta = 0.1;
    std::size_t grid = 400;
    std::string kind = "h";
    std::vector<double> exponents{0.35, 0.40, 0.45, 0.50, 0.55, 0.60};
    double cutoff = 2000.0;
    bool lemma = false;
    unsigned threads = 0;
};

namespace detail {

inline std::string g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline Threads threads_of(const RunConfig& c) { return c.threads ? Threads(c.threads) : Threads(); }

inline PsiTable load_table(const RunConfig& c, double needed, std::ostream& log) {
    SieveConfig sc;
    sc.threads = threads_of(c);
    if (!c.psi_cache.empty()) {
        auto t = read_psi_cache(c.psi_cache, sc);
        paircorr::detail::require(static_cast<double>(t.limit()) >= needed,
                                  "psi cache limit " + std::to_string(t.limit()) + " is below the required " +
                                      g9(needed));
        return t;
    }
    paircorr::detail::require(c.limit > 0, "--limit is required (or --psi-cache)");
    // a fresh table is a lower bound only; extend it to what the command reads
    std::uint64_t limit = c.limit;
    if (static_cast<double>(limit) < needed) {
        limit = static_cast<std::uint64_t>(std::ceil(needed));
        log << "note: --limit " << c.limit << " extended to " << limit << '\n';
    }
    return build_psi_table(limit, sc);
}

/// Zeros from --zeros-file, else computed to --zmax, else a usage error.
inline ZeroList load_zeros(const RunConfig& c, double min_height, const char* why) {
    if (!c.zeros_file.empty()) return import_zeros(c.zeros_file);
    if (c.zmax) {
        ZeroSearchConfig zc;
        zc.threads = threads_of(c);
        return compute_zeros(std::max(*c.zmax, min_height), zc);
    }
    throw InputError(std::string("no zeros: pass --zeros-file or --zmax (") + why + ")");
}

inline void emit_moment(std::ostream& out, const RunConfig& c, const std::vector<MomentResult>& rs) {
    if (c.format == Format::csv) {
        write_moment_csv_header(out);
        for (const auto& r : rs) write_moment_csv_row(out, r);
    } else if (rs.size() == 1) {
        out << to_json(rs.front()).dump(2) << '\n';
    } else {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : rs) arr.push_back(to_json(r));
        out << arr.dump(2) << '\n';
    }
}

inline void emit_reports(std::ostream& out, const RunConfig& c, const std::vector<VerifierReport>& rs) {
    if (c.format == Format::csv) {
        out << "name,computed,predicted,abs_error,tolerance,pass,hypothesis_ok\n";
        for (const auto& r : rs)
            out << r.name << ',' << g9(r.computed) << ',' << g9(r.predicted) << ',' << g9(r.abs_error) << ','
                << g9(r.tolerance) << ',' << (r.pass ? "true" : "false") << ','
                << (r.hypothesis_ok ? "true" : "false") << '\n';
    } else {
        out << to_json(rs).dump(2) << '\n';
    }
}

inline void emit_object(std::ostream& out, const RunConfig& c, const nlohmann::ordered_json& j) {
    if (c.format == Format::csv) {
        std::string head, row;
        for (auto it = j.begin(); it != j.end(); ++it) {
            head += (head.empty() ? "" : ",") + it.key();
            std::string v;
            if (it->is_number_float()) v = g9(it->get<double>());
            else if (it->is_string()) v = it->get<std::string>();
            else v = it->dump();
            row += (row.empty() ? "" : ",") + v;
        }
        out << head << '\n' << row << '\n';
    } else {
        out << j.dump(2) << '\n';
    }
}

inline bool all_pass(const std::vector<VerifierReport>& rs) {
    for (const auto& r : rs)
        if (!r.pass) return false;
    return true;
}

} // namespace detail

/// Runs one command; returns the exit status (0 ok, 1 computation failure or
/// failed verification, 2 usage error).
inline int dispatch(const RunConfig& c, std::ostream& out, std::ostream& log) {
    using paircorr::detail::require;
    const Threads threads = detail::threads_of(c);
    const std::string& cmd = c.command;

    if (cmd == "sieve") {
        require(c.limit >= 2, "sieve: need --limit >= 2");
        SieveConfig sc;
        sc.threads = threads;
        const auto table = build_psi_table(c.limit, sc);
        if (!c.psi_cache.empty()) write_psi_cache(c.psi_cache, table);
        nlohmann::ordered_json j;
        j["limit"] = table.limit();
        j["prime_powers"] = table.breakpoints().size();
        j["psi_limit"] = table.psi_at(table.limit());
        detail::emit_object(out, c, j);
        return 0;
    }
    if (cmd == "moment-h") {
        require(c.x >= 1.0 && c.h > 0.0, "moment-h: need --x >= 1 and --h > 0");
        const auto table = detail::load_table(c, c.x + c.h, log);
        detail::emit_moment(out, c, {second_moment_fixed_h(table, c.x, c.h)});
        return 0;
    }
    if (cmd == "moment-delta") {
        require(c.x >= 1.0 && c.delta > 0.0 && c.delta < 1.0, "moment-delta: need --x >= 1 and 0 < --delta < 1");
        const auto table = detail::load_table(c, (1.0 + c.delta) * c.x, log);
        detail::emit_moment(out, c, {second_moment_delta(table, c.x, c.delta)});
        return 0;
    }
    if (cmd == "moment-avg") {
        require(c.x >= 1.0 && c.Delta > 0.0 && c.Delta < 1.0, "moment-avg: need --x >= 1 and 0 < --Delta < 1");
        require(c.grid >= 16, "moment-avg: need --grid >= 16");
        const auto table = detail::load_table(c, (1.0 + c.Delta) * c.x, log);
        const auto r = averaged_double_integral(table, c.x, c.Delta, c.grid, 0.5, threads);
        detail::emit_reports(out, c, {r});
        return r.pass ? 0 : 1;
    }
    if (cmd == "fit") {
        require(c.x >= 2.0, "fit: need --x >= 2");
        require(c.kind == "h" || c.kind == "delta", "fit: --kind must be h or delta");
        require(c.exponents.size() >= 3, "fit: need at least 3 exponents");
        double top = 0.0;
        for (double e : c.exponents) {
            require(e > 0.0 && e < 1.0, "fit: exponents must lie in (0, 1)");
            top = std::max(top, std::pow(c.x, e));
        }
        const auto table = detail::load_table(c, c.x + top, log);
        std::vector<MomentResult> rs(c.exponents.size());
        parallel_blocks(rs.size(), threads, [&](std::size_t i) {
            const double h = std::pow(c.x, c.exponents[i]);
            rs[i] = c.kind == "h" ? second_moment_fixed_h(table, c.x, h) : second_moment_delta(table, c.x, h / c.x);
        });
        const auto f = fit_constant(rs);
        const auto k = constants();
        nlohmann::ordered_json j;
        j["X"] = c.x;
        j["kind"] = c.kind;
        j["points"] = f.points;
        j["estimate"] = f.estimate;
        j["stderr"] = f.stderr_;
        j["target"] = c.kind == "h" ? k.B : k.C;
        if (c.format == Format::csv) {
            detail::emit_moment(out, c, rs);
        } else {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& r : rs) arr.push_back(to_json(r));
            j["moments"] = arr;
            out << j.dump(2) << '\n';
        }
        return 0;
    }
    if (cmd == "pair-correlation") {
        require(c.t > 0.0 && c.x >= 1.0, "pair-correlation: need --t > 0 and --x >= 1");
        const auto zeros = detail::load_zeros(c, c.t, "pair-correlation needs ordinates up to --t");
        require(zeros.t_max() >= c.t, "pair-correlation: zero list height " + detail::g9(zeros.t_max()) +
                                          " is below --t");
        PairCorrelationConfig pc;
        pc.weight_cutoff = c.cutoff;
        pc.threads = threads;
        const auto F = pair_correlation_F(zeros, c.x, c.t, pc);
        nlohmann::ordered_json j;
        j["X"] = c.x;
        j["T"] = c.t;
        j["F"] = F.value;
        j["tail_bound"] = F.tail_bound;
        j["zeros_used"] = F.zeros_used;
        j["prediction"] = F_prediction(c.x, c.t);
        detail::emit_object(out, c, j);
        return 0;
    }
    if (cmd == "compute-zeros") {
        require(c.zmax.has_value(), "compute-zeros: --zmax is required");
        ZeroSearchConfig zc;
        zc.threads = threads;
        const auto zeros = compute_zeros(*c.zmax, zc);
        if (!c.out.empty()) export_zeros(zeros, c.out);
        else write_zeros(zeros, out);
        log << "computed " << zeros.size() << " ordinates to t_max=" << detail::g9(zeros.t_max()) << '\n';
        return 0;
    }
    if (cmd == "import-zeros") {
        require(!c.zeros_file.empty(), "import-zeros: --zeros-file is required");
        const auto zeros = import_zeros(c.zeros_file);
        nlohmann::ordered_json j;
        j["count"] = zeros.size();
        j["t_max"] = zeros.t_max();
        j["first"] = zeros.empty() ? 0.0 : zeros.ordinates().front();
        j["last"] = zeros.empty() ? 0.0 : zeros.ordinates().back();
        j["N_t_max"] = zero_count_N(zeros.t_max());
        detail::emit_object(out, c, j);
        return 0;
    }
    if (cmd == "explicit") {
        require(c.x >= 2.0 && c.delta > 0.0 && c.delta < 1.0, "explicit: need --x >= 2 and 0 < --delta < 1");
        if (c.lemma) {
            const auto table = detail::load_table(c, 2.0 * c.x * (1.0 + c.delta), log);
            const auto zeros = detail::load_zeros(c, c.x, "the zero sum needs ordinates up to Z");
            const double Z = c.zmax ? *c.zmax : ZeroSumConfig::default_Z(c.x, zeros);
            Lemma27Options opt;
            opt.threads = threads;
            const auto r = verify_lemma_2_7(table, zeros, c.x, c.delta, Z, opt);
            detail::emit_reports(out, c, {r});
            return r.pass ? 0 : 1;
        }
        const auto zeros = detail::load_zeros(c, 0.0, "the zero sum needs ordinates up to Z");
        const double Z = c.zmax ? *c.zmax : ZeroSumConfig::default_Z(c.x, zeros);
        const ZeroSumConfig zc(Z, c.delta);
        const double zs = zero_sum_increment(zeros, zc, c.x);
        nlohmann::ordered_json j;
        j["x"] = c.x;
        j["delta"] = c.delta;
        j["Z_used"] = Z;
        j["Z_recommended"] = ZeroSumConfig::recommended_Z(c.x);
        j["zero_sum"] = zs;
        if (c.limit > 0 || !c.psi_cache.empty()) {
            const auto table = detail::load_table(c, (1.0 + c.delta) * c.x, log);
            j["psi_increment"] = table.psi((1.0 + c.delta) * c.x) - table.psi(c.x) - c.delta * c.x;
        }
        detail::emit_object(out, c, j);
        return 0;
    }
    if (cmd == "verify-lemmas") {
        require(c.eta > 0.0 && c.eta < 1.0, "verify-lemmas: need 0 < --eta < 1");
        require(c.grid >= 2, "verify-lemmas: need --grid >= 2");
        std::vector<VerifierReport> rs;
        const KernelParams p(c.eta);
        for (double t : {0.25, 0.5, 1.0 + c.eta / 2.0, 1.0 + c.eta, 2.0, 5.0}) rs.push_back(verify_lemma_2_3(p, t));
        const auto grid = log_grid(1e-3, 1e3, c.grid);
        rs.push_back(verify_lemma_2_35(p, grid));

        std::vector<double> g1;
        for (int i = 0; i <= 2000; ++i) g1.push_back(90.0 + 0.01 * i);
        rs.push_back(verify_lemma_2_1(SampledFunction::sample(g1, [](double) { return 1.0; }), 100.0));

        constexpr double pi = std::numbers::pi;
        const double D = constants().D;
        std::vector<double> g{0.0, 2.0 * pi};
        const auto lg = log_grid(2.0 * pi, 1e8, 25001);
        g.insert(g.end(), lg.begin() + 1, lg.end());
        const auto f = SampledFunction::sample(g, [D](double t) { return std::max(0.0, std::log(t) + D + 1.0); });
        rs.push_back(verify_lemma_2_2(f, 1e-3, 2.0, D));
        rs.push_back(verify_lemma_2_4(f, 1e3, D));

        RunConfig zc = c;
        if (zc.zeros_file.empty() && !zc.zmax) zc.zmax = 5000.0;
        const auto zeros = detail::load_zeros(zc, 0.0, "");
        rs.push_back(verify_lemma_2_5(zeros, 0.05, 40.0, 100.0));
        const auto ts = log_grid(1.0, std::max(2.0, zeros.t_max() - 50.0), 200);
        rs.push_back(verify_zero_density(zeros, ts));
        detail::emit_reports(out, c, rs);
        return detail::all_pass(rs) ? 0 : 1;
    }
    if (cmd == "verify-all") {
        acceptance::Suite suite(threads);
        bool ok = true;
        suite.run_all([&](const acceptance::CriterionResult& r) {
            out << acceptance::format_line(r) << '\n' << std::flush;
            ok = ok && r.pass;
        });
        return ok ? 0 : 1;
    }
    throw InputError("unknown command '" + cmd + "'");
}

/// Parses argv and dispatches. Output goes to --out when given.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Prime moments in short intervals and zeta zero pair correlation"};
    app.require_subcommand(1, 1);
    // -h would collide with --h; subcommands inherit this
    app.set_help_flag("--help", "print this help and exit");
    RunConfig c;
    std::string format = "json";

    const auto common = [&](CLI::App* s) {
        s->add_option("--threads", c.threads, "worker cap (default: machine parallelism)");
        s->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    const auto output = [&](CLI::App* s) { s->add_option("--out", c.out, "write the artifact here"); };
    const auto table = [&](CLI::App* s) {
        s->add_option("--limit", c.limit, "sieve limit");
        s->add_option("--psi-cache", c.psi_cache, "read the psi table from this cache");
    };
    const auto zeros = [&](CLI::App* s) {
        s->add_option("--zeros-file", c.zeros_file, "zero ordinate file");
        s->add_option("--zmax", c.zmax, "height / truncation Z");
    };

    auto* sieve = app.add_subcommand("sieve", "build psi up to --limit, optionally writing --psi-cache");
    sieve->add_option("--limit", c.limit, "sieve limit")->required();
    sieve->add_option("--psi-cache", c.psi_cache, "write the cache here");
    common(sieve), output(sieve);

    auto* mh = app.add_subcommand("moment-h", "int_1^X (psi(x+h) - psi(x) - h)^2 dx");
    mh->add_option("--x", c.x)->required();
    mh->add_option("--h", c.h)->required();
    common(mh), output(mh), table(mh);

    auto* md = app.add_subcommand("moment-delta", "int_1^X (psi((1+delta)x) - psi(x) - delta x)^2 dx");
    md->add_option("--x", c.x)->required();
    md->add_option("--delta", c.delta)->required();
    common(md), output(md), table(md);

    auto* ma = app.add_subcommand("moment-avg", "delta-averaged proportional moment");
    ma->add_option("--x", c.x)->required();
    ma->add_option("--Delta", c.Delta)->required();
    ma->add_option("--grid", c.grid, "Simpson intervals over delta")->default_val(64);
    common(ma), output(ma), table(ma);

    auto* fit = app.add_subcommand("fit", "fit the second-term constant over h = X^e");
    fit->add_option("--x", c.x)->required();
    fit->add_option("--kind", c.kind, "h or delta")->check(CLI::IsMember({"h", "delta"}));
    fit->add_option("--exponents", c.exponents, "exponents e");
    common(fit), output(fit), table(fit);

    auto* pc = app.add_subcommand("pair-correlation", "F(X, T)");
    pc->add_option("--t", c.t)->required();
    pc->add_option("--x", c.x)->required();
    pc->add_option("--cutoff", c.cutoff, "pair separation cutoff");
    common(pc), output(pc), zeros(pc);

    auto* cz = app.add_subcommand("compute-zeros", "zero ordinates in (0, --zmax], written in the zero-file format");
    cz->add_option("--zmax", c.zmax)->required();
    common(cz), output(cz);

    auto* iz = app.add_subcommand("import-zeros", "validate a zero file and summarize it");
    iz->add_option("--zeros-file", c.zeros_file)->required();
    common(iz), output(iz);

    auto* ex = app.add_subcommand("explicit", "truncated zero sum for the psi increment");
    ex->add_option("--x", c.x)->required();
    ex->add_option("--delta", c.delta)->required();
    ex->add_flag("--lemma", c.lemma, "compare mean squares over [X, 2X] instead of one point");
    common(ex), output(ex), table(ex), zeros(ex);

    auto* vl = app.add_subcommand("verify-lemmas", "run the lemma verifiers");
    vl->add_option("--eta", c.eta)->default_val(0.1);
    vl->add_option("--grid", c.grid, "log-grid size for the K'' bound")->default_val(400);
    common(vl), output(vl), zeros(vl);

    auto* va = app.add_subcommand("verify-all", "run the acceptance checks");
    va->add_option("--threads", c.threads);
    output(va);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    c.command = app.get_subcommands().front()->get_name();
    c.format = format == "csv" ? Format::csv : Format::json;

    const auto t0 = std::chrono::steady_clock::now();
    int status = 0;
    try {
        if (c.out.empty() || c.command == "compute-zeros") {
            status = dispatch(c, out, err);
        } else {
            std::ostringstream buf;
            status = dispatch(c, buf, err);
            std::ofstream f(c.out, std::ios::binary);
            if (!f) throw InputError("cannot write '" + c.out + "'");
            f << buf.str();
        }
    } catch (const InputError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const RangeError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    err << c.command << ": " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
        << " s\n";
    return status;
}

} // namespace paircorr::cli
