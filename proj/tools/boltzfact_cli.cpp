#include "boltzfact/cache.hpp"
#include "boltzfact/error.hpp"
#include "boltzfact/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace bf = boltzfact;
using json = nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr double kGiB = 1024.0 * 1024.0 * 1024.0;

struct CsvTable {
    std::string kind;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) throw bf::IoError("cannot open " + path + " for writing");
    out << "# boltzfact-csv v1\n# " << t.kind << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw bf::IoError("write failed for " + path);
}

std::string sci(double x, int prec = 3) {
    std::ostringstream s;
    s.precision(prec);
    s << std::scientific << x;
    return s.str();
}

json grid_json(const bf::GridSpec& g) {
    return {{"n_E", g.n_E}, {"n_rho1", g.n_rho1}, {"n_t1", g.n_t1}, {"n_h2", g.n_h2}, {"n_t2", g.n_t2},
            {"n_chi", g.n_chi}, {"n_eps", g.n_eps}, {"pad_rad", g.pad_rad}, {"pad_ang", g.pad_ang}};
}

// --- build -------------------------------------------------------------------

struct BuildArgs {
    int kmax = 4, lmax = 6;
    double gamma = 0.0;
    int pad_rad = bf::kDefaultPad, pad_ang = bf::kDefaultPad;
    std::string out;
    bool no_conservation = false;
    int threads = 1;
};

int cmd_build(const BuildArgs& a) {
    const bf::SpectralConfig cfg(a.kmax, a.lmax, a.gamma);
    const bf::GridSpec grid = bf::grid_sizes(a.kmax, a.lmax, a.pad_rad, a.pad_ang);
    bf::BuildOptions opts;
    opts.threads = a.threads;
    opts.conservation = !a.no_conservation;
    const auto t0 = std::chrono::steady_clock::now();
    const bf::FactorizedOperator op = bf::build_operator(cfg, grid, opts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bf::save_operator(op, a.out);

    const bf::MemoryFootprint mem = bf::memory_footprint(cfg, op.channels().size(), op.coo().size());
    std::printf("K=%d L=%d gamma=%g  DOFs %d\n", a.kmax, a.lmax, a.gamma, cfg.n_dof());
    std::printf("N_T=%d N_G=%zu N_S=%zu\n", op.channels().size(), op.coo().size(), op.n_slices());
    std::printf("radial elements %zu, routing rows %zu, factorized elements %llu\n", op.r().values().size(),
                op.coo().size(), static_cast<unsigned long long>(mem.factorized_elements));
    std::printf("factorized size %.2e GiB, dense %.2e GiB, ratio %.2e\n", mem.factorized_bytes / kGiB,
                mem.dense_bytes / kGiB, mem.ratio);
    std::printf("assembly %.2f s (%d threads)\n", secs, a.threads);
    std::printf("wrote %s\n", a.out.c_str());
    return kExitPass;
}

// --- validate ----------------------------------------------------------------

int cmd_validate(const std::string& suite, const std::string& cache, const std::string& csv, int threads) {
    const bf::FactorizedOperator op = bf::load_operator(cache);
    const bf::SuiteResult res = bf::run_suite(suite, op, threads);
    std::printf("%-24s %-6s %s\n", "check", "status", "detail");
    for (const bf::Check& c : res.checks)
        std::printf("%-24s %-6s %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());
    if (suite == "viscosity")
        for (const auto& row : res.rows) std::printf("f_mu(K=%s) = %s\n", row[0].c_str(), row[1].c_str());
    if (suite == "quadconv")
        for (const auto& row : res.rows) std::printf("pad %3s  rel err %s\n", row[0].c_str(), row[1].c_str());
    std::printf("%s: %s\n", suite.c_str(), res.pass() ? "PASS" : "FAIL");
    if (!csv.empty()) write_csv(csv, {"suite=" + suite, res.columns, res.rows});
    return res.pass() ? kExitPass : kExitFail;
}

// --- bench -------------------------------------------------------------------

std::vector<bf::Strategy> parse_strategies(const std::string& list) {
    std::vector<bf::Strategy> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(bf::parse_strategy(item));
    if (out.empty()) throw bf::DomainError("no strategies given");
    return out;
}

int cmd_bench(const std::string& cache, const std::string& strategies, int repeats, const std::string& csv) {
    const bf::FactorizedOperator op = bf::load_operator(cache);
    const bf::BenchResult res = bf::bench_strategies(op, parse_strategies(strategies), repeats);

    double dense_time = 0.0;
    for (const auto& t : res.timings)
        if (t.strategy == bf::Strategy::Dense && !t.skipped) dense_time = t.median_seconds;

    CsvTable table{"bench K=" + std::to_string(op.config().k_max()) + " L=" + std::to_string(op.config().l_max()),
                   {"strategy", "median_s", "min_s", "macs", "bytes", "speedup_vs_dense"},
                   {}};
    std::printf("%-14s %12s %12s %14s %14s %9s\n", "strategy", "median s", "min s", "MACs", "bytes", "speedup");
    for (const auto& t : res.timings) {
        const std::string name(bf::strategy_name(t.strategy));
        if (t.skipped) {
            std::fprintf(stderr, "warning: %s skipped: %s\n", name.c_str(), t.note.c_str());
            table.rows.push_back({name, "", "", "", "", ""});
            continue;
        }
        const double speedup = dense_time > 0.0 ? dense_time / t.median_seconds : 0.0;
        std::printf("%-14s %12.4e %12.4e %14llu %14llu %9.2f\n", name.c_str(), t.median_seconds, t.min_seconds,
                    static_cast<unsigned long long>(t.counter.macs), static_cast<unsigned long long>(t.counter.bytes),
                    speedup);
        table.rows.push_back({name, sci(t.median_seconds, 6), sci(t.min_seconds, 6), std::to_string(t.counter.macs),
                              std::to_string(t.counter.bytes), dense_time > 0.0 ? sci(speedup, 4) : ""});
    }
    std::printf("max pairwise relative difference %.2e\n", res.max_rel_diff);
    if (!csv.empty()) write_csv(csv, table);
    if (res.max_rel_diff > 1e-12) {
        std::fprintf(stderr, "strategies disagree beyond 1e-12\n");
        return kExitFail;
    }
    return kExitPass;
}

// --- info --------------------------------------------------------------------

int cmd_info(const std::string& cache, bool json_only) {
    const bf::CacheHeader h = bf::read_cache_header(cache);
    const bf::SpectralConfig cfg(static_cast<int>(h.k_max), static_cast<int>(h.l_max), h.gamma);
    const bf::MemoryFootprint mem = bf::memory_footprint(cfg, h.n_t, h.n_g);
    json j{{"format_version", h.version},
           {"k_max", h.k_max},
           {"l_max", h.l_max},
           {"gamma", h.gamma},
           {"grid", grid_json(h.grid)},
           {"n_dof", cfg.n_dof()},
           {"n_channels", h.n_t},
           {"n_gaunt", h.n_g},
           {"flags",
            {{"conservation", h.flags.conservation},
             {"detailed_balance", h.flags.detailed_balance},
             {"symmetrized", h.flags.symmetrized}}},
           {"crc32", h.crc32},
           {"memory",
            {{"dense_elements", mem.dense_elements},
             {"dense_bytes", mem.dense_bytes},
             {"factorized_elements", mem.factorized_elements},
             {"factorized_bytes", mem.factorized_bytes},
             {"ratio", mem.ratio}}}};
    if (!json_only) {
        std::printf("cache %s (format v%u, crc32 %08x)\n", cache.c_str(), h.version, h.crc32);
        std::printf("K=%u L=%u gamma=%g  DOFs %d\n", h.k_max, h.l_max, h.gamma, cfg.n_dof());
        std::printf("N_T=%llu N_G=%llu\n", static_cast<unsigned long long>(h.n_t),
                    static_cast<unsigned long long>(h.n_g));
        std::printf("corrections: conservation %s, detailed balance %s\n", h.flags.conservation ? "yes" : "no",
                    h.flags.detailed_balance ? "yes" : "no");
        std::printf("dense      %llu elements, %.3e GiB\n", static_cast<unsigned long long>(mem.dense_elements),
                    mem.dense_bytes / kGiB);
        std::printf("factorized %llu elements, %.3e GiB\n", static_cast<unsigned long long>(mem.factorized_elements),
                    mem.factorized_bytes / kGiB);
        std::printf("ratio %.2e\n", mem.ratio);
    }
    std::printf("%s\n", j.dump(2).c_str());
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boltzfact: factorized spectral Boltzmann collision operators"};
    app.require_subcommand(1);

    BuildArgs ba;
    auto* build = app.add_subcommand("build", "assemble, correct and cache an operator");
    build->add_option("--kmax", ba.kmax, "radial truncation")->required()->check(CLI::Range(0, 64));
    build->add_option("--lmax", ba.lmax, "angular truncation")->required()->check(CLI::Range(0, 64));
    build->add_option("--gamma", ba.gamma, "VHS exponent")->check(CLI::Range(0.0, 1.0));
    build->add_option("--pad-rad", ba.pad_rad, "radial quadrature padding")->check(CLI::NonNegativeNumber);
    build->add_option("--pad-ang", ba.pad_ang, "angular quadrature padding")->check(CLI::NonNegativeNumber);
    build->add_option("--out", ba.out, "cache file")->required();
    build->add_flag("--no-conservation", ba.no_conservation, "skip the conservation correction");
    build->add_option("--threads", ba.threads, "assembly threads")->envname("BOLTZFACT_THREADS")->check(CLI::PositiveNumber);

    std::string suite, v_cache, v_csv;
    int v_threads = 1;
    auto* validate = app.add_subcommand("validate", "run a validation suite against a cache");
    validate->add_option("suite", suite, "suite")
        ->required()
        ->check(CLI::IsMember({"bkw", "wcu", "galilean", "viscosity", "stress", "quadconv"}));
    validate->add_option("--cache", v_cache, "cache file")->required();
    validate->add_option("--csv", v_csv, "CSV output");
    validate->add_option("--threads", v_threads, "threads for quadconv rebuilds")
        ->envname("BOLTZFACT_THREADS")
        ->check(CLI::PositiveNumber);

    std::string b_cache, b_csv, b_strategies = "dense,naive,radial-first,angular-first";
    int repeats = 5;
    bool single = true;
    auto* bench = app.add_subcommand("bench", "time contraction strategies on random fields");
    bench->add_option("--cache", b_cache, "cache file")->required();
    bench->add_option("--strategies", b_strategies, "comma separated strategies");
    bench->add_option("--repeats", repeats, "fields per strategy")->check(CLI::PositiveNumber);
    bench->add_option("--csv", b_csv, "CSV output");
    bench->add_flag("--single-thread", single, "contractions always run on one thread");

    std::string i_cache;
    bool json_only = false;
    auto* info = app.add_subcommand("info", "print cache header and memory breakdown");
    info->add_option("--cache", i_cache, "cache file")->required();
    info->add_flag("--json", json_only, "JSON only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (*build) return cmd_build(ba);
        if (*validate) return cmd_validate(suite, v_cache, v_csv, v_threads);
        if (*bench) return cmd_bench(b_cache, b_strategies, repeats, b_csv);
        if (*info) return cmd_info(i_cache, json_only);
    } catch (const bf::IntegrityError& e) {
        std::fprintf(stderr, "integrity error: %s\n", e.what());
        return kExitUsage;
    } catch (const bf::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    }
    return kExitUsage;
}
