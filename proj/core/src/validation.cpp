#include "boltzfact/validation.hpp"

#include "boltzfact/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace boltzfact {

namespace {

std::string num(double x, const char* fmt = "%.6e") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, x);
    return buf;
}

void require(bool ok, const std::string& why) {
    if (!ok) throw ConfigurationError(why);
}

void require_gamma(const FactorizedOperator& op, double gamma, const char* suite) {
    require(op.config().gamma() == gamma, std::string(suite) + " needs a gamma = " + num(gamma, "%g") +
                                              " operator; cache has gamma = " + num(op.config().gamma(), "%g"));
}

void require_truncation(const FactorizedOperator& op, int k, int l, const char* suite) {
    const SpectralConfig& c = op.config();
    require(c.k_max() == k && c.l_max() == l,
            std::string(suite) + " compares against reference values at K=" + std::to_string(k) + ", L=" +
                std::to_string(l) + "; cache has K=" + std::to_string(c.k_max()) + ", L=" +
                std::to_string(c.l_max()));
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

bool SuiteResult::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<GalileanRow>& galilean_reference() {
    static const std::vector<GalileanRow> rows{{0.0, 4.77e-15}, {0.1, 5.14e-11}, {0.3, 3.39e-7}, {0.6, 8.88e-5}};
    return rows;
}

const std::vector<WcuGroup>& wcu_reference() {
    static const std::vector<WcuGroup> groups{{0.0, 5}, {-1.0, 4}, {-1.5, 9}, {-1.75, 5}, {-1.8, 4}};
    return groups;
}

SuiteResult validate_wcu(const FactorizedOperator& op) {
    require_gamma(op, 0.0, "wcu");
    require_truncation(op, 4, 6, "wcu");
    SuiteResult res;
    res.suite = "wcu";
    const WcuReport rep = wcu_spectrum_report(op, 1e-10);
    res.checks.push_back({"invariants", rep.n_zero == 5, "zero eigenvalues " + std::to_string(rep.n_zero) + " (want 5)"});

    const auto& ref = wcu_reference();
    for (std::size_t i = 1; i < ref.size(); ++i) {
        const std::size_t gi = i;  // group 0 is the invariant block
        Check c;
        c.name = "ratio " + num(ref[i].ratio, "%.4f");
        if (gi < rep.groups.size()) {
            const WcuGroup& g = rep.groups[gi];
            const double diff = std::abs(g.ratio - ref[i].ratio);
            c.pass = diff < 1e-8 && g.multiplicity == ref[i].multiplicity;
            c.detail = num(g.ratio, "%.12f") + " x" + std::to_string(g.multiplicity) + " (|diff| " + num(diff, "%.1e") +
                       ", want x" + std::to_string(ref[i].multiplicity) + ")";
        } else {
            c.detail = "group missing";
        }
        res.checks.push_back(c);
    }
    const double imag_bound = 1e-10 * rep.spectrum.norm;
    res.checks.push_back({"real spectrum", rep.spectrum.max_imag < imag_bound,
                          "max |Im| " + num(rep.spectrum.max_imag, "%.2e") + " < " + num(imag_bound, "%.2e")});

    res.columns = {"mode", "eigenvalue", "ratio"};
    for (std::size_t i = 0; i < rep.ratios.size(); ++i)
        res.rows.push_back({std::to_string(i + 1), num(rep.spectrum.real[static_cast<Eigen::Index>(i)], "%.15e"),
                            num(rep.ratios[i], "%.15e")});
    return res;
}

SuiteResult validate_bkw(const FactorizedOperator& op) {
    require_gamma(op, 0.0, "bkw");
    require(op.config().k_max() >= 2, "bkw needs k_max >= 2");
    SuiteResult res;
    res.suite = "bkw";
    const BkwReport rep = run_bkw_benchmark(op);
    res.checks.push_back({"rate fit", rep.fit_ok,
                          "fitted " + num(rep.rate_fit, "%.10f") + ", eigen " + num(rep.rate_eigen, "%.10f")});
    for (const BkwModeRate& m : rep.modes)
        res.checks.push_back({"mode k=" + std::to_string(m.k) + " rate", m.rel_error < 1e-4,
                              "fitted " + num(m.fitted_rate, "%.8f") + " vs linearized " +
                                  num(m.linearized_rate, "%.8f") + " (rel " + num(m.rel_error, "%.1e") + ")"});
    res.checks.push_back({"trajectory", rep.max_deviation < 1e-6, "max deviation " + num(rep.max_deviation, "%.2e")});
    res.checks.push_back({"invariant drift", rep.max_drift == 0.0, "max drift " + num(rep.max_drift, "%.2e")});

    res.columns = {"t"};
    for (int k = 0; k <= op.config().k_max(); ++k) res.columns.push_back("c_" + std::to_string(k));
    for (int k = 0; k <= op.config().k_max(); ++k) res.columns.push_back("bkw_" + std::to_string(k));
    for (std::size_t i = 0; i < rep.trace.times.size(); ++i) {
        const double t = rep.trace.times[i];
        std::vector<std::string> row{num(t, "%.4f")};
        const CoefficientField exact = bkw_coefficients(op.config(), t, rep.rate_fit);
        for (int k = 0; k <= op.config().k_max(); ++k) row.push_back(num(rep.trace.snapshots[i](k, 0), "%.15e"));
        for (int k = 0; k <= op.config().k_max(); ++k) row.push_back(num(exact(k, 0), "%.15e"));
        res.rows.push_back(std::move(row));
    }
    return res;
}

SuiteResult validate_galilean(const FactorizedOperator& op) {
    require_truncation(op, 4, 6, "galilean");
    SuiteResult res;
    res.suite = "galilean";
    res.columns = {"u", "truncation_l2", "reference", "ratio", "conservation_err", "collision_l2"};
    for (const GalileanRow& ref : galilean_reference()) {
        const GalileanReport rep = galilean_report(op, Vec3{ref.u, 0.0, 0.0});
        const double ratio = rep.truncation_l2 / ref.truncation;
        const std::string u = num(ref.u, "%.1f");
        res.checks.push_back({"u=" + u + " conservation", rep.conservation_err == 0.0,
                              "drift " + num(rep.conservation_err, "%.2e")});
        res.checks.push_back({"u=" + u + " truncation", ratio >= 1.0 / 3.0 && ratio <= 3.0,
                              num(rep.truncation_l2, "%.3e") + " vs " + num(ref.truncation, "%.3e") + " (x" +
                                  num(ratio, "%.3g") + ")"});
        res.rows.push_back({u, num(rep.truncation_l2, "%.6e"), num(ref.truncation, "%.3e"), num(ratio, "%.6g"),
                            num(rep.conservation_err, "%.3e"), num(rep.collision_l2, "%.6e")});
    }
    return res;
}

SuiteResult validate_viscosity(const FactorizedOperator& op) {
    require_gamma(op, 1.0, "viscosity");
    const SpectralConfig& cfg = op.config();
    require(cfg.l_max() >= 2 && cfg.k_max() >= 1, "viscosity needs l_max >= 2 and k_max >= 1");
    SuiteResult res;
    res.suite = "viscosity";
    const Eigen::MatrixXd L = linearize(op, CoefficientField::equilibrium(cfg));
    std::vector<double> f;
    for (int k = 0; k <= cfg.k_max(); ++k) f.push_back(chapman_enskog_fmu(L, cfg, k));

    res.checks.push_back({"f(0)", f[0] == 1.0, num(f[0], "%.15f")});
    res.checks.push_back({"f(1)", std::abs(f[1] - kFmuSecondOrder) <= 1e-5,
                          num(f[1], "%.6f") + " vs " + num(kFmuSecondOrder, "%.6f")});
    if (cfg.k_max() >= 4)
        res.checks.push_back({"f(4)", std::abs(f[4] - kFmuFourth) <= 1e-5,
                              num(f[4], "%.6f") + " vs " + num(kFmuFourth, "%.6f")});
    bool mono = true;
    for (std::size_t k = 1; k < f.size(); ++k) mono = mono && f[k] >= f[k - 1];
    res.checks.push_back({"monotone", mono, ""});
    const double top = *std::max_element(f.begin(), f.end());
    res.checks.push_back({"bounded", top <= kFmuLimit + 1e-5, "max " + num(top, "%.6f")});
    double spread = 0.0;
    for (int m = -2; m <= 2; ++m)
        spread = std::max(spread, std::abs(chapman_enskog_fmu(L, cfg, cfg.k_max(), m) - f.back()));
    res.checks.push_back({"m independent", spread < 1e-12, "spread " + num(spread, "%.1e")});

    res.columns = {"k_trunc", "f_mu"};
    for (std::size_t k = 0; k < f.size(); ++k) res.rows.push_back({std::to_string(k), num(f[k], "%.12f")});
    return res;
}

SuiteResult validate_stress(const FactorizedOperator& op) {
    require_gamma(op, 1.0, "stress");
    SuiteResult res;
    res.suite = "stress";
    const StressReport rep = stress_relaxation_report(op);
    res.checks.push_back({"decay rate", rep.rel_error < 1e-3,
                          "fitted " + num(rep.fitted_rate, "%.6f") + " vs l=2 eigenvalue " +
                              num(rep.slowest_rate, "%.6f") + " (rel " + num(rep.rel_error, "%.1e") + ")"});
    res.checks.push_back({"invariant drift", rep.max_drift == 0.0, "max drift " + num(rep.max_drift, "%.2e")});
    res.checks.push_back({"cascade", rep.cascade, ""});

    const int K = op.config().k_max();
    res.columns = {"t"};
    for (int k = 0; k <= K; ++k) res.columns.push_back("c_" + std::to_string(k) + "_2_0");
    std::vector<std::vector<double>> amp;
    for (int k = 0; k <= K; ++k) amp.push_back(rep.trace.amplitude(k, 2, 0));
    for (std::size_t i = 0; i < rep.trace.times.size(); ++i) {
        std::vector<std::string> row{num(rep.trace.times[i], "%.4f")};
        for (int k = 0; k <= K; ++k) row.push_back(num(amp[k][i], "%.15e"));
        res.rows.push_back(std::move(row));
    }
    return res;
}

SuiteResult validate_quadconv(int k_max, int l_max, double gamma, int threads) {
    SuiteResult res;
    res.suite = "quadconv";
    const QuadConvReport rep = quadrature_convergence(k_max, l_max, gamma, {0, 2, 4, 8, 16, 32}, 64, threads);
    res.checks.push_back({"monotone", rep.monotone, ""});
    double at32 = 1.0;
    for (const QuadConvPoint& p : rep.points)
        if (p.pad == 32) at32 = p.rel_linf;
    res.checks.push_back({"pad 32", at32 < 1e-12, num(at32, "%.2e") + " < 1e-12"});
    res.columns = {"pad", "rel_linf"};
    for (const QuadConvPoint& p : rep.points) res.rows.push_back({std::to_string(p.pad), num(p.rel_linf, "%.6e")});
    return res;
}

SuiteResult run_suite(const std::string& name, const FactorizedOperator& op, int threads) {
    if (name == "wcu") return validate_wcu(op);
    if (name == "bkw") return validate_bkw(op);
    if (name == "galilean") return validate_galilean(op);
    if (name == "viscosity") return validate_viscosity(op);
    if (name == "stress") return validate_stress(op);
    if (name == "quadconv") return validate_quadconv(op.config().k_max(), op.config().l_max(), op.config().gamma(), threads);
    throw DomainError("unknown suite '" + name + "'");
}

CoefficientField random_field(const SpectralConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    CoefficientField c(cfg);
    for (double& x : c.values()) x = dist(rng);
    c(0, 0) = 1.0;
    return c;
}

double relative_diff(const CoefficientField& a, const CoefficientField& b) {
    double d = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
        s = std::max({s, std::abs(a.values()[i]), std::abs(b.values()[i])});
    }
    return s > 0.0 ? d / s : d;
}

BenchResult bench_strategies(const FactorizedOperator& op, const std::vector<Strategy>& strategies, int repeats,
                             std::uint64_t seed, const DenseLimits& limits) {
    if (repeats < 1) throw DomainError("repeats must be >= 1");
    const SpectralConfig& cfg = op.config();
    std::vector<CoefficientField> fields;
    for (int r = 0; r < repeats; ++r) fields.push_back(random_field(cfg, seed + static_cast<std::uint64_t>(r)));

    DenseOperator dense;
    bool dense_ok = false;
    std::string dense_note;
    if (std::find(strategies.begin(), strategies.end(), Strategy::Dense) != strategies.end()) {
        try {
            dense = assemble_dense(op, limits);
            dense_ok = true;
        } catch (const CapacityError& e) {
            dense_note = e.what();
        }
    }

    auto apply = [&](Strategy s, const CoefficientField& c, FlopCounter* fc) {
        switch (s) {
            case Strategy::Dense: return q_dense(dense, c, fc);
            case Strategy::Naive: return q_naive(op, c, fc);
            case Strategy::RadialFirst: return q_radial_first(op, c, fc);
            case Strategy::AngularFirst: break;
        }
        return q_angular_first(op, c, fc);
    };

    BenchResult out;
    std::vector<CoefficientField> first;
    for (Strategy s : strategies) {
        StrategyTiming t;
        t.strategy = s;
        if (s == Strategy::Dense && !dense_ok) {
            t.skipped = true;
            t.note = dense_note;
            out.timings.push_back(t);
            continue;
        }
        first.push_back(apply(s, fields[0], &t.counter));
        std::vector<double> secs;
        for (const CoefficientField& c : fields) {
            const auto t0 = std::chrono::steady_clock::now();
            const CoefficientField q = apply(s, c, nullptr);
            const auto t1 = std::chrono::steady_clock::now();
            secs.push_back(std::chrono::duration<double>(t1 - t0).count());
            if (!std::isfinite(q.values()[0])) throw DivergenceError("non-finite contraction result");
        }
        t.median_seconds = median(secs);
        t.min_seconds = *std::min_element(secs.begin(), secs.end());
        out.timings.push_back(t);
    }
    for (std::size_t i = 0; i < first.size(); ++i)
        for (std::size_t j = i + 1; j < first.size(); ++j)
            out.max_rel_diff = std::max(out.max_rel_diff, relative_diff(first[i], first[j]));
    return out;
}

}  // namespace boltzfact
