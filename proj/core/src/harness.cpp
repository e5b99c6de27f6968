#include "boltzfact/harness.hpp"

#include "boltzfact/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace boltzfact {

namespace {

constexpr double kPi = std::numbers::pi;

void axpy(double a, const CoefficientField& x, CoefficientField& y) {
    auto xs = x.values();
    auto ys = y.values();
    for (std::size_t i = 0; i < ys.size(); ++i) ys[i] += a * xs[i];
}

bool all_finite(const CoefficientField& c) {
    for (double x : c.values())
        if (!std::isfinite(x)) return false;
    return true;
}

// Indices of the (l, m) radial column of a flattened field.
std::vector<int> block_indices(const SpectralConfig& cfg, int l, int m, int k_last) {
    std::vector<int> idx;
    for (int k = 0; k <= k_last; ++k) idx.push_back(state_index(k, l, m, cfg));
    return idx;
}

Eigen::MatrixXd sub_block(const Eigen::MatrixXd& L, const std::vector<int>& idx) {
    const int n = static_cast<int>(idx.size());
    Eigen::MatrixXd B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = L(idx[i], idx[j]);
    return B;
}

std::vector<double> sorted_real_eigenvalues(const Eigen::MatrixXd& B) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(B, false);
    std::vector<double> ev;
    for (int i = 0; i < B.rows(); ++i) ev.push_back(es.eigenvalues()[i].real());
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

// Fit window: second half of the recorded trajectory.
double late_slope(const EvolutionTrace& tr, const std::vector<double>& y) {
    std::vector<double> t, v;
    const double t0 = 0.5 * tr.times.back();
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        if (tr.times[i] >= t0 && y[i] != 0.0) {
            t.push_back(tr.times[i]);
            v.push_back(y[i]);
        }
    return fit_log_slope(t, v);
}

}  // namespace

double EvolutionTrace::max_moment_drift() const {
    double d = 0.0;
    if (moments.empty()) return d;
    const Moments& m0 = moments.front();
    for (const Moments& m : moments) {
        d = std::max(d, std::abs(m.mass - m0.mass));
        d = std::max(d, std::abs(m.energy - m0.energy));
        for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(m.momentum[i] - m0.momentum[i]));
    }
    return d;
}

std::vector<double> EvolutionTrace::amplitude(int k, int l, int m) const {
    std::vector<double> a;
    a.reserve(snapshots.size());
    for (const CoefficientField& c : snapshots) a.push_back(c.at(k, l, m));
    return a;
}

EvolutionTrace rk4_integrate(const FactorizedOperator& op, const CoefficientField& c0, double dt, int n_steps,
                             int record_every) {
    if (!(dt > 0.0) || n_steps < 0) throw DomainError("rk4_integrate: need dt > 0 and n_steps >= 0");
    if (record_every < 1) record_every = 1;
    EvolutionTrace tr;
    CoefficientField c = c0;
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.snapshots.push_back(c);
        tr.moments.push_back(moments(c));
    };
    record(0.0);
    for (int s = 1; s <= n_steps; ++s) {
        const CoefficientField k1 = q_angular_first(op, c);
        CoefficientField tmp = c;
        axpy(0.5 * dt, k1, tmp);
        const CoefficientField k2 = q_angular_first(op, tmp);
        tmp = c;
        axpy(0.5 * dt, k2, tmp);
        const CoefficientField k3 = q_angular_first(op, tmp);
        tmp = c;
        axpy(dt, k3, tmp);
        const CoefficientField k4 = q_angular_first(op, tmp);
        auto cv = c.values();
        auto a = k1.values(), b = k2.values(), d = k3.values(), e = k4.values();
        for (std::size_t i = 0; i < cv.size(); ++i) cv[i] += dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * d[i] + e[i]);
        if (!all_finite(c))
            throw DivergenceError("non-finite coefficients at step " + std::to_string(s) + " (t = " +
                                  std::to_string(s * dt) + "); reduce dt");
        if (s % record_every == 0 || s == n_steps) record(s * dt);
    }
    return tr;
}

Spectrum linearized_spectrum(const FactorizedOperator& op) {
    const Eigen::MatrixXd L = linearize(op, CoefficientField::equilibrium(op.config()));
    Eigen::EigenSolver<Eigen::MatrixXd> es(L, false);
    Spectrum s;
    s.norm = L.norm();
    std::vector<double> ev;
    for (int i = 0; i < L.rows(); ++i) {
        ev.push_back(es.eigenvalues()[i].real());
        s.max_imag = std::max(s.max_imag, std::abs(es.eigenvalues()[i].imag()));
    }
    std::sort(ev.rbegin(), ev.rend());
    s.real = Eigen::Map<Eigen::VectorXd>(ev.data(), static_cast<Eigen::Index>(ev.size()));
    return s;
}

CoefficientField project_isotropic(const std::function<double(double)>& g, const SpectralConfig& cfg, int order) {
    if (order <= 0) order = 64;
    const Rule1D rule = gauss_laguerre_gen(order, 0.5);
    CoefficientField c(cfg);
    // c_k = sqrt(4 pi) int M g phi_k0 v^2 dv, x = v^2/2
    const double pref = std::sqrt(4.0 * kPi) * std::sqrt(2.0) / std::pow(2.0 * kPi, 1.5);
    std::vector<double> rad(cfg.n_k());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double v = std::sqrt(2.0 * rule.nodes[i]);
        radial_eval_all(cfg.k_max(), 0, v, rad);
        const double wg = pref * rule.weights[i] * g(v);
        for (int k = 0; k < cfg.n_k(); ++k) c(k, 0) += wg * rad[k];
    }
    return c;
}

CoefficientField bkw_coefficients(const SpectralConfig& cfg, double t, double rate, double k0) {
    if (t < 0.0 || !(rate > 0.0)) throw DomainError("bkw_coefficients: need t >= 0 and rate > 0");
    const double K = 1.0 - (1.0 - k0) * std::exp(-rate * t);
    if (!(K > 0.6)) throw DomainError("BKW temperature parameter must exceed 3/5 for a positive distribution");
    if (K == 1.0) return CoefficientField::equilibrium(cfg);
    // f/M = K^{-3/2} exp(x (1 - 1/K)) [(5K - 3)/(2K) + (1 - K) x / K^2], x = v^2/2
    return project_isotropic(
        [K](double v) {
            const double x = 0.5 * v * v;
            return std::pow(K, -1.5) * std::exp(x * (1.0 - 1.0 / K)) *
                   ((5.0 * K - 3.0) / (2.0 * K) + (1.0 - K) * x / (K * K));
        },
        cfg, 96);
}

double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = std::min(t.size(), y.size());
    if (n < 2) return 0.0;
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ly = std::log(std::abs(y[i]));
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sty - st * sy) / (dn * stt - st * st);
}

BkwReport run_bkw_benchmark(const FactorizedOperator& op, double k0, double t_end, double dt) {
    const SpectralConfig& cfg = op.config();
    if (cfg.gamma() != 0.0) throw ConfigurationError("the BKW solution requires Maxwell molecules (gamma = 0)");
    if (cfg.k_max() < 2) throw ConfigurationError("the BKW benchmark needs k_max >= 2");
    BkwReport rep;
    const int n_steps = static_cast<int>(std::lround(t_end / dt));
    // the initial state does not depend on the rate
    rep.trace = rk4_integrate(op, bkw_coefficients(cfg, 0.0, 1.0, k0), dt, n_steps);
    const EvolutionTrace& tr = rep.trace;
    rep.max_drift = tr.max_moment_drift();

    // c_2 is proportional to (1 - K)^2, so its log-slope is -2 rate
    const std::vector<double> c2 = tr.amplitude(2, 0, 0);
    for (std::size_t i = 1; i < c2.size(); ++i)
        if (std::abs(c2[i]) > std::abs(c2[i - 1])) rep.fit_ok = false;
    rep.rate_fit = -0.5 * late_slope(tr, c2);
    if (!(rep.rate_fit > 0.0)) {
        rep.fit_ok = false;
        return rep;
    }

    const Eigen::MatrixXd L = linearize(op, CoefficientField::equilibrium(cfg));
    const std::vector<double> iso = sorted_real_eigenvalues(sub_block(L, block_indices(cfg, 0, 0, cfg.k_max())));
    rep.rate_eigen = 0.5 * std::abs(iso[2]);

    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const CoefficientField ref = bkw_coefficients(cfg, tr.times[i], rep.rate_fit, k0);
        auto a = tr.snapshots[i].values();
        auto b = ref.values();
        for (std::size_t j = 0; j < a.size(); ++j) rep.max_deviation = std::max(rep.max_deviation, std::abs(a[j] - b[j]));
    }
    for (int k = 2; k <= cfg.k_max(); ++k) {
        BkwModeRate m;
        m.k = k;
        m.fitted_rate = -late_slope(tr, tr.amplitude(k, 0, 0));
        m.linearized_rate = std::abs(iso[k]);
        m.rel_error = std::abs(m.fitted_rate - m.linearized_rate) / m.linearized_rate;
        rep.modes.push_back(m);
    }
    return rep;
}

WcuReport wcu_spectrum_report(const FactorizedOperator& op, double zero_tol) {
    WcuReport rep;
    rep.spectrum = linearized_spectrum(op);
    const Eigen::VectorXd& ev = rep.spectrum.real;
    const double big = ev.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i]) > 1e-8 * big) {
            rep.lambda_ref = ev[i];
            break;
        }
    if (rep.lambda_ref == 0.0) return rep;
    const double ref = std::abs(rep.lambda_ref);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        rep.ratios.push_back(ev[i] / ref);
        if (std::abs(ev[i]) / ref < zero_tol) ++rep.n_zero;
    }
    for (double r : rep.ratios) {
        if (!rep.groups.empty()) {
            WcuGroup& g = rep.groups.back();
            const double scale = std::max(std::abs(g.ratio), 1.0);
            if (std::abs(r - g.ratio) <= 1e-8 * scale) {
                ++g.multiplicity;
                continue;
            }
        }
        rep.groups.push_back({r, 1});
    }
    for (WcuGroup& g : rep.groups)
        if (std::abs(g.ratio) < zero_tol) g.ratio = 0.0;
    return rep;
}

CoefficientField shifted_maxwellian(const SpectralConfig& cfg, const Vec3& u, int order) {
    if (order <= 0) order = std::max(default_projection_order(cfg), 48);
    const double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    return project_ratio(
        [&](const Vec3& v) { return std::exp(v[0] * u[0] + v[1] * u[1] + v[2] * u[2] - 0.5 * u2); }, cfg, order);
}

GalileanReport galilean_report(const FactorizedOperator& op, const Vec3& u, int steps, double dt) {
    const SpectralConfig& cfg = op.config();
    GalileanReport rep;
    rep.u = u;
    const CoefficientField c = shifted_maxwellian(cfg, u);
    rep.moments = moments(c);
    const CoefficientField q = q_angular_first(op, c);
    double s = 0.0;
    for (double x : q.values()) s += x * x;
    rep.collision_l2 = std::sqrt(s);

    // weighted residual of the reconstruction, integrated on a finer rule
    const double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    const VelocityRule vr = maxwellian_velocity_rule(std::max(default_projection_order(cfg), 48) + 8);
    long double r2 = 0.0L;
    for (std::size_t i = 0; i < vr.points.size(); ++i) {
        const Vec3& v = vr.points[i];
        const double g = std::exp(v[0] * u[0] + v[1] * u[1] + v[2] * u[2] - 0.5 * u2);
        const double d = g - evaluate_ratio(c, v);
        r2 += vr.weights[i] * d * d;
    }
    rep.truncation_l2 = std::sqrt(static_cast<double>(r2));
    rep.conservation_err = rk4_integrate(op, c, dt, steps).max_moment_drift();
    return rep;
}

double chapman_enskog_fmu(const Eigen::MatrixXd& L, const SpectralConfig& cfg, int k_trunc, int m) {
    if (cfg.l_max() < 2) throw ConfigurationError("viscosity needs l_max >= 2");
    if (k_trunc < 0 || k_trunc > cfg.k_max()) throw DomainError("k_trunc must lie in [0, k_max]");
    if (m < -2 || m > 2) throw DomainError("quadrupole component m must lie in [-2, 2]");
    // source: projection of the traceless quadrupole v^2 Y_{2m}(v/|v|)
    const CoefficientField src = project_ratio(
        [m](const Vec3& v) {
            const double s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if (s2 == 0.0) return 0.0;
            const double s = std::sqrt(s2);
            return s2 * real_sph_harm(2, m, Vec3{v[0] / s, v[1] / s, v[2] / s});
        },
        cfg);
    auto mu = [&](int kt) {
        const std::vector<int> idx = block_indices(cfg, 2, m, kt);
        const Eigen::MatrixXd B = sub_block(L, idx);
        Eigen::VectorXd s(static_cast<Eigen::Index>(idx.size()));
        for (int k = 0; k <= kt; ++k) s[k] = src(k, angular_index(2, m));
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (!lu.isInvertible()) throw DomainError("singular l = 2 block in the viscosity inversion");
        return -s.dot(lu.solve(s));
    };
    const double mu0 = mu(0);
    return k_trunc == 0 ? mu0 / mu0 : mu(k_trunc) / mu0;
}

double chapman_enskog_fmu(const FactorizedOperator& op, int k_trunc, int m) {
    return chapman_enskog_fmu(linearize(op, CoefficientField::equilibrium(op.config())), op.config(), k_trunc, m);
}

StressReport stress_relaxation_report(const FactorizedOperator& op, double amplitude, double t_end, double dt) {
    const SpectralConfig& cfg = op.config();
    if (cfg.l_max() < 2) throw ConfigurationError("stress relaxation needs l_max >= 2");
    StressReport rep;
    rep.amplitude = amplitude;
    CoefficientField c0 = CoefficientField::equilibrium(cfg);
    c0.at(0, 2, 0) += amplitude;
    rep.trace = rk4_integrate(op, c0, dt, static_cast<int>(std::lround(t_end / dt)));
    rep.max_drift = rep.trace.max_moment_drift();
    rep.fitted_rate = -late_slope(rep.trace, rep.trace.amplitude(0, 2, 0));

    const Eigen::MatrixXd L = linearize(op, CoefficientField::equilibrium(cfg));
    const Eigen::MatrixXd B = sub_block(L, block_indices(cfg, 2, 0, cfg.k_max()));
    const std::vector<double> ev = sorted_real_eigenvalues(B);
    rep.slowest_rate = std::abs(ev.front());
    rep.ce_rate = 1.0 / (-B).fullPivLu().inverse()(0, 0);
    rep.rel_error = std::abs(rep.fitted_rate - rep.slowest_rate) / rep.slowest_rate;

    rep.cascade = cfg.k_max() >= 1;
    for (int k = 1; k <= cfg.k_max(); ++k) {
        const std::vector<double> a = rep.trace.amplitude(k, 2, 0);
        std::size_t peak = 0;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i]) > std::abs(a[peak])) peak = i;
        rep.cascade_peak.push_back(a[peak]);
        const bool rises = a.front() == 0.0 && std::abs(a[peak]) > 0.0 && peak > 0;
        const bool decays = peak + 1 < a.size() && std::abs(a.back()) < 0.5 * std::abs(a[peak]);
        rep.cascade = rep.cascade && rises && decays;
    }
    return rep;
}

QuadConvReport quadrature_convergence(int k_max, int l_max, double gamma, const std::vector<int>& pads, int ref_pad,
                                      int threads) {
    QuadConvReport rep;
    rep.k_max = k_max;
    rep.l_max = l_max;
    rep.gamma = gamma;
    rep.ref_pad = ref_pad;
    const SpectralConfig cfg(k_max, l_max, gamma);
    const ChannelTable ch(l_max);
    AssemblyOptions ao;
    ao.threads = threads;
    const RTensor ref = assemble_r_tensor(cfg, grid_sizes(k_max, l_max, ref_pad, ref_pad), ch, ao);
    double scale = 0.0;
    for (double x : ref.values()) scale = std::max(scale, std::abs(x));
    for (int p : pads) {
        const RTensor r = assemble_r_tensor(cfg, grid_sizes(k_max, l_max, p, p), ch, ao);
        double err = 0.0;
        for (std::size_t i = 0; i < r.values().size(); ++i) err = std::max(err, std::abs(r.values()[i] - ref.values()[i]));
        rep.points.push_back({p, err / scale});
    }
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.points.size(); ++i)
        if (rep.points[i].rel_linf > rep.points[i - 1].rel_linf) rep.monotone = false;
    return rep;
}

}  // namespace boltzfact
