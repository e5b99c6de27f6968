#include "boltzfact/kinematic.hpp"

#include "boltzfact/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

namespace boltzfact {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTiny = 1e-300;
}  // namespace

double vhs_kernel(double u, double cos_chi, double gamma) {
    if (u < 0.0) throw DomainError("vhs_kernel: negative relative speed");
    if (std::abs(cos_chi) > 1.0) throw DomainError("vhs_kernel: |cos chi| > 1");
    if (gamma == 0.0) return 1.0 / (4.0 * kPi);
    return std::pow(u, gamma) / (4.0 * kPi);
}

KinematicState KinematicState::patch1(double E, double rho, double t, bool swapped) {
    return {E, rho, rho * t, swapped};
}

KinematicState KinematicState::patch2(double E, double h, double t, bool swapped) {
    return {E, h * t, h, swapped};
}

double KinematicState::v() const { return std::sqrt(E) * (swapped ? 1.0 - rho : 1.0 + rho); }
double KinematicState::w() const { return std::sqrt(E) * (swapped ? 1.0 + rho : 1.0 - rho); }
double KinematicState::u() const {
    return 2.0 * std::sqrt(E) * std::sqrt(rho * rho + (1.0 - rho * rho) * h * h);
}
double KinematicState::sin_beta() const { return 2.0 * h * std::sqrt(std::max(0.0, 1.0 - h * h)); }
double KinematicState::beta() const { return 2.0 * std::asin(std::min(1.0, h)); }

namespace {

// Local scattering frame for v = v z, w = w (sin b, 0, cos b).
struct Frame {
    double u;
    Vec3 g;  // (v + w) / 2
    Vec3 uhat, e1, e2;
};

Frame make_frame(double v, double w, double cb, double sb) {
    Frame f;
    const double a = w * sb;
    const double b = v - w * cb;
    f.u = std::sqrt(a * a + b * b);
    f.g = {0.5 * a, 0.0, 0.5 * (v + w * cb)};
    if (f.u < kTiny) {
        f.uhat = {0.0, 0.0, 1.0};
        f.e1 = {1.0, 0.0, 0.0};
        f.e2 = {0.0, 1.0, 0.0};
        return f;
    }
    f.uhat = {-a / f.u, 0.0, b / f.u};
    if (a > 0.0) {
        f.e1 = {b / f.u, 0.0, a / f.u};
        f.e2 = {0.0, 1.0, 0.0};
    } else {
        // u parallel to z: tie-break e1 = x, e2 = uhat x e1
        f.e1 = {1.0, 0.0, 0.0};
        f.e2 = {0.0, f.uhat[2], 0.0};
    }
    return f;
}

Vec3 scatter(const Frame& f, double cc, double sc, double ce, double se) {
    const double hu = 0.5 * f.u;
    Vec3 out;
    for (int i = 0; i < 3; ++i)
        out[i] = f.g[i] + hu * (cc * f.uhat[i] + sc * (ce * f.e1[i] + se * f.e2[i]));
    return out;
}

}  // namespace

PostCollision post_collision_direction(double v, double w, double beta, double chi, double eps) {
    if (v < 0.0 || w < 0.0) throw DomainError("post_collision_direction: negative speed");
    const double cb = std::cos(beta), sb = std::sin(beta);
    const Frame f = make_frame(v, w, cb, sb);
    PostCollision pc;
    const Vec3 vv{0.0, 0.0, v};
    const Vec3 ww{w * sb, 0.0, w * cb};
    if (f.u < kTiny) {
        pc.v_prime = vv;
        pc.w_prime = ww;
    } else {
        pc.v_prime = scatter(f, std::cos(chi), std::sin(chi), std::cos(eps), std::sin(eps));
        for (int i = 0; i < 3; ++i) pc.w_prime[i] = vv[i] + ww[i] - pc.v_prime[i];
    }
    const Vec3& p = pc.v_prime;
    pc.speed = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    if (pc.speed > 0.0)
        pc.direction = {p[0] / pc.speed, p[1] / pc.speed, p[2] / pc.speed};
    return pc;
}

FilterValue gain_filter(const Channel& ch, const Vec3& vhp, double beta) {
    const auto [l1, l2, l3] = ch;
    const Vec3 wd{std::sin(beta), 0.0, std::cos(beta)};
    const double z2 = std::sqrt((2.0 * l2 + 1.0) / (4.0 * kPi));
    std::complex<double> acc = 0.0;
    for (int m = -std::min(l1, l3); m <= std::min(l1, l3); ++m) {
        const double tj = wigner3j(l1, l2, l3, m, 0, -m);
        if (tj == 0.0) continue;
        acc += tj * complex_sph_harm(l1, m, vhp) * complex_sph_harm(l3, -m, wd);
    }
    acc *= z2;
    return {acc.real(), std::abs(acc.imag())};
}

double loss_filter(const Channel& ch, double beta) {
    const auto [l1, l2, l3] = ch;
    const double tj = wigner3j(l1, l2, l3, 0, 0, 0);
    if (tj == 0.0) return 0.0;
    const double z1 = std::sqrt((2.0 * l1 + 1.0) / (4.0 * kPi));
    const double z2 = std::sqrt((2.0 * l2 + 1.0) / (4.0 * kPi));
    const double y3 = real_sph_harm(l3, 0, Vec3{std::sin(beta), 0.0, std::cos(beta)});
    return z1 * z2 * tj * y3;
}

double scattering_manifold(const KinematicState& s, const Channel& ch, int k1, const Rule1D& chi_rule,
                           const Rule1D& eps_rule, double gamma) {
    const double v = s.v(), w = s.w(), beta = s.beta();
    const double u = s.u();
    if (u < kTiny) return 0.0;
    const double loss = 2.0 * kPi * radial_eval(k1, ch.l1, v) * loss_filter(ch, beta);
    double total = 0.0;
    for (std::size_t i = 0; i < chi_rule.size(); ++i) {
        const double cc = chi_rule.nodes[i];
        const double chi = std::acos(std::clamp(cc, -1.0, 1.0));
        const double B = vhs_kernel(u, cc, gamma);
        double gain = 0.0;
        for (std::size_t j = 0; j < eps_rule.size(); ++j) {
            const PostCollision pc = post_collision_direction(v, w, beta, chi, eps_rule.nodes[j]);
            gain += eps_rule.weights[j] * radial_eval(k1, ch.l1, pc.speed) *
                    gain_filter(ch, pc.direction, beta).value;
        }
        total += chi_rule.weights[i] * B * (gain - loss);
    }
    return total;
}

double channel_constant(const Channel& ch) {
    const double prod = (2.0 * ch.l1 + 1.0) * (2.0 * ch.l2 + 1.0) * (2.0 * ch.l3 + 1.0);
    const double tj = wigner3j(ch.l1, ch.l2, ch.l3, 0, 0, 0);
    if (tj == 0.0) throw DomainError("channel_constant: channel violates the selection rules");
    return 8.0 * kPi * kPi / (std::sqrt(prod / (4.0 * kPi)) * tj);
}

ManifoldEvaluator::ManifoldEvaluator(const SpectralConfig& cfg, const ChannelTable& channels, int n_chi,
                                     int n_eps)
    : K_(cfg.k_max()), L_(cfg.l_max()), nk_(cfg.n_k()), gamma_(cfg.gamma()), channels_(&channels),
      chi_(gauss_legendre(n_chi)), eps_(trapezoid_periodic(n_eps)) {
    if (channels.l_max() != L_) throw ConfigurationError("channel table does not match l_max");
    for (double c : chi_.nodes) {
        cos_chi_.push_back(c);
        sin_chi_.push_back(std::sqrt(std::max(0.0, 1.0 - c * c)));
    }
    for (double e : eps_.nodes) {
        cos_eps_.push_back(std::cos(e));
        sin_eps_.push_back(std::sin(e));
    }
    norms_.resize(static_cast<std::size_t>(L_ + 1) * nk_);
    for (int l = 0; l <= L_; ++l)
        for (int k = 0; k <= K_; ++k) norms_[l * nk_ + k] = radial_norm(k, l);
    const std::size_t nl = legendre_index(L_, L_) + 1;
    leg_a_.assign(nl, 0.0);
    leg_b_.assign(nl, 0.0);
    for (int m = 0; m <= L_; ++m)
        for (int l = m + 2; l <= L_; ++l) {
            const double l2 = double(l) * l, m2 = double(m) * m, lp = l - 1.0;
            leg_a_[legendre_index(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
            leg_b_[legendre_index(l, m)] = std::sqrt((lp * lp - m2) / (4.0 * lp * lp - 1.0));
        }
    leg_diag_.assign(L_ + 1, 0.0);
    leg_sub_.assign(L_ + 1, 0.0);
    for (int m = 1; m <= L_; ++m) leg_diag_[m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
    for (int m = 0; m <= L_; ++m) leg_sub_[m] = std::sqrt(2.0 * m + 3.0);
    lag_c1_.resize(norms_.size());
    lag_c2_.resize(norms_.size());
    lag_c3_.resize(norms_.size());
    for (int l = 0; l <= L_; ++l)
        for (int k = 0; k <= K_; ++k) {
            const double a = l + 0.5;
            lag_c1_[l * nk_ + k] = (2.0 * k + 1.0 + a) / (k + 1.0);
            lag_c2_[l * nk_ + k] = 1.0 / (k + 1.0);
            lag_c3_[l * nk_ + k] = (k + a) / (k + 1.0);
        }
    for (int l = 0; l <= L_; ++l) zonal_.push_back(std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)));
    for (const Channel& ch : channels.channels()) {
        tj_offset_.push_back(tj_.size());
        for (int m = 0; m <= std::min(ch.l1, ch.l3); ++m) tj_.push_back(wigner3j(ch.l1, ch.l2, ch.l3, m, 0, -m));
    }
    rad_.resize(norms_.size());
    rad_v_.resize(norms_.size());
    leg_.resize(nl);
    leg_beta_.resize(nl);
    cosm_.resize(L_ + 1);
    sinm_.resize(L_ + 1);
    S_.resize(nl * nk_);
}

void ManifoldEvaluator::radial_all(double v, double* out) const {
    const double x = 0.5 * v * v;
    double vl = 1.0;
    for (int l = 0; l <= L_; ++l) {
        double lm1 = 0.0, lk = 1.0;
        const std::size_t base = static_cast<std::size_t>(l) * nk_;
        const double* nrm = norms_.data() + base;
        const double* c1 = lag_c1_.data() + base;
        const double* c2 = lag_c2_.data() + base;
        const double* c3 = lag_c3_.data() + base;
        double* row = out + base;
        for (int k = 0; k <= K_; ++k) {
            row[k] = nrm[k] * vl * lk;
            const double next = (c1[k] - x * c2[k]) * lk - c3[k] * lm1;
            lm1 = lk;
            lk = next;
        }
        vl *= v;
    }
}

void ManifoldEvaluator::legendre_all(double x, double s, double* out) const {
    out[0] = 0.5 / std::sqrt(kPi);
    for (int m = 1; m <= L_; ++m) out[legendre_index(m, m)] = leg_diag_[m] * s * out[legendre_index(m - 1, m - 1)];
    for (int m = 0; m < L_; ++m) out[legendre_index(m + 1, m)] = leg_sub_[m] * x * out[legendre_index(m, m)];
    for (int m = 0; m <= L_; ++m)
        for (int l = m + 2; l <= L_; ++l) {
            const std::size_t i = legendre_index(l, m);
            out[i] = leg_a_[i] * (x * out[legendre_index(l - 1, m)] - leg_b_[i] * out[legendre_index(l - 2, m)]);
        }
}

void ManifoldEvaluator::evaluate(const KinematicState& st, double kernel_scale, std::span<double> out) {
    const int n_t = channels_->size();
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n_t) * nk_, 0.0);
    const double v = st.v(), w = st.w(), cb = st.cos_beta(), sb = st.sin_beta();
    const Frame f = make_frame(v, w, cb, sb);
    const double u = st.u();
    if (u < kTiny) return;

    std::fill(S_.begin(), S_.end(), 0.0);
    double b_sum = 0.0;
    for (std::size_t i = 0; i < chi_.size(); ++i) {
        const double B = vhs_kernel(u, cos_chi_[i], gamma_) * kernel_scale * chi_.weights[i];
        b_sum += B;
        for (std::size_t j = 0; j < eps_.size(); ++j) {
            const Vec3 p = scatter(f, cos_chi_[i], sin_chi_[i], cos_eps_[j], sin_eps_[j]);
            const double rxy2 = p[0] * p[0] + p[1] * p[1];
            const double rxy = std::sqrt(rxy2);
            const double sp = std::sqrt(rxy2 + p[2] * p[2]);
            radial_all(sp, rad_.data());
            double ct = 1.0, stt = 0.0, cp = 1.0, sph = 0.0;
            if (sp > 0.0) {
                ct = p[2] / sp;
                stt = rxy / sp;
            }
            if (rxy > 0.0) {
                cp = p[0] / rxy;
                sph = p[1] / rxy;
            }
            legendre_all(ct, stt, leg_.data());
            cosm_[0] = 1.0;
            sinm_[0] = 0.0;
            for (int m = 1; m <= L_; ++m) {
                cosm_[m] = cosm_[m - 1] * cp - sinm_[m - 1] * sph;
                sinm_[m] = sinm_[m - 1] * cp + cosm_[m - 1] * sph;
            }
            const double wgt = B * eps_.weights[j];
            for (int l = 0; l <= L_; ++l) {
                const double* rl = rad_.data() + l * nk_;
                for (int m = 0; m <= l; ++m) {
                    const std::size_t idx = legendre_index(l, m);
                    const double pm = wgt * leg_[idx] * cosm_[m];
                    double* s = S_.data() + idx * nk_;
                    for (int k = 0; k < nk_; ++k) s[k] += pm * rl[k];
                }
            }
        }
    }

    legendre_all(cb, sb, leg_beta_.data());
    radial_all(v, rad_v_.data());
    const double loss_pref = 2.0 * kPi * b_sum;
    for (int tau = 0; tau < n_t; ++tau) {
        const auto [l1, l2, l3] = (*channels_)[tau];
        const double* tj = tj_.data() + tj_offset_[tau];
        const int mmax = std::min(l1, l3);
        const double z2 = zonal_[l2];
        const double loss_ang = loss_pref * zonal_[l1] * z2 * tj[0] * leg_beta_[legendre_index(l3, 0)];
        double* o = out.data() + static_cast<std::size_t>(tau) * nk_;
        for (int m = 0; m <= mmax; ++m) {
            double c = tj[m] * leg_beta_[legendre_index(l3, m)] * z2;
            if (m > 0) c *= (m % 2) ? -2.0 : 2.0;
            const double* s = S_.data() + legendre_index(l1, m) * nk_;
            for (int k = 0; k < nk_; ++k) o[k] += c * s[k];
        }
        const double* rv = rad_v_.data() + l1 * nk_;
        for (int k = 0; k < nk_; ++k) o[k] -= loss_ang * rv[k];
    }
}

RTensor::RTensor(int n_k, int n_t, double gamma, const GridSpec& grid)
    : n_k_(n_k), n_t_(n_t), gamma_(gamma), grid_(grid),
      values_(static_cast<std::size_t>(n_k) * n_k * n_k * n_t, 0.0) {}

namespace {

// P[tau, k1, k2, k3] += coef[tau, k1] * phi_{k2,l2}(v) * phi_{k3,l3}(w)
void outer_accumulate(const ChannelTable& channels, int nk, const double* coef, const double* rad_v,
                      const double* rad_w, double* P) {
    const std::size_t blk = static_cast<std::size_t>(nk) * nk * nk;
    for (int tau = 0; tau < channels.size(); ++tau) {
        const auto& ch = channels[tau];
        const double* rv = rad_v + ch.l2 * nk;
        const double* rw = rad_w + ch.l3 * nk;
        double* p = P + tau * blk;
        for (int k1 = 0; k1 < nk; ++k1) {
            const double a = coef[tau * nk + k1];
            if (a == 0.0) continue;
            for (int k2 = 0; k2 < nk; ++k2) {
                const double b = a * rv[k2];
                double* row = p + (static_cast<std::size_t>(k1) * nk + k2) * nk;
                for (int k3 = 0; k3 < nk; ++k3) row[k3] += b * rw[k3];
            }
        }
    }
}

}  // namespace

RTensor assemble_r_tensor(const SpectralConfig& cfg, const GridSpec& grid, const ChannelTable& channels,
                          const AssemblyOptions& opts) {
    validate_grid(grid, cfg.k_max(), cfg.l_max());
    if (channels.l_max() != cfg.l_max()) throw ConfigurationError("channel table does not match l_max");
    const int nk = cfg.n_k(), nt = channels.size(), L = cfg.l_max(), K = cfg.k_max();
    const double gamma = cfg.gamma();

    const Rule1D rE = gauss_laguerre_gen(grid.n_E, 0.5 * gamma);
    const Rule1D r_rho = gauss_legendre(grid.n_rho1, 0.0, 1.0);
    const Rule1D r_t1 = gauss_legendre(grid.n_t1, 0.0, 1.0);
    const Rule1D r_h = gauss_legendre(grid.n_h2, 0.0, 1.0);
    const Rule1D r_t2 = gauss_legendre(grid.n_t2, 0.0, 1.0);

    std::vector<double> kappa(nt);
    for (int tau = 0; tau < nt; ++tau) kappa[tau] = channel_constant(channels[tau]);

    RTensor R(nk, nt, gamma, grid);
    const std::size_t total = R.values().size();
    const int n_E = grid.n_E;
    std::vector<std::vector<double>> partial(n_E);
    const double mm_pref = 1.0 / std::pow(2.0 * kPi, 3.0);

    auto work_energy = [&](int e, ManifoldEvaluator& ev) {
        std::vector<double>& P = partial[e];
        P.assign(total, 0.0);
        const double E = rE.nodes[e];
        const double scale = gamma == 0.0 ? 1.0 : std::pow(E, -0.5 * gamma);
        const std::size_t nc = static_cast<std::size_t>(nt) * nk;
        std::vector<double> A(nc), acc[2] = {std::vector<double>(nc), std::vector<double>(nc)};
        std::vector<double> rv((L + 1) * nk), rw((L + 1) * nk), coef(nc);
        auto common = [&](double rho) {
            const double q = 1.0 - rho * rho;
            return rE.weights[e] * E * E * q * q * mm_pref * std::exp(-E * rho * rho);
        };
        auto finish = [&](const KinematicState& st, const std::vector<double>& a, double W) {
            for (std::size_t i = 0; i < nc; ++i) coef[i] = a[i] * W * kappa[i / nk];
            radial_eval_all(K, L, st.v(), rv);
            radial_eval_all(K, L, st.w(), rw);
            outer_accumulate(channels, nk, coef.data(), rv.data(), rw.data(), P.data());
        };
        // Patch 1: rho > h, h = rho t; the radial factors do not depend on t
        for (std::size_t i = 0; i < r_rho.size(); ++i) {
            const double rho = r_rho.nodes[i];
            for (int o = 0; o < 2; ++o) std::fill(acc[o].begin(), acc[o].end(), 0.0);
            for (std::size_t j = 0; j < r_t1.size(); ++j) {
                const double t = r_t1.nodes[j];
                const double jac = r_t1.weights[j] * 4.0 * rho * rho * t;
                for (int o = 0; o < 2; ++o) {
                    ev.evaluate(KinematicState::patch1(E, rho, t, o == 1), scale, A);
                    for (std::size_t c = 0; c < nc; ++c) acc[o][c] += jac * A[c];
                }
            }
            const double W = r_rho.weights[i] * common(rho);
            for (int o = 0; o < 2; ++o) finish(KinematicState::patch1(E, rho, 0.0, o == 1), acc[o], W);
        }
        // Patch 2: h > rho, rho = h t; radial states change with every node
        for (std::size_t i = 0; i < r_h.size(); ++i) {
            const double h = r_h.nodes[i];
            for (std::size_t j = 0; j < r_t2.size(); ++j) {
                const double t = r_t2.nodes[j];
                const double rho = h * t;
                const double W = r_h.weights[i] * r_t2.weights[j] * 4.0 * h * h * common(rho);
                for (int o = 0; o < 2; ++o) {
                    const KinematicState st = KinematicState::patch2(E, h, t, o == 1);
                    ev.evaluate(st, scale, A);
                    finish(st, A, W);
                }
            }
        }
    };

    const int n_threads = std::max(1, std::min(opts.threads, n_E));
    if (n_threads == 1) {
        ManifoldEvaluator ev(cfg, channels, grid.n_chi, grid.n_eps);
        for (int e = 0; e < n_E; ++e) work_energy(e, ev);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                ManifoldEvaluator ev(cfg, channels, grid.n_chi, grid.n_eps);
                for (int e = next++; e < n_E; e = next++) work_energy(e, ev);
            });
        for (auto& th : pool) th.join();
    }
    // reduce in energy order so the result does not depend on the thread count
    auto vals = R.values();
    for (int e = 0; e < n_E; ++e) {
        for (std::size_t i = 0; i < total; ++i) vals[i] += partial[e][i];
        std::vector<double>().swap(partial[e]);
    }
    if (opts.symmetrize) symmetrize_r_tensor(R, channels);
    return R;
}

void symmetrize_r_tensor(RTensor& r, const ChannelTable& channels) {
    const int nk = r.n_k();
    RTensor copy = r;
    for (int tau = 0; tau < channels.size(); ++tau) {
        const auto& ch = channels[tau];
        const int sw = channels.index(ch.l1, ch.l3, ch.l2);
        for (int k1 = 0; k1 < nk; ++k1)
            for (int k2 = 0; k2 < nk; ++k2)
                for (int k3 = 0; k3 < nk; ++k3)
                    r(k1, k2, k3, tau) = 0.5 * (copy(k1, k2, k3, tau) + copy(k1, k3, k2, sw));
    }
    r.flags().symmetrized = true;
}

double apply_conservation(RTensor& r, const ChannelTable& channels) {
    const int nk = r.n_k();
    double max_abs = 0.0;
    auto zero_row = [&](int k1, int tau) {
        for (int k2 = 0; k2 < nk; ++k2)
            for (int k3 = 0; k3 < nk; ++k3) {
                double& x = r(k1, k2, k3, tau);
                max_abs = std::max(max_abs, std::abs(x));
                x = 0.0;
            }
    };
    for (int tau = 0; tau < channels.size(); ++tau) {
        const int l1 = channels[tau].l1;
        if (l1 <= 1) zero_row(0, tau);               // mass (l1 = 0) and momentum (l1 = 1)
        if (l1 == 0 && nk > 1) zero_row(1, tau);     // energy
    }
    r.flags().conservation = true;
    r.max_conservation_correction = std::max(r.max_conservation_correction, max_abs);
    return max_abs;
}

double apply_detailed_balance(RTensor& r, const ChannelTable& channels) {
    const int tau = channels.index(0, 0, 0);
    double max_abs = 0.0;
    for (int k1 = 0; k1 < r.n_k(); ++k1) {
        double& x = r(k1, 0, 0, tau);
        max_abs = std::max(max_abs, std::abs(x));
        x = 0.0;
    }
    r.flags().detailed_balance = true;
    r.max_balance_correction = std::max(r.max_balance_correction, max_abs);
    return max_abs;
}

}  // namespace boltzfact
