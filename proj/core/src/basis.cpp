#include "boltzfact/basis.hpp"

#include "boltzfact/error.hpp"
#include "boltzfact/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace boltzfact {

namespace {
constexpr double kPi = std::numbers::pi;

void check_unit(const Vec3& d) {
    const double n2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if (!(std::abs(std::sqrt(n2) - 1.0) <= 1e-12))
        throw DomainError("spherical harmonic direction is not a unit vector");
}
}  // namespace

SpectralConfig::SpectralConfig(int k_max, int l_max, double gamma)
    : k_max_(k_max), l_max_(l_max), gamma_(gamma) {
    if (k_max < 0 || l_max < 0) throw DomainError("truncation limits must be non-negative");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("VHS exponent must lie in [0, 1]");
}

LM angular_lm(int q) {
    if (q < 0) throw DomainError("negative angular index");
    const int l = static_cast<int>(std::sqrt(static_cast<double>(q)));
    int ll = l;
    while (ll * ll > q) --ll;
    while ((ll + 1) * (ll + 1) <= q) ++ll;
    return {ll, q - ll * ll - ll};
}

int state_index(int k, int l, int m, const SpectralConfig& cfg) {
    if (k < 0 || k > cfg.k_max() || l < 0 || l > cfg.l_max() || m < -l || m > l)
        throw DomainError("state index (" + std::to_string(k) + "," + std::to_string(l) + "," +
                          std::to_string(m) + ") outside truncation");
    return k * cfg.n_q() + angular_index(l, m);
}

KLM state_klm(int alpha, const SpectralConfig& cfg) {
    if (alpha < 0 || alpha >= cfg.n_dof())
        throw DomainError("state index " + std::to_string(alpha) + " outside [0, n_dof)");
    const LM lm = angular_lm(alpha % cfg.n_q());
    return {alpha / cfg.n_q(), lm.l, lm.m};
}

CoefficientField::CoefficientField(const SpectralConfig& cfg)
    : cfg_(cfg), values_(static_cast<std::size_t>(cfg.n_dof()), 0.0) {}

CoefficientField CoefficientField::equilibrium(const SpectralConfig& cfg) {
    CoefficientField c(cfg);
    c(0, 0) = 1.0;
    return c;
}

double maxwellian(double v) { return std::exp(-0.5 * v * v) / std::pow(2.0 * kPi, 1.5); }

double radial_norm(int k, int l) {
    // N^2 = (2pi)^{3/2} k! / (2^{l+1/2} Gamma(k+l+3/2)), evaluated in logs
    const double log_n2 = 1.5 * std::log(2.0 * kPi) + std::lgamma(k + 1.0) -
                          (l + 0.5) * std::log(2.0) - std::lgamma(k + l + 1.5);
    return std::exp(0.5 * log_n2);
}

void radial_eval_all(int k_max, int l_max, double v, std::span<double> out) {
    if (v < 0.0) throw DomainError("radial_eval: negative speed");
    const int nk = k_max + 1;
    const double x = 0.5 * v * v;
    double vl = 1.0;
    for (int l = 0; l <= l_max; ++l) {
        const double a = l + 0.5;
        double* row = out.data() + static_cast<std::size_t>(l) * nk;
        double lm1 = 0.0, lk = 1.0;
        for (int k = 0; k <= k_max; ++k) {
            row[k] = radial_norm(k, l) * vl * lk;
            const double next = ((2.0 * k + 1.0 + a - x) * lk - (k + a) * lm1) / (k + 1.0);
            lm1 = lk;
            lk = next;
        }
        vl *= v;
    }
}

double radial_eval(int k, int l, double v) {
    if (k < 0 || l < 0) throw DomainError("radial_eval: negative index");
    std::vector<double> buf(static_cast<std::size_t>(k + 1) * (l + 1));
    radial_eval_all(k, l, v, buf);
    return buf[static_cast<std::size_t>(l) * (k + 1) + k];
}

void normalized_legendre(int l_max, double x, double s, std::span<double> out) {
    out[0] = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 1; m <= l_max; ++m)
        out[legendre_index(m, m)] =
            -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * out[legendre_index(m - 1, m - 1)];
    for (int m = 0; m < l_max; ++m)
        out[legendre_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * out[legendre_index(m, m)];
    for (int m = 0; m <= l_max; ++m) {
        for (int l = m + 2; l <= l_max; ++l) {
            const double l2 = double(l) * l, m2 = double(m) * m;
            const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
            const double lp = l - 1.0;
            const double b = std::sqrt((lp * lp - m2) / (4.0 * lp * lp - 1.0));
            out[legendre_index(l, m)] =
                a * (x * out[legendre_index(l - 1, m)] - b * out[legendre_index(l - 2, m)]);
        }
    }
}

namespace {
// cos(theta), sin(theta), cos(phi), sin(phi) of a nonzero vector; the pole maps to phi = 0.
struct Angles {
    double ct, st, cp, sp;
};
Angles angles_of(const Vec3& d) {
    const double rxy = std::hypot(d[0], d[1]);
    const double r = std::hypot(rxy, d[2]);
    Angles a{};
    a.ct = d[2] / r;
    a.st = rxy / r;
    if (rxy > 0.0) {
        a.cp = d[0] / rxy;
        a.sp = d[1] / rxy;
    } else {
        a.cp = 1.0;
        a.sp = 0.0;
    }
    return a;
}
}  // namespace

void real_sph_harm_all(int l_max, const Vec3& d, std::span<double> out) {
    const Angles a = angles_of(d);
    std::vector<double> p(legendre_index(l_max, l_max) + 1);
    normalized_legendre(l_max, a.ct, a.st, p);
    // cos(m phi), sin(m phi) by repeated complex multiplication
    std::vector<double> cm(l_max + 1), sm(l_max + 1);
    cm[0] = 1.0;
    sm[0] = 0.0;
    for (int m = 1; m <= l_max; ++m) {
        cm[m] = cm[m - 1] * a.cp - sm[m - 1] * a.sp;
        sm[m] = sm[m - 1] * a.cp + cm[m - 1] * a.sp;
    }
    for (int l = 0; l <= l_max; ++l) {
        out[angular_index(l, 0)] = p[legendre_index(l, 0)];
        for (int m = 1; m <= l; ++m) {
            const double f = (m % 2 ? -std::numbers::sqrt2 : std::numbers::sqrt2) * p[legendre_index(l, m)];
            out[angular_index(l, m)] = f * cm[m];
            out[angular_index(l, -m)] = f * sm[m];
        }
    }
}

double real_sph_harm(int l, int m, const Vec3& d) {
    if (l < 0 || m < -l || m > l) throw DomainError("real_sph_harm: invalid (l, m)");
    check_unit(d);
    std::vector<double> buf(static_cast<std::size_t>(l + 1) * (l + 1));
    real_sph_harm_all(l, d, buf);
    return buf[angular_index(l, m)];
}

std::complex<double> complex_sph_harm(int l, int m, const Vec3& d) {
    if (l < 0 || m < -l || m > l) throw DomainError("complex_sph_harm: invalid (l, m)");
    check_unit(d);
    const Angles a = angles_of(d);
    std::vector<double> p(legendre_index(l, l) + 1);
    normalized_legendre(l, a.ct, a.st, p);
    const int am = std::abs(m);
    const std::complex<double> e = std::pow(std::complex<double>(a.cp, a.sp), am);
    std::complex<double> y = p[legendre_index(l, am)] * e;
    if (m < 0) y = (am % 2 ? -1.0 : 1.0) * std::conj(y);
    return y;
}

double evaluate_ratio(const CoefficientField& c, const Vec3& v) {
    const int K = c.config().k_max(), L = c.config().l_max();
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    std::vector<double> rad(static_cast<std::size_t>(K + 1) * (L + 1));
    std::vector<double> ylm(static_cast<std::size_t>(c.n_q()));
    radial_eval_all(K, L, speed, rad);
    if (speed > 0.0) {
        real_sph_harm_all(L, v, ylm);
    } else {
        real_sph_harm_all(L, Vec3{0.0, 0.0, 1.0}, ylm);
    }
    double acc = 0.0;
    for (int k = 0; k <= K; ++k)
        for (int q = 0; q < c.n_q(); ++q)
            acc += c(k, q) * rad[static_cast<std::size_t>(angular_lm(q).l) * (K + 1) + k] * ylm[q];
    return acc;
}

VelocityRule maxwellian_velocity_rule(int order) {
    if (order < 1) throw DomainError("projection order must be >= 1");
    // int M g dv = (2pi)^{-3/2} int_0^inf e^{-x} sqrt(2x) dx int dOmega g, with x = v^2/2
    const Rule1D rad = gauss_laguerre_gen(order, 0.5);
    const Rule1D pol = gauss_legendre(order);
    const Rule1D azi = trapezoid_periodic(2 * order);
    VelocityRule r;
    const double pref = std::sqrt(2.0) / std::pow(2.0 * kPi, 1.5);
    r.points.reserve(rad.size() * pol.size() * azi.size());
    r.weights.reserve(r.points.capacity());
    for (std::size_t i = 0; i < rad.size(); ++i) {
        const double v = std::sqrt(2.0 * rad.nodes[i]);
        for (std::size_t j = 0; j < pol.size(); ++j) {
            const double ct = pol.nodes[j], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (std::size_t k = 0; k < azi.size(); ++k) {
                const double ph = azi.nodes[k];
                r.points.push_back({v * st * std::cos(ph), v * st * std::sin(ph), v * ct});
                r.weights.push_back(pref * rad.weights[i] * pol.weights[j] * azi.weights[k]);
            }
        }
    }
    return r;
}

int default_projection_order(const SpectralConfig& cfg) {
    // exact for total degree 2(2K + L) + 4
    return 2 * cfg.k_max() + cfg.l_max() + 3;
}

CoefficientField project_ratio(const std::function<double(const Vec3&)>& g,
                               const SpectralConfig& cfg, int order) {
    if (order <= 0) order = default_projection_order(cfg);
    const VelocityRule rule = maxwellian_velocity_rule(order);
    const int K = cfg.k_max(), L = cfg.l_max();
    CoefficientField c(cfg);
    std::vector<double> rad(static_cast<std::size_t>(K + 1) * (L + 1));
    std::vector<double> ylm(static_cast<std::size_t>(cfg.n_q()));
    std::vector<int> lq(cfg.n_q());
    for (int q = 0; q < cfg.n_q(); ++q) lq[q] = angular_lm(q).l;
    // 10^5+ terms per coefficient; double accumulation drifts to ~1e-13
    std::vector<long double> acc(static_cast<std::size_t>(cfg.n_dof()), 0.0L);
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
        const Vec3& p = rule.points[i];
        const double speed = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        radial_eval_all(K, L, speed, rad);
        real_sph_harm_all(L, p, ylm);
        const double wg = rule.weights[i] * g(p);
        for (int k = 0; k <= K; ++k)
            for (int q = 0; q < cfg.n_q(); ++q)
                acc[static_cast<std::size_t>(k) * cfg.n_q() + q] +=
                    wg * rad[static_cast<std::size_t>(lq[q]) * (K + 1) + k] * ylm[q];
    }
    for (int k = 0; k <= K; ++k)
        for (int q = 0; q < cfg.n_q(); ++q)
            c(k, q) = static_cast<double>(acc[static_cast<std::size_t>(k) * cfg.n_q() + q]);
    return c;
}

CoefficientField project(const std::function<double(const Vec3&)>& f, const SpectralConfig& cfg,
                         int order) {
    return project_ratio(
        [&f](const Vec3& v) {
            const double s = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            return f(v) / maxwellian(s);
        },
        cfg, order);
}

Moments moments(const CoefficientField& c) {
    Moments m;
    m.mass = c(0, angular_index(0, 0));
    if (c.config().l_max() >= 1) {
        m.momentum = {c(0, angular_index(1, 1)), c(0, angular_index(1, -1)),
                      c(0, angular_index(1, 0))};
    }
    m.energy = 1.5 * c(0, 0);
    if (c.config().k_max() >= 1) m.energy -= std::sqrt(1.5) * c(1, 0);
    return m;
}

}  // namespace boltzfact
