#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace boltzfact {

using Vec3 = std::array<double, 3>;

// Truncation of the spectral basis. Indices are 0-based throughout the library:
// q(l, m) = l^2 + l + m and alpha = k * n_q + q.
class SpectralConfig {
public:
    SpectralConfig() = default;
    SpectralConfig(int k_max, int l_max, double gamma = 0.0);

    int k_max() const { return k_max_; }
    int l_max() const { return l_max_; }
    double gamma() const { return gamma_; }
    int n_k() const { return k_max_ + 1; }
    int n_q() const { return (l_max_ + 1) * (l_max_ + 1); }
    int n_dof() const { return n_k() * n_q(); }

    bool operator==(const SpectralConfig&) const = default;

private:
    int k_max_ = 0;
    int l_max_ = 0;
    double gamma_ = 0.0;
};

struct LM {
    int l;
    int m;
};

struct KLM {
    int k;
    int l;
    int m;
    bool operator==(const KLM&) const = default;
};

constexpr int angular_index(int l, int m) { return l * l + l + m; }
LM angular_lm(int q);

int state_index(int k, int l, int m, const SpectralConfig& cfg);
KLM state_klm(int alpha, const SpectralConfig& cfg);

// Coefficients c_{k,q}, row-major over (k, q).
class CoefficientField {
public:
    CoefficientField() = default;
    explicit CoefficientField(const SpectralConfig& cfg);

    static CoefficientField equilibrium(const SpectralConfig& cfg);

    const SpectralConfig& config() const { return cfg_; }
    int n_k() const { return cfg_.n_k(); }
    int n_q() const { return cfg_.n_q(); }

    double& operator()(int k, int q) { return values_[static_cast<std::size_t>(k) * cfg_.n_q() + q]; }
    double operator()(int k, int q) const { return values_[static_cast<std::size_t>(k) * cfg_.n_q() + q]; }
    double& at(int k, int l, int m) { return (*this)(k, angular_index(l, m)); }
    double at(int k, int l, int m) const { return (*this)(k, angular_index(l, m)); }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    SpectralConfig cfg_;
    std::vector<double> values_;
};

// Maxwellian reference weight (2pi)^{-3/2} exp(-v^2/2).
double maxwellian(double v);

// Normalization N_{k,l} with int phi_{k,l} phi_{k',l} M v^2 dv = delta_{kk'}.
double radial_norm(int k, int l);
// phi_{k,l}(v) = N_{k,l} v^l L_k^{(l+1/2)}(v^2/2).
double radial_eval(int k, int l, double v);
// All phi_{k,l}(v) for k <= k_max, l <= l_max; out[l * (k_max+1) + k].
void radial_eval_all(int k_max, int l_max, double v, std::span<double> out);

// Orthonormal associated Legendre values Pbar_l^m(cos theta) for 0 <= m <= l <= l_max,
// Condon-Shortley phase included, such that Y_l^m = Pbar_l^m e^{i m phi}.
// out[l(l+1)/2 + m]; requires out.size() >= (l_max+1)(l_max+2)/2.
void normalized_legendre(int l_max, double cos_t, double sin_t, std::span<double> out);
inline constexpr std::size_t legendre_index(int l, int m) {
    return static_cast<std::size_t>(l) * (l + 1) / 2 + m;
}

// Real orthonormal harmonic: sqrt2 (-1)^m Pbar cos(m phi) for m > 0, sqrt2 (-1)^m Pbar sin(|m| phi)
// for m < 0. `direction` must be a unit vector.
double real_sph_harm(int l, int m, const Vec3& direction);
// All real harmonics up to l_max; out[angular_index(l, m)].
void real_sph_harm_all(int l_max, const Vec3& direction, std::span<double> out);
// Complex harmonic Y_l^m with Condon-Shortley phase.
std::complex<double> complex_sph_harm(int l, int m, const Vec3& direction);

// Value of sum_alpha c_alpha psi_alpha(v); the distribution is maxwellian(|v|) times this.
double evaluate_ratio(const CoefficientField& c, const Vec3& v);

// Product rule used by `project`: generalized Gauss-Laguerre in x = v^2/2 times
// Gauss-Legendre in cos(theta) times trapezoid in phi.
struct VelocityRule {
    std::vector<Vec3> points;
    std::vector<double> weights;  // include the Maxwellian: sum_i w_i g(v_i) ~ int M g dv
};
// `order` >= 1 picks a rule exact for polynomial degree 2*order - 1 in each direction.
VelocityRule maxwellian_velocity_rule(int order);
int default_projection_order(const SpectralConfig& cfg);

// c_alpha = int f(v) psi_alpha(v) dv for a distribution f.
CoefficientField project(const std::function<double(const Vec3&)>& f, const SpectralConfig& cfg,
                         int order = 0);
// c_alpha = int M g psi_alpha dv for a ratio g = f / M.
CoefficientField project_ratio(const std::function<double(const Vec3&)>& g,
                               const SpectralConfig& cfg, int order = 0);

struct Moments {
    double mass = 0.0;
    Vec3 momentum{0.0, 0.0, 0.0};
    double energy = 0.0;  // int |v|^2/2 f dv
};

// Closed-form linear combinations of c_{0,(0,0)}, c_{0,(1,m)} and c_{1,(0,0)}.
Moments moments(const CoefficientField& c);

}  // namespace boltzfact
