#pragma once

#include "boltzfact/angular.hpp"
#include "boltzfact/basis.hpp"
#include "boltzfact/quadrature.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace boltzfact {

// Isotropic variable-hard-sphere kernel u^gamma / (4 pi).
double vhs_kernel(double u, double cos_chi, double gamma);

// Point of the reduced kinematic domain. E = (v + w)^2 / 4 so that dv dw = dE drho,
// v = sqrt(E)(1 + rho), w = sqrt(E)(1 - rho) and h = sin(beta/2). With `swapped` set the
// two speeds are exchanged, covering the half-plane w > v on the same grid.
struct KinematicState {
    double E = 0.0;
    double rho = 0.0;
    double h = 0.0;
    bool swapped = false;

    static KinematicState patch1(double E, double rho, double t, bool swapped = false);
    static KinematicState patch2(double E, double h, double t, bool swapped = false);

    double v() const;
    double w() const;
    double u() const;  // 2 sqrt(E) sqrt(rho^2 + (1 - rho^2) h^2)
    double cos_beta() const { return 1.0 - 2.0 * h * h; }
    double sin_beta() const;
    double beta() const;
};

struct PostCollision {
    double speed = 0.0;
    Vec3 direction{0.0, 0.0, 1.0};
    Vec3 v_prime{0.0, 0.0, 0.0};
    Vec3 w_prime{0.0, 0.0, 0.0};
};

// Post-collision velocities for v = v z, w = w (sin b, 0, cos b) and scattering angles (chi, eps).
PostCollision post_collision_direction(double v, double w, double beta, double chi, double eps);

struct FilterValue {
    double value = 0.0;
    double imag_residual = 0.0;
};

// Gain angular filter built from complex harmonics; returns the real part and |imag|.
FilterValue gain_filter(const Channel& ch, const Vec3& v_hat_prime, double beta);
double loss_filter(const Channel& ch, double beta);

// Reference evaluation of the collision manifold for one channel and test degree k1.
double scattering_manifold(const KinematicState& state, const Channel& ch, int k1,
                           const Rule1D& chi_rule, const Rule1D& eps_rule, double gamma);

// Constant that turns the rotation-reduced integral into the coefficient multiplying the
// real Gaunt weight: 8 pi^2 / (sqrt(prod(2l+1)/4pi) * 3j(l1 l2 l3; 0 0 0)).
double channel_constant(const Channel& ch);

// Evaluates the manifold for every (k1, tau) at once by accumulating the (chi, eps) sums
// once per node and reusing them across channels.
class ManifoldEvaluator {
public:
    ManifoldEvaluator(const SpectralConfig& cfg, const ChannelTable& channels, int n_chi, int n_eps);

    // out[tau * n_k + k1]; the kernel is multiplied by `kernel_scale`.
    void evaluate(const KinematicState& state, double kernel_scale, std::span<double> out);

private:
    int K_, L_, nk_;
    double gamma_;
    const ChannelTable* channels_;
    Rule1D chi_, eps_;
    std::vector<double> cos_chi_, sin_chi_, cos_eps_, sin_eps_;
    std::vector<double> norms_;    // radial norms, [l * nk + k]
    std::vector<double> leg_a_, leg_b_, leg_diag_, leg_sub_;
    std::vector<double> lag_c1_, lag_c2_, lag_c3_;  // Laguerre recurrence per (l, k)
    std::vector<double> zonal_;    // Y_{l,0}(z)
    std::vector<double> tj_;       // per channel, 3j(l1 l2 l3; m 0 -m) for m = 0..min(l1,l3)
    std::vector<std::size_t> tj_offset_;
    // scratch
    std::vector<double> rad_, leg_, cosm_, sinm_, S_, leg_beta_, rad_v_;

    void radial_all(double v, double* out) const;
    void legendre_all(double x, double s, double* out) const;
};

struct RTensorFlags {
    bool conservation = false;
    bool detailed_balance = false;
    bool symmetrized = false;
};

// Dense R[k1, k2, k3, tau], stored tau-major with k3 fastest.
class RTensor {
public:
    RTensor() = default;
    RTensor(int n_k, int n_t, double gamma, const GridSpec& grid);

    int n_k() const { return n_k_; }
    int n_t() const { return n_t_; }
    double gamma() const { return gamma_; }
    const GridSpec& grid() const { return grid_; }
    RTensorFlags& flags() { return flags_; }
    const RTensorFlags& flags() const { return flags_; }

    std::size_t offset(int k1, int k2, int k3, int tau) const {
        return ((static_cast<std::size_t>(tau) * n_k_ + k1) * n_k_ + k2) * n_k_ + k3;
    }
    double& operator()(int k1, int k2, int k3, int tau) { return values_[offset(k1, k2, k3, tau)]; }
    double operator()(int k1, int k2, int k3, int tau) const { return values_[offset(k1, k2, k3, tau)]; }

    std::size_t block_size() const { return static_cast<std::size_t>(n_k_) * n_k_ * n_k_; }
    std::span<const double> block(int tau) const {
        return std::span<const double>(values_).subspan(tau * block_size(), block_size());
    }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    // Largest |value| overwritten by the conservation correction.
    double max_conservation_correction = 0.0;
    double max_balance_correction = 0.0;

private:
    int n_k_ = 0;
    int n_t_ = 0;
    double gamma_ = 0.0;
    GridSpec grid_;
    RTensorFlags flags_;
    std::vector<double> values_;
};

struct AssemblyOptions {
    int threads = 1;
    bool symmetrize = true;
};

// Raw tensor from the two-patch Duffy quadrature, symmetrized in slots 2 and 3.
// Throws ConfigurationError when the grid is below the exactness baseline.
RTensor assemble_r_tensor(const SpectralConfig& cfg, const GridSpec& grid,
                          const ChannelTable& channels, const AssemblyOptions& opts = {});

// R_sym[k1,k2,k3,(l1,l2,l3)] = (R[k1,k2,k3,(l1,l2,l3)] + R[k1,k3,k2,(l1,l3,l2)]) / 2.
void symmetrize_r_tensor(RTensor& r, const ChannelTable& channels);

// Zero the test-function rows of the collision invariants. Idempotent; returns the largest
// magnitude that was overwritten.
double apply_conservation(RTensor& r, const ChannelTable& channels);
// Zero R[k1, 0, 0, tau(0,0,0)] so that Q(M, M) = 0. Idempotent.
double apply_detailed_balance(RTensor& r, const ChannelTable& channels);

}  // namespace boltzfact
