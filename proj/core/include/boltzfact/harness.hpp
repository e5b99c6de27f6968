#pragma once

#include "boltzfact/contraction.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace boltzfact {

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<CoefficientField> snapshots;
    std::vector<Moments> moments;

    // Largest |moment(t) - moment(0)| over the five invariants; exactly 0 when conserved.
    double max_moment_drift() const;
    // c_{k,(l,m)} over the recorded times.
    std::vector<double> amplitude(int k, int l, int m) const;
};

// Classical RK4 on dc/dt = Q(c, c) with the angular-first contraction. Records every
// `record_every` steps plus the final state. Throws DivergenceError on non-finite values.
EvolutionTrace rk4_integrate(const FactorizedOperator& op, const CoefficientField& c0, double dt,
                             int n_steps, int record_every = 1);

// Spectrum of the linearization at equilibrium.
struct Spectrum {
    Eigen::VectorXd real;  // sorted descending
    double max_imag = 0.0;
    double norm = 0.0;     // Frobenius norm of L
};
Spectrum linearized_spectrum(const FactorizedOperator& op);

// Isotropic ratio g(|v|) = f / M projected onto the l = 0 modes with a radial Gauss-Laguerre rule.
CoefficientField project_isotropic(const std::function<double(double)>& f, const SpectralConfig& cfg,
                                   int order = 0);

inline constexpr double kBkwInitialTemperature = 0.65;

// BKW state at time t with K(t) = 1 - (1 - K0) exp(-rate t), projected on the basis.
// Throws DomainError when K(t) <= 3/5.
CoefficientField bkw_coefficients(const SpectralConfig& cfg, double t, double rate,
                                  double k0 = kBkwInitialTemperature);

struct BkwModeRate {
    int k = 0;
    double fitted_rate = 0.0;        // -d log|c_k| / dt at late times
    double linearized_rate = 0.0;    // -lambda of the k-th isotropic eigenvalue
    double rel_error = 0.0;
};

struct BkwReport {
    double rate_fit = 0.0;
    double rate_eigen = 0.0;  // half of |lambda| of the slowest isotropic mode
    double max_deviation = 0.0;
    double max_drift = 0.0;
    bool fit_ok = true;
    std::vector<BkwModeRate> modes;
    EvolutionTrace trace;
};

BkwReport run_bkw_benchmark(const FactorizedOperator& op, double k0 = kBkwInitialTemperature,
                            double t_end = 60.0, double dt = 0.05);

struct WcuGroup {
    double ratio = 0.0;
    int multiplicity = 0;
};

struct WcuReport {
    Spectrum spectrum;
    int n_zero = 0;
    double lambda_ref = 0.0;  // first nonzero eigenvalue
    std::vector<double> ratios;
    std::vector<WcuGroup> groups;
};

// Groups eigenvalue ratios with relative tolerance 1e-8.
WcuReport wcu_spectrum_report(const FactorizedOperator& op, double zero_tol = 1e-10);

struct GalileanReport {
    Vec3 u{0.0, 0.0, 0.0};
    double truncation_l2 = 0.0;      // || f - M sum c psi ||_{L2(1/M)} after projection
    double collision_l2 = 0.0;       // ||Q(c, c)||_2, zero up to truncation for a Maxwellian
    double conservation_err = 0.0;   // max invariant drift over a short evolution
    Moments moments;
};

GalileanReport galilean_report(const FactorizedOperator& op, const Vec3& u_bulk, int evolution_steps = 20,
                               double dt = 0.05);

// Shifted Maxwellian with unit density and temperature, projected on the basis.
CoefficientField shifted_maxwellian(const SpectralConfig& cfg, const Vec3& u, int order = 0);

// Viscosity correction factor with the l = 2 block truncated at k_trunc. `m` picks the
// quadrupole component used for the driving source.
double chapman_enskog_fmu(const FactorizedOperator& op, int k_trunc, int m = 0);
double chapman_enskog_fmu(const Eigen::MatrixXd& L, const SpectralConfig& cfg, int k_trunc, int m = 0);

struct StressReport {
    double amplitude = 0.0;
    double fitted_rate = 0.0;   // late-time decay rate of c_{0,2,0}
    double slowest_rate = 0.0;  // smallest |lambda| of the l = 2 block
    double ce_rate = 0.0;       // 1 / [(-L2)^{-1}]_{00}
    double rel_error = 0.0;     // fitted vs slowest
    double max_drift = 0.0;
    bool cascade = false;       // every k > 0 quadrupole amplitude rises from 0 then decays
    std::vector<double> cascade_peak;
    EvolutionTrace trace;
};

StressReport stress_relaxation_report(const FactorizedOperator& op, double amplitude = 1e-3,
                                      double t_end = 40.0, double dt = 0.05);

struct QuadConvPoint {
    int pad = 0;
    double rel_linf = 0.0;
};

struct QuadConvReport {
    int k_max = 0, l_max = 0;
    double gamma = 0.0;
    int ref_pad = 0;
    std::vector<QuadConvPoint> points;
    bool monotone = false;
};

// Relative l-infinity error of the raw R tensor at each pad against a pad `ref_pad` reference.
QuadConvReport quadrature_convergence(int k_max, int l_max, double gamma, const std::vector<int>& pads,
                                      int ref_pad, int threads = 1);

// Least-squares slope of log|y| against t.
double fit_log_slope(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace boltzfact
