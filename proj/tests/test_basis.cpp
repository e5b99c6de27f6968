#include "boltzfact/basis.hpp"
#include "boltzfact/error.hpp"
#include "boltzfact/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace boltzfact;

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 unit(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace

TEST(SpectralConfig, CountsAndValidation) {
    const SpectralConfig cfg(4, 6, 1.0);
    EXPECT_EQ(cfg.n_k(), 5);
    EXPECT_EQ(cfg.n_q(), 49);
    EXPECT_EQ(cfg.n_dof(), 245);
    EXPECT_THROW(SpectralConfig(4, 6, 1.5), DomainError);
    EXPECT_THROW(SpectralConfig(4, 6, -0.1), DomainError);
    EXPECT_THROW(SpectralConfig(-1, 2, 0.0), DomainError);
}

TEST(IndexMaps, AngularOrdering) {
    EXPECT_EQ(angular_index(0, 0), 0);
    EXPECT_EQ(angular_index(1, -1), 1);
    EXPECT_EQ(angular_index(1, 0), 2);
    EXPECT_EQ(angular_index(1, 1), 3);
    EXPECT_EQ(angular_index(4, 4), 24);
    for (int q = 0; q < 400; ++q) {
        const LM lm = angular_lm(q);
        EXPECT_EQ(angular_index(lm.l, lm.m), q);
    }
}

TEST(IndexMaps, StateRoundTrip) {
    const SpectralConfig cfg(3, 5);
    for (int a = 0; a < cfg.n_dof(); ++a) {
        const KLM s = state_klm(a, cfg);
        EXPECT_EQ(state_index(s.k, s.l, s.m, cfg), a);
    }
    EXPECT_EQ(state_index(1, 0, 0, cfg), cfg.n_q());
    EXPECT_THROW(state_index(4, 0, 0, cfg), DomainError);
    EXPECT_THROW(state_index(0, 2, 3, cfg), DomainError);
    EXPECT_THROW(state_klm(cfg.n_dof(), cfg), DomainError);
}

TEST(Radial, LowestFunctionIsConstant) {
    // psi_00 = phi_00 Y_00 must be 1 for a unit-mass Maxwellian; checked with a 3D Gauss-Hermite
    // rule for int M dv (x = sqrt2 s) that does not share code with the radial basis.
    const Rule1D gh = gauss_hermite(6);
    double mass = 0.0;
    for (double wx : gh.weights)
        for (double wy : gh.weights)
            for (double wz : gh.weights) mass += wx * wy * wz;
    mass *= std::pow(2.0, 1.5) / std::pow(2.0 * kPi, 1.5);
    EXPECT_NEAR(mass, 1.0, 1e-14);
    EXPECT_NEAR(radial_eval(0, 0, 0.7), 2.0 * std::sqrt(kPi), 1e-14);
    EXPECT_NEAR(radial_norm(0, 0), 2.0 * std::sqrt(kPi), 1e-14);
}

TEST(Radial, ClosedFormLowDegree) {
    // L_1^{(1/2)}(x) = 3/2 - x, L_1^{(3/2)}(x) = 5/2 - x
    for (double v : {0.0, 0.3, 1.7, 4.2}) {
        const double x = 0.5 * v * v;
        EXPECT_NEAR(radial_eval(1, 0, v), radial_norm(1, 0) * (1.5 - x), 1e-13);
        EXPECT_NEAR(radial_eval(1, 1, v), radial_norm(1, 1) * v * (2.5 - x), 1e-13);
        EXPECT_NEAR(radial_eval(0, 2, v), radial_norm(0, 2) * v * v, 1e-13);
    }
}

TEST(Radial, OrthonormalUnderIndependentRule) {
    // Gauss-Legendre on [0, 16] instead of the Laguerre rule the basis is built around.
    const Rule1D r = gauss_legendre(160, 0.0, 16.0);
    for (int l = 0; l <= 4; ++l)
        for (int k = 0; k <= 4; ++k)
            for (int kp = 0; kp <= 4; ++kp) {
                const double s = r.integrate(
                    [&](double v) { return radial_eval(k, l, v) * radial_eval(kp, l, v) * maxwellian(v) * v * v; });
                EXPECT_NEAR(s, k == kp ? 1.0 : 0.0, 1e-12) << "l=" << l << " k=" << k << " k'=" << kp;
            }
}

TEST(Radial, EvalAllMatchesSingle) {
    const int K = 3, L = 4;
    std::vector<double> out((K + 1) * (L + 1));
    radial_eval_all(K, L, 1.3, out);
    for (int l = 0; l <= L; ++l)
        for (int k = 0; k <= K; ++k) EXPECT_NEAR(out[l * (K + 1) + k], radial_eval(k, l, 1.3), 1e-13);
}

TEST(SphericalHarmonics, CartesianLowDegree) {
    const double c1 = std::sqrt(3.0 / (4.0 * kPi));
    for (auto [th, ph] : {std::pair{0.3, 1.1}, std::pair{2.0, -0.7}, std::pair{1.57, 3.0}}) {
        const Vec3 d = unit(th, ph);
        EXPECT_NEAR(real_sph_harm(0, 0, d), 0.5 / std::sqrt(kPi), 1e-15);
        EXPECT_NEAR(real_sph_harm(1, 1, d), c1 * d[0], 1e-14);
        EXPECT_NEAR(real_sph_harm(1, -1, d), c1 * d[1], 1e-14);
        EXPECT_NEAR(real_sph_harm(1, 0, d), c1 * d[2], 1e-14);
        const double c2 = 0.25 * std::sqrt(5.0 / kPi);
        EXPECT_NEAR(real_sph_harm(2, 0, d), c2 * (3.0 * d[2] * d[2] - 1.0), 1e-14);
        EXPECT_NEAR(real_sph_harm(2, -2, d), 0.5 * std::sqrt(15.0 / kPi) * d[0] * d[1], 1e-14);
    }
}

TEST(SphericalHarmonics, RealFromComplex) {
    const Vec3 d = unit(0.83, 2.4);
    for (int l = 0; l <= 6; ++l)
        for (int m = 1; m <= l; ++m) {
            const std::complex<double> y = complex_sph_harm(l, m, d);
            const double sign = (m % 2) ? -1.0 : 1.0;
            EXPECT_NEAR(real_sph_harm(l, m, d), std::sqrt(2.0) * sign * y.real(), 1e-14);
            EXPECT_NEAR(real_sph_harm(l, -m, d), std::sqrt(2.0) * sign * y.imag(), 1e-14);
        }
}

TEST(SphericalHarmonics, OrthonormalOnSphere) {
    const int L = 4;
    const int nq = (L + 1) * (L + 1);
    std::vector<double> y(nq);
    std::vector<double> gram(nq * nq, 0.0);
    const Rule1D ct = gauss_legendre(12);
    const Rule1D ph = trapezoid_periodic(24);
    for (std::size_t i = 0; i < ct.size(); ++i)
        for (std::size_t j = 0; j < ph.size(); ++j) {
            real_sph_harm_all(L, unit(std::acos(ct.nodes[i]), ph.nodes[j]), y);
            const double w = ct.weights[i] * ph.weights[j];
            for (int a = 0; a < nq; ++a)
                for (int b = 0; b < nq; ++b) gram[a * nq + b] += w * y[a] * y[b];
        }
    for (int a = 0; a < nq; ++a)
        for (int b = 0; b < nq; ++b) EXPECT_NEAR(gram[a * nq + b], a == b ? 1.0 : 0.0, 1e-13);
}

TEST(SphericalHarmonics, RejectsNonUnitDirection) {
    EXPECT_THROW(real_sph_harm(1, 0, Vec3{0.0, 0.0, 2.0}), DomainError);
}

TEST(Projection, RoundTripOfRandomField) {
    const SpectralConfig cfg(3, 4);
    CoefficientField c(cfg);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& x : c.values()) x = u(rng);
    const CoefficientField back = project_ratio([&](const Vec3& v) { return evaluate_ratio(c, v); }, cfg);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(back.values()[i], c.values()[i], 1e-13);
}

TEST(Projection, EquilibriumIsExact) {
    const SpectralConfig cfg(4, 6);
    for (int order : {17, 32, 48}) {
        const CoefficientField c = project([](const Vec3& v) {
            return maxwellian(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
        }, cfg, order);
        EXPECT_NEAR(c(0, 0), 1.0, 2e-15);
        for (std::size_t i = 1; i < c.size(); ++i) EXPECT_NEAR(c.values()[i], 0.0, 2e-15);
    }
}

TEST(Moments, ClosedFormAgainstDirectQuadrature) {
    const SpectralConfig cfg(2, 2);
    const double n = 1.3, T = 1.1;
    const Vec3 u{0.2, -0.1, 0.3};
    auto f = [&](const Vec3& v) {
        const double d2 = (v[0] - u[0]) * (v[0] - u[0]) + (v[1] - u[1]) * (v[1] - u[1]) + (v[2] - u[2]) * (v[2] - u[2]);
        return n * std::exp(-0.5 * d2 / T) / std::pow(2.0 * kPi * T, 1.5);
    };
    const Moments m = moments(project(f, cfg, 48));
    const double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    EXPECT_NEAR(m.mass, n, 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.momentum[i], n * u[i], 1e-12);
    EXPECT_NEAR(m.energy, n * (0.5 * u2 + 1.5 * T), 1e-12);

    const Moments eq = moments(CoefficientField::equilibrium(cfg));
    EXPECT_EQ(eq.mass, 1.0);
    EXPECT_EQ(eq.energy, 1.5);
}
