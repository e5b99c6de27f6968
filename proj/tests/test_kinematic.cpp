#include "boltzfact/angular.hpp"
#include "boltzfact/contraction.hpp"
#include "boltzfact/error.hpp"
#include "boltzfact/kinematic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace boltzfact;

namespace {

constexpr double kPi = std::numbers::pi;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

TEST(Kernel, VariableHardSphere) {
    EXPECT_DOUBLE_EQ(vhs_kernel(0.0, 0.3, 0.0), 1.0 / (4.0 * kPi));
    EXPECT_DOUBLE_EQ(vhs_kernel(2.5, -1.0, 0.0), 1.0 / (4.0 * kPi));
    EXPECT_NEAR(vhs_kernel(2.5, 0.1, 1.0), 2.5 / (4.0 * kPi), 1e-15);
    EXPECT_NEAR(vhs_kernel(4.0, 0.1, 0.5), 2.0 / (4.0 * kPi), 1e-15);
    EXPECT_THROW(vhs_kernel(-1.0, 0.0, 0.0), DomainError);
    EXPECT_THROW(vhs_kernel(1.0, 1.5, 0.0), DomainError);
}

TEST(KinematicState, SpeedsAndRelativeSpeed) {
    for (double E : {0.05, 0.8, 3.0})
        for (double rho : {0.0, 0.2, 0.9})
            for (double h : {0.0, 0.3, 0.7, 1.0}) {
                const KinematicState s{E, rho, h, false};
                EXPECT_NEAR(0.25 * (s.v() + s.w()) * (s.v() + s.w()), E, 1e-14);
                // u from explicit vectors v = v z, w = w (sin b, 0, cos b)
                const double b = s.beta();
                const double dx = -s.w() * std::sin(b), dz = s.v() - s.w() * std::cos(b);
                EXPECT_NEAR(s.u(), std::hypot(dx, dz), 1e-13);
                EXPECT_NEAR(s.cos_beta(), std::cos(b), 1e-14);
                EXPECT_NEAR(s.sin_beta(), std::sin(b), 1e-14);

                const KinematicState t{E, rho, h, true};
                EXPECT_DOUBLE_EQ(t.v(), s.w());
                EXPECT_DOUBLE_EQ(t.w(), s.v());
                EXPECT_DOUBLE_EQ(t.u(), s.u());
            }
}

TEST(KinematicState, DuffyPatches) {
    const KinematicState a = KinematicState::patch1(1.2, 0.4, 0.5);
    EXPECT_DOUBLE_EQ(a.rho, 0.4);
    EXPECT_DOUBLE_EQ(a.h, 0.2);
    const KinematicState b = KinematicState::patch2(1.2, 0.4, 0.5, true);
    EXPECT_DOUBLE_EQ(b.rho, 0.2);
    EXPECT_DOUBLE_EQ(b.h, 0.4);
    EXPECT_TRUE(b.swapped);
}

TEST(PostCollision, ElasticAndMomentumConserving) {
    for (double v : {0.3, 1.4})
        for (double w : {0.0, 0.9, 2.2})
            for (double beta : {0.0, 0.7, 2.9})
                for (double chi : {0.0, 0.4, 1.9, kPi})
                    for (double eps : {0.0, 1.3, 4.4}) {
                        const PostCollision pc = post_collision_direction(v, w, beta, chi, eps);
                        const Vec3 vv{0.0, 0.0, v};
                        const Vec3 ww{w * std::sin(beta), 0.0, w * std::cos(beta)};
                        for (int i = 0; i < 3; ++i)
                            EXPECT_NEAR(pc.v_prime[i] + pc.w_prime[i], vv[i] + ww[i], 1e-14);
                        EXPECT_NEAR(dot(pc.v_prime, pc.v_prime) + dot(pc.w_prime, pc.w_prime),
                                    dot(vv, vv) + dot(ww, ww), 1e-13);
                        EXPECT_NEAR(pc.speed, std::sqrt(dot(pc.v_prime, pc.v_prime)), 1e-14);
                        EXPECT_NEAR(dot(pc.direction, pc.direction), 1.0, 1e-14);
                        // the scattering angle between u and u'
                        Vec3 u, up;
                        for (int i = 0; i < 3; ++i) {
                            u[i] = vv[i] - ww[i];
                            up[i] = pc.v_prime[i] - pc.w_prime[i];
                        }
                        const double nu = std::sqrt(dot(u, u));
                        if (nu > 1e-12) EXPECT_NEAR(dot(u, up) / (nu * nu), std::cos(chi), 1e-12);
                    }
    EXPECT_THROW(post_collision_direction(-1.0, 1.0, 0.0, 0.0, 0.0), DomainError);
}

TEST(Filters, GainReducesToLossWithoutScattering) {
    // with v' = v (along z) the gain filter must coincide with the loss filter
    const ChannelTable ch(4);
    const double beta = 1.1;
    for (int tau = 0; tau < ch.size(); ++tau) {
        const FilterValue g = gain_filter(ch[tau], Vec3{0.0, 0.0, 1.0}, beta);
        EXPECT_NEAR(g.value, loss_filter(ch[tau], beta), 1e-14) << tau;
        EXPECT_LT(g.imag_residual, 1e-14);
    }
}

TEST(Filters, GainIsRealInTheCollisionPlaneFrame) {
    const ChannelTable ch(5);
    const double beta = 0.8;
    for (double th : {0.2, 1.3, 2.7})
        for (double ph : {0.0, 0.9, 3.5}) {
            const Vec3 d{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
            for (int tau = 0; tau < ch.size(); ++tau)
                EXPECT_LT(gain_filter(ch[tau], d, beta).imag_residual, 1e-13);
        }
}

TEST(Manifold, EvaluatorMatchesReference) {
    const SpectralConfig cfg(3, 4, 1.0);
    const ChannelTable ch(4);
    const int n_chi = 6, n_eps = 11;
    ManifoldEvaluator ev(cfg, ch, n_chi, n_eps);
    const Rule1D chi = gauss_legendre(n_chi);
    const Rule1D eps = trapezoid_periodic(n_eps);
    std::vector<double> out(static_cast<std::size_t>(ch.size()) * cfg.n_k());
    for (const KinematicState& s : {KinematicState{0.7, 0.3, 0.4, false}, KinematicState{2.1, 0.05, 0.9, true},
                                    KinematicState{0.2, 0.8, 0.1, false}}) {
        ev.evaluate(s, 1.0, out);
        double scale = 0.0;
        for (double x : out) scale = std::max(scale, std::abs(x));
        for (int tau = 0; tau < ch.size(); ++tau)
            for (int k1 = 0; k1 < cfg.n_k(); ++k1) {
                const double ref = scattering_manifold(s, ch[tau], k1, chi, eps, cfg.gamma());
                EXPECT_NEAR(out[tau * cfg.n_k() + k1], ref, 1e-12 * scale) << "tau=" << tau << " k1=" << k1;
            }
    }
}

TEST(Manifold, VanishesAtZeroRelativeSpeed) {
    const KinematicState s{1.0, 0.0, 0.0, false};
    EXPECT_EQ(s.u(), 0.0);
    EXPECT_EQ(scattering_manifold(s, Channel{1, 1, 0}, 1, gauss_legendre(4), trapezoid_periodic(5), 0.0), 0.0);
}

TEST(ChannelConstant, ValuesAndSelectionRules) {
    EXPECT_NEAR(channel_constant(Channel{0, 0, 0}), 8.0 * kPi * kPi * 2.0 * std::sqrt(kPi), 1e-12);
    EXPECT_THROW(channel_constant(Channel{1, 0, 0}), DomainError);
}

class RTensorProperties : public ::testing::TestWithParam<double> {};

TEST_P(RTensorProperties, SymmetryAndCorrections) {
    const double gamma = GetParam();
    const SpectralConfig cfg(2, 3, gamma);
    const ChannelTable ch(3);
    const GridSpec grid = grid_sizes(2, 3, 4, 4);
    RTensor r = assemble_r_tensor(cfg, grid, ch);
    EXPECT_TRUE(r.flags().symmetrized);
    const int nk = r.n_k();
    for (int tau = 0; tau < ch.size(); ++tau) {
        const int sw = ch.index(ch[tau].l1, ch[tau].l3, ch[tau].l2);
        for (int k1 = 0; k1 < nk; ++k1)
            for (int k2 = 0; k2 < nk; ++k2)
                for (int k3 = 0; k3 < nk; ++k3) EXPECT_EQ(r(k1, k2, k3, tau), r(k1, k3, k2, sw));
    }

    // invariant rows vanish by the elastic structure, up to rounding
    EXPECT_LT(apply_conservation(r, ch), 1e-13);
    EXPECT_EQ(apply_conservation(r, ch), 0.0);
    // Q(M, M) only vanishes up to quadrature error, which falls with padding
    const double bal = apply_detailed_balance(r, ch);
    EXPECT_LT(bal, 1e-7);
    EXPECT_EQ(apply_detailed_balance(r, ch), 0.0);
    RTensor fine = assemble_r_tensor(cfg, grid_sizes(2, 3, 8, 8), ch);
    EXPECT_LT(apply_detailed_balance(fine, ch), 1e-2 * bal);
    EXPECT_EQ(r(0, 0, 0, ch.index(0, 0, 0)), 0.0);
    EXPECT_EQ(r(1, 0, 0, ch.index(0, 0, 0)), 0.0);
}

TEST_P(RTensorProperties, ThreadCountDoesNotChangeTheResult) {
    const SpectralConfig cfg(1, 2, GetParam());
    const ChannelTable ch(2);
    const GridSpec grid = grid_sizes(1, 2, 2, 2);
    const RTensor a = assemble_r_tensor(cfg, grid, ch, {.threads = 1});
    const RTensor b = assemble_r_tensor(cfg, grid, ch, {.threads = 3});
    ASSERT_EQ(a.values().size(), b.values().size());
    for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
}

INSTANTIATE_TEST_SUITE_P(Gamma, RTensorProperties, ::testing::Values(0.0, 1.0));

TEST(RTensor, UndersizedGridIsRejected) {
    const SpectralConfig cfg(2, 2);
    GridSpec g = grid_sizes(2, 2, 0, 0);
    g.n_E -= 1;
    EXPECT_THROW(assemble_r_tensor(cfg, g, ChannelTable(2)), ConfigurationError);
}
