#include "boltzfact/error.hpp"
#include "boltzfact/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace boltzfact;

namespace {

// sum_i w_i x_i^d / exact, with exact = Gamma(d + a + 1); evaluated in logs so that
// degree 255 does not overflow.
double laguerre_moment_ratio(const Rule1D& r, int d, double a) {
    const double lg = std::lgamma(d + a + 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += std::exp(std::log(r.weights[i]) + d * std::log(r.nodes[i]) - lg);
    return s;
}

double legendre_moment(const Rule1D& r, int d) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], d);
    return s;
}

}  // namespace

TEST(GaussLegendre, SmallRules) {
    const Rule1D one = gauss_legendre(1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one.nodes[0], 0.0);
    EXPECT_DOUBLE_EQ(one.weights[0], 2.0);

    const Rule1D two = gauss_legendre(2);
    EXPECT_NEAR(two.nodes[0], -1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(two.nodes[1], 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(two.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(two.weights[1], 1.0, 1e-15);

    EXPECT_NEAR(legendre_moment(gauss_legendre(4), 6), 2.0 / 7.0, 1e-15);
}

TEST(GaussLegendre, MonomialExactness) {
    for (int n : {1, 2, 3, 7, 16, 33, 64, 128}) {
        const Rule1D r = gauss_legendre(n);
        for (int d = 0; d <= 2 * n - 1; d += 2) {
            const double exact = 2.0 / (d + 1.0);
            EXPECT_NEAR(legendre_moment(r, d) / exact, 1.0, 1e-12) << "n=" << n << " d=" << d;
        }
        for (int d = 1; d <= 2 * n - 1; d += 2) EXPECT_NEAR(legendre_moment(r, d), 0.0, 1e-14);
    }
}

TEST(GaussLegendre, SymmetricNodes) {
    for (int n : {5, 6, 31, 100}) {
        const Rule1D r = gauss_legendre(n);
        for (int i = 0; i < n; ++i) {
            EXPECT_EQ(r.nodes[i], -r.nodes[n - 1 - i]);
            EXPECT_EQ(r.weights[i], r.weights[n - 1 - i]);
            EXPECT_GT(r.weights[i], 0.0);
            if (i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
        }
    }
}

TEST(GaussLegendre, MappedInterval) {
    const Rule1D r = gauss_legendre(6, 1.0, 3.0);
    EXPECT_NEAR(r.integrate([](double x) { return x * x * x * x; }), (243.0 - 1.0) / 5.0, 1e-13);
}

TEST(GaussLaguerre, OnePointRules) {
    const Rule1D half = gauss_laguerre_gen(1, 0.5);
    EXPECT_NEAR(half.nodes[0], 1.5, 1e-15);
    EXPECT_NEAR(half.weights[0], std::sqrt(std::numbers::pi) / 2.0, 1e-15);
    const Rule1D zero = gauss_laguerre_gen(1, 0.0);
    EXPECT_NEAR(zero.nodes[0], 1.0, 1e-15);
    EXPECT_NEAR(zero.weights[0], 1.0, 1e-15);
}

TEST(GaussLaguerre, MonomialExactness) {
    for (double a : {0.0, 0.5, 1.0, -0.5, 0.25}) {
        for (int n : {2, 5, 16, 32, 64, 128}) {
            const Rule1D r = gauss_laguerre_gen(n, a);
            double worst = 0.0;
            for (int d = 0; d <= 2 * n - 1; ++d) worst = std::max(worst, std::abs(laguerre_moment_ratio(r, d, a) - 1.0));
            EXPECT_LT(worst, 1e-12) << "a=" << a << " n=" << n;
        }
    }
}

TEST(GaussLaguerre, RejectsBadExponent) {
    EXPECT_THROW(gauss_laguerre_gen(4, -1.0), DomainError);
    EXPECT_THROW(gauss_laguerre_gen(0, 0.5), DomainError);
    EXPECT_THROW(gauss_legendre(0), DomainError);
}

TEST(GaussHermite, EvenMoments) {
    for (int n : {1, 4, 9, 20}) {
        const Rule1D r = gauss_hermite(n);
        for (int j = 0; 2 * j <= 2 * n - 1; ++j) {
            const double exact = std::tgamma(j + 0.5);
            EXPECT_NEAR(r.integrate([j](double x) { return std::pow(x, 2 * j); }) / exact, 1.0, 1e-12);
        }
    }
}

TEST(Trapezoid, ExactForTrigPolynomials) {
    const int n = 9;
    const Rule1D r = trapezoid_periodic(n);
    for (int m = 0; m < n; ++m) {
        EXPECT_NEAR(r.integrate([m](double x) { return std::cos(m * x); }), m == 0 ? 2.0 * std::numbers::pi : 0.0, 1e-13);
        EXPECT_NEAR(r.integrate([m](double x) { return std::sin(m * x); }), 0.0, 1e-13);
    }
}

TEST(GaussFromRecurrence, MatchesLegendre) {
    const int n = 12;
    std::vector<double> a(n, 0.0), b(n + 1, 0.0);
    b[0] = 2.0;
    for (int j = 1; j <= n; ++j) b[j] = double(j) * j / (4.0 * j * j - 1.0);
    const Rule1D r = gauss_from_recurrence(a, b, 2.0);
    const Rule1D gl = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(r.nodes[i], gl.nodes[i], 1e-15);
        EXPECT_NEAR(r.weights[i], gl.weights[i], 1e-15);
    }
}

TEST(GridSizes, FormulaValues) {
    const GridSpec g = grid_sizes(4, 4, 0, 0);
    EXPECT_EQ(g.n_E, 11);
    EXPECT_EQ(g.n_rho1, 32);
    EXPECT_EQ(g.n_h2, 32);
    EXPECT_EQ(g.n_t1, 11);
    EXPECT_EQ(g.n_t2, 21);
    EXPECT_EQ(g.n_chi, 7);
    EXPECT_EQ(g.n_eps, 13);

    // K = L = 0 evaluated from the formulas: ceil(3/2) = 2, 0 + 0 + 1 = 1, ...
    const GridSpec z = grid_sizes(0, 0, 0, 0);
    EXPECT_EQ(z.n_E, 2);
    EXPECT_EQ(z.n_rho1, 4);
    EXPECT_EQ(z.n_t1, 1);
    EXPECT_EQ(z.n_t2, 3);
    EXPECT_EQ(z.n_chi, 1);
    EXPECT_EQ(z.n_eps, 1);
}

TEST(GridSizes, OddDegreeRounding) {
    // ceil and floor of 1.5 L differ for odd L
    const GridSpec g = grid_sizes(1, 3, 0, 0);
    EXPECT_EQ(g.n_E, 6);   // ceil((3 + 4.5 + 3) / 2) = ceil(5.25)
    EXPECT_EQ(g.n_t1, 7);  // 1 + ceil(4.5) + 1
    EXPECT_EQ(g.n_t2, 10); // 3 + floor(4.5) + 3
    EXPECT_EQ(g.n_chi, 4); // 1 + ceil(1.5) + 1
}

TEST(GridSizes, PaddingOnlyOnCoupledAxes) {
    const GridSpec a = grid_sizes(3, 5, 0, 0);
    const GridSpec b = grid_sizes(3, 5, 10, 10);
    EXPECT_EQ(b.n_E, a.n_E + 10);
    EXPECT_EQ(b.n_rho1, a.n_rho1 + 10);
    EXPECT_EQ(b.n_h2, a.n_h2 + 10);
    EXPECT_EQ(b.n_t1, a.n_t1 + 10);
    EXPECT_EQ(b.n_t2, a.n_t2 + 10);
    EXPECT_EQ(b.n_chi, a.n_chi);
    EXPECT_EQ(b.n_eps, a.n_eps);
}

TEST(GridSizes, Monotone) {
    for (int K = 0; K < 6; ++K)
        for (int L = 0; L < 8; ++L) {
            const GridSpec g = grid_sizes(K, L, 2, 3);
            for (const GridSpec& h : {grid_sizes(K + 1, L, 2, 3), grid_sizes(K, L + 1, 2, 3), grid_sizes(K, L, 3, 3),
                                      grid_sizes(K, L, 2, 4)}) {
                EXPECT_GE(h.n_E, g.n_E);
                EXPECT_GE(h.n_rho1, g.n_rho1);
                EXPECT_GE(h.n_t1, g.n_t1);
                EXPECT_GE(h.n_h2, g.n_h2);
                EXPECT_GE(h.n_t2, g.n_t2);
                EXPECT_GE(h.n_chi, g.n_chi);
                EXPECT_GE(h.n_eps, g.n_eps);
            }
        }
}

TEST(GridSizes, ValidateRejectsUndersizedAxis) {
    GridSpec g = grid_sizes(2, 2, 0, 0);
    EXPECT_NO_THROW(validate_grid(g, 2, 2));
    g.n_chi -= 1;
    EXPECT_THROW(validate_grid(g, 2, 2), ConfigurationError);
    EXPECT_THROW(grid_sizes(-1, 0, 0, 0), DomainError);
}
