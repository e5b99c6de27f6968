#include "oracle.hpp"

#include "boltzfact/contraction.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <string>

using namespace boltzfact;

namespace {

double max_rel_mismatch(const DenseOperator& C, const oracle::Tensor& ref) {
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        scale = std::max(scale, std::abs(ref[i]));
        diff = std::max(diff, std::abs(C.c[i] - ref[i]));
    }
    return diff / scale;
}

}  // namespace

TEST(OracleRules, HermiteAndLegendre) {
    const oracle::Rule h = oracle::hermite5();
    double m0 = 0.0, m8 = 0.0;
    for (int i = 0; i < 5; ++i) {
        m0 += h.w[i];
        m8 += h.w[i] * std::pow(h.x[i], 8);
    }
    EXPECT_NEAR(m0, std::sqrt(std::numbers::pi), 1e-14);
    EXPECT_NEAR(m8, std::tgamma(4.5), 1e-12);
    const oracle::Rule g = oracle::legendre(9, 0.0, 2.0);
    double s = 0.0;
    for (int i = 0; i < 9; ++i) s += g.w[i] * std::pow(g.x[i], 17);
    EXPECT_NEAR(s, std::pow(2.0, 18) / 18.0, 1e-9);
}

TEST(OracleRules, BasisIsOrthonormal) {
    const oracle::Rule h = oracle::hermite5();
    double gram[8][8] = {};
    double p[3], psi[8];
    const double norm = std::pow(std::numbers::pi, -1.5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            for (int k = 0; k < 5; ++k) {
                p[0] = std::sqrt(2.0) * h.x[i];
                p[1] = std::sqrt(2.0) * h.x[j];
                p[2] = std::sqrt(2.0) * h.x[k];
                oracle::basis(p, psi);
                const double w = norm * h.w[i] * h.w[j] * h.w[k];
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b) gram[a][b] += w * psi[a] * psi[b];
            }
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) EXPECT_NEAR(gram[a][b], a == b ? 1.0 : 0.0, 1e-13);
}

class BruteForce : public ::testing::TestWithParam<double> {};

TEST_P(BruteForce, FactorizedTensorMatches8DIntegral) {
    const double gamma = GetParam();
    const SpectralConfig cfg(1, 1, gamma);
    const FactorizedOperator op = build_operator(cfg, grid_sizes(1, 1, kDefaultPad, kDefaultPad));
    const DenseOperator C = assemble_dense(op);
    ASSERT_EQ(C.n_dof, oracle::kDof);
    const oracle::Tensor ref = oracle::collision_tensor(gamma);
    const double rel = max_rel_mismatch(C, ref);
    RecordProperty("max_rel_mismatch", std::to_string(rel));
    std::printf("gamma=%g max rel mismatch %.3e\n", gamma, rel);
    EXPECT_LT(rel, 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Gamma, BruteForce, ::testing::Values(0.0, 1.0));
