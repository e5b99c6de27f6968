#pragma once

// Brute-force collision tensor for K = L = 1 from the 8D weak form
//   C[a1,a2,a3] = int B M(v) M(w) psi_a2(v) psi_a3(w) [psi_a1(v') - psi_a1(v)] dsigma dv dw
// in centre-of-mass coordinates. Shares no code with the library: the eight basis functions
// are written out as polynomials and every rule is built here.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

constexpr int kDof = 8;
using Tensor = std::vector<double>;  // [a1 * 64 + a2 * 8 + a3]

struct Rule {
    std::vector<double> x, w;
};

// Gauss-Legendre on [a, b] by Newton on the three-term recurrence.
inline Rule legendre(int n, double a, double b) {
    Rule r{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.x[i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
        r.w[i] = (b - a) / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

// Gauss-Hermite (weight exp(-x^2)) for n = 5, closed form.
inline Rule hermite5() {
    const double s = std::sqrt(10.0);
    const double x1 = std::sqrt((5.0 - s) / 2.0), x2 = std::sqrt((5.0 + s) / 2.0);
    const double sp = std::sqrt(std::numbers::pi);
    const double w0 = 8.0 * sp / 15.0;
    auto wt = [&](double x) {
        // w_i = 2^{n-1} n! sqrt(pi) / (n^2 H_{n-1}(x_i)^2), H_4 = 16x^4 - 48x^2 + 12
        const double h4 = 16 * x * x * x * x - 48 * x * x + 12;
        return 16.0 * 120.0 * sp / (25.0 * h4 * h4);
    };
    return {{-x2, -x1, 0.0, x1, x2}, {wt(x2), wt(x1), w0, wt(x1), wt(x2)}};
}

// psi_alpha at velocity p, alpha = k * 4 + q with q = 0 (l = 0), 1..3 = (y, z, x).
inline void basis(const double* p, double* out) {
    const double s = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const double r0 = (1.5 - 0.5 * s) / std::sqrt(1.5);
    const double r1 = (2.5 - 0.5 * s) / std::sqrt(2.5);
    out[0] = 1.0;
    out[1] = p[1];
    out[2] = p[2];
    out[3] = p[0];
    out[4] = r0;
    out[5] = p[1] * r1;
    out[6] = p[2] * r1;
    out[7] = p[0] * r1;
}

struct SphereRule {
    std::vector<std::array<double, 3>> n;
    std::vector<double> w;
};

inline SphereRule sphere(int n_theta, int n_phi) {
    SphereRule s;
    const Rule ct = legendre(n_theta, -1.0, 1.0);
    for (int i = 0; i < n_theta; ++i)
        for (int j = 0; j < n_phi; ++j) {
            const double ph = 2.0 * std::numbers::pi * j / n_phi;
            const double st = std::sqrt(1.0 - ct.x[i] * ct.x[i]);
            s.n.push_back({st * std::cos(ph), st * std::sin(ph), ct.x[i]});
            s.w.push_back(ct.w[i] * 2.0 * std::numbers::pi / n_phi);
        }
    return s;
}

// Symmetrized in a2 <-> a3.
inline Tensor collision_tensor(double gamma) {
    const double pi = std::numbers::pi;
    const Rule gh = hermite5();
    const Rule rr = legendre(60, 0.0, 14.0);
    const SphereRule uhat = sphere(8, 16);
    const SphereRule sig = sphere(6, 12);
    Tensor C(kDof * kDof * kDof, 0.0);
    double pv[kDof], pw[kDof], pp[kDof], A[kDof];
    for (std::size_t ir = 0; ir < rr.x.size(); ++ir) {
        const double r = rr.x[ir];
        // M(v) M(w) = (2 pi)^-3 exp(-G^2 - r^2/4); B = r^gamma / (4 pi)
        const double wr = rr.w[ir] * r * r * std::exp(-0.25 * r * r) * std::pow(r, gamma) / (4.0 * pi) /
                          std::pow(2.0 * pi, 3.0);
        for (std::size_t iu = 0; iu < uhat.w.size(); ++iu) {
            const auto& e = uhat.n[iu];
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    for (int k = 0; k < 5; ++k) {
                        const double G[3] = {gh.x[i], gh.x[j], gh.x[k]};
                        const double wt = wr * uhat.w[iu] * gh.w[i] * gh.w[j] * gh.w[k];
                        double v[3], w[3];
                        for (int d = 0; d < 3; ++d) {
                            v[d] = G[d] + 0.5 * r * e[d];
                            w[d] = G[d] - 0.5 * r * e[d];
                        }
                        basis(v, pv);
                        basis(w, pw);
                        for (int a = 0; a < kDof; ++a) A[a] = -4.0 * pi * pv[a];
                        for (std::size_t is = 0; is < sig.w.size(); ++is) {
                            double vp[3];
                            for (int d = 0; d < 3; ++d) vp[d] = G[d] + 0.5 * r * sig.n[is][d];
                            basis(vp, pp);
                            for (int a = 0; a < kDof; ++a) A[a] += sig.w[is] * pp[a];
                        }
                        for (int a1 = 0; a1 < kDof; ++a1) {
                            const double x = wt * A[a1];
                            for (int a2 = 0; a2 < kDof; ++a2) {
                                const double y = x * pv[a2];
                                for (int a3 = 0; a3 < kDof; ++a3) C[(a1 * kDof + a2) * kDof + a3] += y * pw[a3];
                            }
                        }
                    }
        }
    }
    Tensor S(C.size());
    for (int a1 = 0; a1 < kDof; ++a1)
        for (int a2 = 0; a2 < kDof; ++a2)
            for (int a3 = 0; a3 < kDof; ++a3)
                S[(a1 * kDof + a2) * kDof + a3] =
                    0.5 * (C[(a1 * kDof + a2) * kDof + a3] + C[(a1 * kDof + a3) * kDof + a2]);
    return S;
}

}  // namespace oracle
