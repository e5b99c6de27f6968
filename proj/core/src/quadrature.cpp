#include "boltzfact/quadrature.hpp"

#include "boltzfact/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace boltzfact {

namespace {

// Orthonormal recurrence: sqrt(b_{j+1}) p_{j+1} = (x - a_j) p_j - sqrt(b_j) p_{j-1}.
// Returns sum_{j<n} p_j(x)^2 with p_0 = 1/sqrt(mu0). Rescales to avoid overflow.
double christoffel_sum(const std::vector<double>& a, const std::vector<double>& b, double mu0,
                       double x, int n) {
    double p_prev = 0.0;
    double p = 1.0 / std::sqrt(mu0);
    double sum = p * p;
    double log_scale = 0.0;  // actual values are p * exp(log_scale)
    for (int j = 0; j + 1 < n; ++j) {
        const double sb_next = std::sqrt(b[j + 1]);
        const double sb = j > 0 ? std::sqrt(b[j]) : 0.0;
        const double p_next = ((x - a[j]) * p - sb * p_prev) / sb_next;
        p_prev = p;
        p = p_next;
        const double mag = std::abs(p);
        if (mag > 1e100) {
            p /= mag;
            p_prev /= mag;
            sum /= mag * mag;
            log_scale += std::log(mag);
        }
        sum += p * p;
    }
    return log_scale == 0.0 ? sum : sum * std::exp(2.0 * log_scale);
}

// Value of the degree-n orthonormal polynomial and its derivative (up to a common
// positive factor) for a Newton correction of an eigenvalue estimate.
double newton_step(const std::vector<double>& a, const std::vector<double>& b, double x, int n) {
    double p_prev = 0.0, p = 1.0;
    double d_prev = 0.0, d = 0.0;
    for (int j = 0; j < n; ++j) {
        const double sb_next = std::sqrt(b[j + 1]);
        const double sb = j > 0 ? std::sqrt(b[j]) : 0.0;
        const double p_next = ((x - a[j]) * p - sb * p_prev) / sb_next;
        const double d_next = (p + (x - a[j]) * d - sb * d_prev) / sb_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
        const double mag = std::max(std::abs(p), std::abs(d));
        if (mag > 1e100) {
            p /= mag;
            p_prev /= mag;
            d /= mag;
            d_prev /= mag;
        }
    }
    return d != 0.0 ? p / d : 0.0;
}

}  // namespace

Rule1D gauss_from_recurrence(const std::vector<double>& a, const std::vector<double>& b,
                             double mu0) {
    const int n = static_cast<int>(a.size());
    if (n < 1) throw DomainError("gauss rule needs at least one node");
    if (static_cast<int>(b.size()) < n + 1)
        throw DomainError("recurrence needs b_0..b_n");

    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    for (int j = 0; j < n; ++j) diag[j] = a[j];
    for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(b[j]);

    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = a[0];
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
        for (int i = 0; i < n; ++i) rule.nodes[i] = es.eigenvalues()[i];
        // Newton polish: eigenvalues carry absolute error ~eps*|J|, too much for small nodes
        for (int i = 0; i < n; ++i) {
            double x = rule.nodes[i];
            for (int it = 0; it < 4; ++it) {
                const double dx = newton_step(a, b, x, n);
                x -= dx;
                if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
            }
            rule.nodes[i] = x;
        }
        std::sort(rule.nodes.begin(), rule.nodes.end());
    }
    for (int i = 0; i < n; ++i)
        rule.weights[i] = 1.0 / christoffel_sum(a, b, mu0, rule.nodes[i], n);
    return rule;
}

Rule1D gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1, got " + std::to_string(n));
    std::vector<double> a(n, 0.0), b(n + 1, 0.0);
    b[0] = 2.0;
    for (int j = 1; j <= n; ++j) b[j] = double(j) * j / (4.0 * j * j - 1.0);
    Rule1D r = gauss_from_recurrence(a, b, 2.0);
    // enforce exact antisymmetry of the nodes and symmetry of the weights
    for (int i = 0; i < n / 2; ++i) {
        const int k = n - 1 - i;
        const double x = 0.5 * (r.nodes[k] - r.nodes[i]);
        const double w = 0.5 * (r.weights[k] + r.weights[i]);
        r.nodes[i] = -x;
        r.nodes[k] = x;
        r.weights[i] = r.weights[k] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    r.domain = RuleDomain::Finite;
    r.lower = -1.0;
    r.upper = 1.0;
    return r;
}

Rule1D gauss_legendre(int n, double lo, double hi) {
    Rule1D r = gauss_legendre(n);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    r.lower = lo;
    r.upper = hi;
    return r;
}

Rule1D gauss_laguerre_gen(int n, double alpha) {
    if (n < 1) throw DomainError("gauss_laguerre_gen: n must be >= 1, got " + std::to_string(n));
    if (!(alpha > -1.0)) throw DomainError("gauss_laguerre_gen: exponent must exceed -1");
    std::vector<double> a(n), b(n + 1);
    for (int j = 0; j < n; ++j) a[j] = 2.0 * j + alpha + 1.0;
    b[0] = std::tgamma(alpha + 1.0);
    for (int j = 1; j <= n; ++j) b[j] = j * (j + alpha);
    Rule1D r = gauss_from_recurrence(a, b, b[0]);
    r.domain = RuleDomain::HalfLine;
    r.lower = 0.0;
    r.upper = INFINITY;
    return r;
}

Rule1D gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite: n must be >= 1");
    std::vector<double> a(n, 0.0), b(n + 1);
    b[0] = std::sqrt(std::numbers::pi);
    for (int j = 1; j <= n; ++j) b[j] = 0.5 * j;
    Rule1D r = gauss_from_recurrence(a, b, b[0]);
    r.domain = RuleDomain::Finite;
    r.lower = -INFINITY;
    r.upper = INFINITY;
    return r;
}

Rule1D trapezoid_periodic(int n) {
    if (n < 1) throw DomainError("trapezoid_periodic: n must be >= 1");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.assign(n, 2.0 * std::numbers::pi / n);
    for (int j = 0; j < n; ++j) r.nodes[j] = 2.0 * std::numbers::pi * j / n;
    r.domain = RuleDomain::Periodic;
    r.lower = 0.0;
    r.upper = 2.0 * std::numbers::pi;
    return r;
}

GridSpec grid_sizes(int K, int L, int pad_rad, int pad_ang) {
    if (K < 0 || L < 0 || pad_rad < 0 || pad_ang < 0)
        throw DomainError("grid_sizes: arguments must be non-negative");
    GridSpec g;
    // integer forms of ceil((3K + 1.5L + 3)/2), ceil(1.5L), floor(1.5L), ceil(0.5L)
    g.n_E = (6 * K + 3 * L + 6 + 3) / 4 + pad_rad;
    g.n_rho1 = 4 * K + 3 * L + 4 + pad_rad;
    g.n_t1 = K + (3 * L + 1) / 2 + 1 + pad_ang;
    g.n_h2 = 4 * K + 3 * L + 4 + pad_ang;
    g.n_t2 = 3 * K + (3 * L) / 2 + 3 + pad_rad;
    g.n_chi = K + (L + 1) / 2 + 1;
    g.n_eps = 2 * K + L + 1;
    g.pad_rad = pad_rad;
    g.pad_ang = pad_ang;
    return g;
}

void validate_grid(const GridSpec& g, int K, int L) {
    const GridSpec base = grid_sizes(K, L, 0, 0);
    auto check = [](int have, int need, const char* axis) {
        if (have < need)
            throw ConfigurationError(std::string("quadrature axis ") + axis + " has " +
                                     std::to_string(have) + " nodes, exactness bound needs " +
                                     std::to_string(need));
    };
    check(g.n_E, base.n_E, "E");
    check(g.n_rho1, base.n_rho1, "rho (patch 1)");
    check(g.n_t1, base.n_t1, "t (patch 1)");
    check(g.n_h2, base.n_h2, "h (patch 2)");
    check(g.n_t2, base.n_t2, "t (patch 2)");
    check(g.n_chi, base.n_chi, "chi");
    check(g.n_eps, base.n_eps, "eps");
}

}  // namespace boltzfact
