#pragma once

#include <cstdint>
#include <vector>

namespace boltzfact {

enum class RuleDomain : std::uint8_t { Finite, HalfLine, Periodic };

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
    RuleDomain domain = RuleDomain::Finite;
    double lower = -1.0;  // interval for Finite, period start for Periodic
    double upper = 1.0;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// Gauss rule for a monic three-term recurrence p_{j+1} = (x - a_j) p_j - b_j p_{j-1},
// total weight mu0. Nodes come from the Jacobi matrix eigenvalues (Golub-Welsch);
// weights are evaluated from the Christoffel function so that tiny weights keep
// their relative accuracy.
Rule1D gauss_from_recurrence(const std::vector<double>& a, const std::vector<double>& b,
                             double mu0);

// n-point Gauss-Legendre on [-1, 1].
Rule1D gauss_legendre(int n);
// Same rule affinely mapped to [lo, hi].
Rule1D gauss_legendre(int n, double lo, double hi);
// n-point generalized Gauss-Laguerre for the weight x^a e^{-x} on [0, inf).
Rule1D gauss_laguerre_gen(int n, double a);
// n-point Gauss-Hermite for the weight e^{-x^2} on the real line.
Rule1D gauss_hermite(int n);
// Equispaced rule on [0, 2pi), exact for e^{i m x} with |m| < n.
Rule1D trapezoid_periodic(int n);

// Axis sizes of the two-patch kinematic grid.
struct GridSpec {
    int n_E = 0;
    int n_rho1 = 0;  // patch 1 outer (rho)
    int n_t1 = 0;    // patch 1 inner Duffy coordinate
    int n_h2 = 0;    // patch 2 outer (h)
    int n_t2 = 0;    // patch 2 inner Duffy coordinate
    int n_chi = 0;
    int n_eps = 0;
    int pad_rad = 0;
    int pad_ang = 0;

    bool operator==(const GridSpec&) const = default;
};

inline constexpr int kDefaultPad = 16;

// Minimum exactness sizes plus padding on the coupled kinematic axes only.
GridSpec grid_sizes(int k_max, int l_max, int pad_rad, int pad_ang);

// Throws ConfigurationError when any axis of `grid` is below the baseline for (k_max, l_max).
void validate_grid(const GridSpec& grid, int k_max, int l_max);

}  // namespace boltzfact
