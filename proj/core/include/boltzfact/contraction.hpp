#pragma once

#include "boltzfact/angular.hpp"
#include "boltzfact/basis.hpp"
#include "boltzfact/kinematic.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace boltzfact {

// Instrumentation filled in by the contraction kernels. `macs` counts multiply-adds in the
// dominant loops, `bytes` estimates operand traffic.
struct FlopCounter {
    std::uint64_t macs = 0;
    std::uint64_t bytes = 0;
    double seconds = 0.0;
    void reset() { *this = FlopCounter{}; }
};

// C = G (x) R: Gaunt routing table, radial tensor and the truncation they share.
class FactorizedOperator {
public:
    FactorizedOperator() = default;
    FactorizedOperator(SpectralConfig cfg, ChannelTable channels, GauntCOO coo, RTensor r);

    const SpectralConfig& config() const { return cfg_; }
    const ChannelTable& channels() const { return channels_; }
    const GauntCOO& coo() const { return coo_; }
    const RTensor& r() const { return r_; }
    RTensor& mutable_r() { return r_; }
    std::size_t n_slices() const { return coo_.n_slices(); }

    // Distinct (q2, q3, tau) keys used by the radial-first strategy, and the key of each row.
    struct PsiKey {
        std::uint32_t q2, q3, tau;
    };
    const std::vector<PsiKey>& psi_keys() const { return psi_keys_; }
    const std::vector<std::uint32_t>& row_psi() const { return row_psi_; }

private:
    SpectralConfig cfg_;
    ChannelTable channels_;
    GauntCOO coo_;
    RTensor r_;
    std::vector<PsiKey> psi_keys_;
    std::vector<std::uint32_t> row_psi_;
};

struct BuildOptions {
    int threads = 1;
    bool conservation = true;
    bool detailed_balance = true;
};

// Channels, Gaunt table and corrected R tensor for a truncation and grid.
FactorizedOperator build_operator(const SpectralConfig& cfg, const GridSpec& grid,
                                  const BuildOptions& opts = {});

struct DenseOperator {
    int n_dof = 0;
    std::vector<double> c;  // C[a1, a2, a3] at (a1 * n + a2) * n + a3
    double operator()(int a1, int a2, int a3) const {
        return c[(static_cast<std::size_t>(a1) * n_dof + a2) * n_dof + a3];
    }
};

struct DenseLimits {
    int max_dof = 1024;
    bool check_memory = true;  // also refuse when the tensor exceeds available memory
};

std::uint64_t available_memory_bytes();

// Throws CapacityError above the guard.
DenseOperator assemble_dense(const FactorizedOperator& op, const DenseLimits& limits = {});

CoefficientField q_dense(const DenseOperator& C, const CoefficientField& c, FlopCounter* counter = nullptr);
CoefficientField q_naive(const FactorizedOperator& op, const CoefficientField& c, FlopCounter* counter = nullptr);
CoefficientField q_radial_first(const FactorizedOperator& op, const CoefficientField& c,
                                FlopCounter* counter = nullptr);
// Throws ContractViolation when the COO rows are not grouped by (tau, q1).
CoefficientField q_angular_first(const FactorizedOperator& op, const CoefficientField& c,
                                 FlopCounter* counter = nullptr);

// Bilinear form Q(a, b) = sum C a b (not symmetrized) through the angular-first path.
CoefficientField q_bilinear(const FactorizedOperator& op, const CoefficientField& a, const CoefficientField& b);

enum class Strategy { Dense, Naive, RadialFirst, AngularFirst };
std::string_view strategy_name(Strategy s);
// Accepts "dense", "naive", "radial", "radial-first", "angular", "angular-first".
Strategy parse_strategy(std::string_view name);

// Jacobian dQ/dc at c, built from the factorized operator.
Eigen::MatrixXd linearize(const FactorizedOperator& op, const CoefficientField& c);

struct MemoryFootprint {
    int n_dof = 0;
    std::uint64_t dense_elements = 0;
    std::uint64_t dense_bytes = 0;
    std::uint64_t factorized_elements = 0;  // n_k^3 N_T radial values + 5 fields per COO row
    std::uint64_t factorized_bytes = 0;     // 8 bytes per radial value, 3 x u32 + f64 per row
    double ratio = 0.0;
};

MemoryFootprint memory_footprint(const SpectralConfig& cfg, std::uint64_t n_t, std::uint64_t n_g);

}  // namespace boltzfact
