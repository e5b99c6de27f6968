#pragma once

#include "boltzfact/harness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace boltzfact {

// One thresholded comparison inside a validation suite.
struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Pass/fail checks plus a flat table for CSV export.
struct SuiteResult {
    std::string suite;
    std::vector<Check> checks;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    bool pass() const;
};

// Each suite throws ConfigurationError when the operator does not fit its preconditions
// (wcu and bkw need gamma = 0, viscosity and stress gamma = 1, the reference tables K=4, L=6).
SuiteResult validate_wcu(const FactorizedOperator& op);
SuiteResult validate_bkw(const FactorizedOperator& op);
SuiteResult validate_galilean(const FactorizedOperator& op);
SuiteResult validate_viscosity(const FactorizedOperator& op);
SuiteResult validate_stress(const FactorizedOperator& op);
// Rebuilds R at pads {0, 2, 4, 8, 16, 32} against a pad-64 reference.
SuiteResult validate_quadconv(int k_max, int l_max, double gamma, int threads = 1);

SuiteResult run_suite(const std::string& name, const FactorizedOperator& op, int threads = 1);

// Reference values the suites compare against.
struct GalileanRow {
    double u;
    double truncation;
};
const std::vector<GalileanRow>& galilean_reference();
const std::vector<WcuGroup>& wcu_reference();
inline constexpr double kFmuSecondOrder = 1.014851;
inline constexpr double kFmuFourth = 1.016028;
inline constexpr double kFmuLimit = 1.016034;

// Uniform(-1, 1) coefficients with the equilibrium mode set to 1.
CoefficientField random_field(const SpectralConfig& cfg, std::uint64_t seed);

struct StrategyTiming {
    Strategy strategy = Strategy::AngularFirst;
    bool skipped = false;
    std::string note;
    double median_seconds = 0.0;
    double min_seconds = 0.0;
    FlopCounter counter;  // from one contraction
};

struct BenchResult {
    std::vector<StrategyTiming> timings;
    double max_rel_diff = 0.0;  // pairwise agreement of the strategies run, on the first field
};

// Times Q(c, c) on `repeats` seeded random fields. Dense is skipped with a note when the
// guard refuses the assembly.
BenchResult bench_strategies(const FactorizedOperator& op, const std::vector<Strategy>& strategies,
                             int repeats, std::uint64_t seed = 12345, const DenseLimits& limits = {});

// Largest |a - b| / max(|a|_inf, |b|_inf).
double relative_diff(const CoefficientField& a, const CoefficientField& b);

}  // namespace boltzfact
