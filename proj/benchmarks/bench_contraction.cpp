// Contraction strategies at K = 4 over L, plus the two build stages.
// Single-threaded throughout; run with --benchmark_filter to pick a strategy.

#include "boltzfact/angular.hpp"
#include "boltzfact/contraction.hpp"
#include "boltzfact/validation.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>

namespace bf = boltzfact;

namespace {

// Real routing table, random radial tensor. Timing does not depend on the R values and a
// physical R at L = 10 takes minutes to assemble.
const bf::FactorizedOperator& op_for(int L) {
    static std::map<int, std::unique_ptr<bf::FactorizedOperator>> ops;
    auto& slot = ops[L];
    if (!slot) {
        const bf::SpectralConfig cfg(4, L, 0.0);
        bf::ChannelTable ch(L);
        bf::GauntCOO coo = bf::build_gaunt_coo(ch);
        bf::RTensor r(cfg.n_k(), ch.size(), 0.0, bf::grid_sizes(4, L, 0, 0));
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (double& x : r.values()) x = u(rng);
        slot = std::make_unique<bf::FactorizedOperator>(cfg, std::move(ch), std::move(coo), std::move(r));
    }
    return *slot;
}

void report(benchmark::State& state, const bf::FlopCounter& fc) {
    state.counters["MACs"] = static_cast<double>(fc.macs);
    state.counters["bytes"] = static_cast<double>(fc.bytes);
    state.counters["MAC/s"] = benchmark::Counter(static_cast<double>(fc.macs), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Dense(benchmark::State& state) {
    const bf::FactorizedOperator& op = op_for(static_cast<int>(state.range(0)));
    const bf::DenseOperator C = bf::assemble_dense(op);
    const bf::CoefficientField c = bf::random_field(op.config(), 1);
    bf::FlopCounter fc;
    bf::q_dense(C, c, &fc);
    for (auto _ : state) benchmark::DoNotOptimize(bf::q_dense(C, c));
    report(state, fc);
}

template <bf::CoefficientField (*Q)(const bf::FactorizedOperator&, const bf::CoefficientField&, bf::FlopCounter*)>
void BM_Factorized(benchmark::State& state) {
    const bf::FactorizedOperator& op = op_for(static_cast<int>(state.range(0)));
    const bf::CoefficientField c = bf::random_field(op.config(), 1);
    bf::FlopCounter fc;
    Q(op, c, &fc);
    for (auto _ : state) benchmark::DoNotOptimize(Q(op, c, nullptr));
    report(state, fc);
}

void BM_GauntTable(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(bf::build_gaunt_coo(L));
}

void BM_RTensorAssembly(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0)), L = static_cast<int>(state.range(1));
    const bf::SpectralConfig cfg(K, L, 1.0);
    const bf::ChannelTable ch(L);
    const bf::GridSpec grid = bf::grid_sizes(K, L, bf::kDefaultPad, bf::kDefaultPad);
    for (auto _ : state) benchmark::DoNotOptimize(bf::assemble_r_tensor(cfg, grid, ch));
}

}  // namespace

BENCHMARK(BM_Dense)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Factorized<bf::q_naive>)->Name("BM_Naive")->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Factorized<bf::q_radial_first>)->Name("BM_RadialFirst")->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Factorized<bf::q_angular_first>)->Name("BM_AngularFirst")->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GauntTable)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RTensorAssembly)->Args({1, 1})->Args({2, 3})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
