// Serial reference kernels against the OpenMP lattice kernels.

#include "seqopt/evaluate.hpp"
#include "seqopt/lattice.hpp"
#include "seqopt/parallel.hpp"
#include "seqopt/reference.hpp"
#include "seqopt/simulate.hpp"
#include "seqopt/solver.hpp"

#include <benchmark/benchmark.h>

using namespace seqopt;

namespace {

ProcessModel ternary_model() {
    return IidModel(Alphabet(3), HypothesisSet::numbered(3), {{0.5, 0.3, 0.2}, {0.2, 0.5, 0.3}, {0.3, 0.2, 0.5}},
                    {{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0}});
}

ProcessModel bernoulli_model() {
    return IidModel(Alphabet(2), HypothesisSet::numbered(2), {{0.7, 0.3}, {0.3, 0.7}}, {{{0.5, 0.5}, 1.0}});
}

const LagrangeWeights kWeights = LagrangeWeights::uniform(3, 200.0);

void BM_ReferenceSolve(benchmark::State& state) {
    const auto model = ternary_model();
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::solve_truncated(model, kWeights, N, StateKind::counts).values.value);
    }
}

void BM_ParallelSolve(benchmark::State& state) {
    const auto model = ternary_model();
    const int N = static_cast<int>(state.range(0));
    set_thread_count(static_cast<int>(state.range(1)));
    const StateLattice lattice(model, N);
    for (auto _ : state) benchmark::DoNotOptimize(solve_truncated(lattice, kWeights, N).values.value);
    set_thread_count(0);
}

void BM_ReferenceExactOc(benchmark::State& state) {
    const auto model = ternary_model();
    const int N = static_cast<int>(state.range(0));
    const auto design = solve_truncated(model, kWeights, N);
    for (auto _ : state) benchmark::DoNotOptimize(reference::exact_oc(model, design.plan, kWeights).lagrangian);
}

void BM_ParallelExactOc(benchmark::State& state) {
    const auto model = ternary_model();
    const int N = static_cast<int>(state.range(0));
    set_thread_count(static_cast<int>(state.range(1)));
    const StateLattice lattice(model, N);
    const auto design = solve_truncated(lattice, kWeights, N);
    for (auto _ : state) benchmark::DoNotOptimize(exact_oc(lattice, design.plan, kWeights).lagrangian);
    set_thread_count(0);
}

void BM_MonteCarlo(benchmark::State& state) {
    const auto model = bernoulli_model();
    const auto weights = LagrangeWeights::uniform(2, 100.0);
    const auto design = solve_limit(model, weights, SolverConfig{});
    const StateLattice lattice(model, design.effective_horizon);
    set_thread_count(static_cast<int>(state.range(0)));
    SimulationOptions options;
    options.replications = 100'000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_monte_carlo(lattice, design.plan, TrueParameter::mixture(), options).asn);
    }
    set_thread_count(0);
    state.SetItemsProcessed(state.iterations() * options.replications);
}

} // namespace

BENCHMARK(BM_ReferenceSolve)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelSolve)->ArgsProduct({{40, 80}, {1, 2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ReferenceExactOc)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelExactOc)->ArgsProduct({{40, 80}, {1, 2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
