#include <benchmark/benchmark.h>

#include "qprep/circuit.hpp"
#include "qprep/compress.hpp"
#include "qprep/state.hpp"
#include "qprep/synth.hpp"
#include "qprep/tree.hpp"

using namespace qprep;

namespace {

void BM_BuildTree(benchmark::State& state) {
    const int n = int(state.range(0));
    const TargetState target = random_state(n, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_tree(target));
    }
    state.SetComplexityN(1 << n);
}
BENCHMARK(BM_BuildTree)->DenseRange(4, 12, 2)->Complexity(benchmark::oN);

void BM_SynthPyramidal(benchmark::State& state) {
    const int n = int(state.range(0));
    const PsiTree tree = build_tree(random_state(n, 12));
    for (auto _ : state) {
        benchmark::DoNotOptimize(synth_pyramidal(tree));
    }
}
BENCHMARK(BM_SynthPyramidal)->DenseRange(4, 12, 2);

void BM_SynthSubtree(benchmark::State& state) {
    const int n = int(state.range(0));
    const PsiTree tree = build_tree(random_state(n, 13));
    for (auto _ : state) {
        benchmark::DoNotOptimize(synth_subtree(tree));
    }
}
BENCHMARK(BM_SynthSubtree)->DenseRange(4, 12, 2);

void BM_RunOnZero(benchmark::State& state) {
    const int n = int(state.range(0));
    const Circuit c = synth_pyramidal(build_tree(random_state(n, 14)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_on_zero(c));
    }
}
BENCHMARK(BM_RunOnZero)->DenseRange(4, 12, 2);

void BM_GeneralizedSchmidt(benchmark::State& state) {
    const int m = int(state.range(0));
    const TargetState target = random_state(m, 15);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_generalized_schmidt(target, 1e-8));
    }
}
BENCHMARK(BM_GeneralizedSchmidt)->DenseRange(2, 4, 1);

} // namespace

BENCHMARK_MAIN();
