#include <benchmark/benchmark.h>

#include "sattree/cnf.hpp"
#include "sattree/harness.hpp"
#include "sattree/inference.hpp"
#include "sattree/solver.hpp"

using namespace sattree;

static void BM_NodeConstraints(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  for (auto _ : state) {
    VarMap vm(k, m, 2);
    CnfBuffer buf;
    emit_node_feature_constraints(buf, vm);
    benchmark::DoNotOptimize(buf.clause_count());
  }
}
BENCHMARK(BM_NodeConstraints)->Args({4, 10})->Args({6, 10})->Args({8, 20});

static void BM_EncodeExample(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  FeatureRow row(static_cast<std::size_t>(m));
  for (int f = 0; f < m; f++) row[static_cast<std::size_t>(f)] = f & 1;
  for (auto _ : state) {
    VarMap vm(k, m, 2);
    CnfBuffer buf;
    vm.alloc_example(0);
    emit_feature_constraints(buf, vm, 0, row);
    emit_class_constraints(buf, vm, 0, 1);
    benchmark::DoNotOptimize(buf.clause_count());
  }
}
BENCHMARK(BM_EncodeExample)->Args({4, 10})->Args({6, 20});

static void BM_CardinalityCounter(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    VarMap vm(k, 1, 2);
    CnfBuffer buf;
    emit_cardinality(buf, vm);
    benchmark::DoNotOptimize(buf.clause_count());
  }
}
BENCHMARK(BM_CardinalityCounter)->Arg(4)->Arg(6)->Arg(8);

static void BM_InferDepth(benchmark::State& state) {
  GeneratorSpec spec;
  spec.depth = static_cast<int>(state.range(0));
  spec.num_features = 10;
  spec.num_classes = 2;
  spec.num_examples = static_cast<std::size_t>(state.range(1));
  spec.seed = 42;
  spec.distinct_examples = false;
  auto [data, tree] = generate_random_instance(spec);
  const BinaryDataset clean = validate(data).data;
  InferenceConfig cfg;
  for (auto _ : state) {
    DepthResult res = infer_min_depth(clean, cfg);
    benchmark::DoNotOptimize(res.report.examples_used);
  }
}
BENCHMARK(BM_InferDepth)->Args({3, 200})->Args({4, 1000})->Unit(benchmark::kMillisecond);

static void BM_InferSize(benchmark::State& state) {
  GeneratorSpec spec;
  spec.depth = static_cast<int>(state.range(0));
  spec.num_features = 10;
  spec.num_classes = 2;
  spec.num_examples = static_cast<std::size_t>(state.range(1));
  spec.seed = 42;
  spec.distinct_examples = false;
  auto [data, tree] = generate_random_instance(spec);
  const BinaryDataset clean = validate(data).data;
  InferenceConfig cfg;
  for (auto _ : state) {
    SizeResult res = infer_min_size(clean, cfg);
    benchmark::DoNotOptimize(res.report.node_count);
  }
}
BENCHMARK(BM_InferSize)->Args({3, 200})->Args({4, 1000})->Unit(benchmark::kMillisecond);

static void BM_SolverAssumptionProbe(benchmark::State& state) {
  // One shared counter, alternating feasible/infeasible bounds by assumption.
  const int k = static_cast<int>(state.range(0));
  VarMap vm(k, 1, 2);
  CnfBuffer buf;
  emit_cardinality(buf, vm);
  Solver solver;
  solver.ensure_vars(vm.num_allocated());
  for (const auto& clause : buf.clauses()) solver.add_clause(clause);
  for (int v = 0; v < vm.num_leaves(); v += 2) solver.add_clause({vm.u(v)});
  int bound = 1;
  for (auto _ : state) {
    std::vector<int> assume{leaf_bound_literal(vm, bound)};
    benchmark::DoNotOptimize(solver.solve(assume));
    bound = bound % vm.num_leaves() + 1;
  }
}
BENCHMARK(BM_SolverAssumptionProbe)->Arg(4)->Arg(6);

BENCHMARK_MAIN();
