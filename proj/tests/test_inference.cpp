#include "sattree/inference.hpp"

#include <doctest.h>
#include <random>
#include <set>

#include "sattree/errors.hpp"
#include "sattree/harness.hpp"
#include "oracle.hpp"

using namespace sattree;
using sattree::testing::worked_example_dataset;
using sattree::testing::make_dataset;
using sattree::testing::ModelVerifier;

TEST_CASE("fixed-depth inference solves the worked dataset at depth 2") {
  const BinaryDataset data = worked_example_dataset();
  InferenceConfig cfg;
  FixedResult res = infer_fixed(data, 2, std::nullopt, cfg);
  REQUIRE(res.status == InferStatus::kFound);
  REQUIRE(res.tree.has_value());
  CHECK(res.tree->depth() == 2);
  CHECK_FALSE(first_counterexample(*res.tree, data.rows, data.labels));
  CHECK(res.report.examples_used <= data.rows.size());
  CHECK(res.report.iterations <= data.rows.size() + 1);
}

TEST_CASE("no depth-1 tree fits the worked dataset") {
  const BinaryDataset data = worked_example_dataset();
  CHECK_FALSE(sattree::testing::oracle_tree_exists(data, 1));
  InferenceConfig cfg;
  FixedResult res = infer_fixed(data, 1, std::nullopt, cfg);
  CHECK(res.status == InferStatus::kNoSolution);
}

TEST_CASE("single-class data is solved with every leaf in that class") {
  const BinaryDataset data = make_dataset(2, 1, {{{0, 1}, 0}, {{1, 1}, 0}});
  InferenceConfig cfg;
  FixedResult res = infer_fixed(data, 1, std::nullopt, cfg);
  REQUIRE(res.status == InferStatus::kFound);
  CHECK(res.report.examples_used <= 1);
  for (int v = 0; v < res.tree->num_leaves(); v++) {
    const int cls = res.tree->leaf_at(v);
    CHECK((cls == 0 || cls == kDontCare));
  }
}

TEST_CASE("model decoding") {
  // Solve the worked instance and decode by hand-checking the invariants.
  const BinaryDataset data = worked_example_dataset();
  InferenceConfig cfg;
  SUBCASE("decode is a function of the model") {
    Solver solver;
    VarMap vm(2, 3, 2);
    CnfBuffer buf;
    emit_node_feature_constraints(buf, vm);
    for (const auto& clause : buf.clauses()) solver.add_clause(clause);
    solver.ensure_vars(vm.num_allocated());
    REQUIRE(solver.solve() == Solver::Result::kSat);
    CHECK(decode_model(solver, vm) == decode_model(solver, vm));
  }
  SUBCASE("unconstrained leaves decode as dont-care") {
    Solver solver;
    VarMap vm(1, 2, 2);
    CnfBuffer buf;
    emit_node_feature_constraints(buf, vm);
    for (const auto& clause : buf.clauses()) solver.add_clause(clause);
    solver.ensure_vars(vm.num_allocated());
    // Pin one leaf to a class and forbid the other leaf's classes.
    solver.add_clause({vm.c(0, 1)});
    solver.add_clause({-vm.c(1, 0)});
    solver.add_clause({-vm.c(1, 1)});
    REQUIRE(solver.solve() == Solver::Result::kSat);
    DecisionTree tree = decode_model(solver, vm);
    CHECK(tree.leaf_at(0) == 1);
    CHECK(tree.leaf_at(1) == kDontCare);
  }
  SUBCASE("two features on one node is an encoding bug") {
    Solver solver;
    VarMap vm(1, 2, 1);
    solver.ensure_vars(vm.num_allocated());
    solver.add_clause({vm.f(1, 0)});
    solver.add_clause({vm.f(1, 1)});
    solver.add_clause({vm.c(0, 0)});
    solver.add_clause({vm.c(1, 0)});
    REQUIRE(solver.solve() == Solver::Result::kSat);
    CHECK_THROWS_AS(decode_model(solver, vm), EncodingBug);
  }
}

TEST_CASE("minimal depth driver") {
  InferenceConfig cfg;
  SUBCASE("worked dataset needs depth 2") {
    DepthResult res = infer_min_depth(worked_example_dataset(), cfg);
    CHECK(res.report.depth == 2);
    CHECK(res.report.node_count == 7);
  }
  SUBCASE("single example gives a lone leaf") {
    const BinaryDataset data = make_dataset(3, 1, {{{1, 0, 1}, 0}});
    DepthResult res = infer_min_depth(data, cfg);
    CHECK(res.report.depth == 0);
    CHECK(res.report.node_count == 1);
    CHECK(classify(res.tree, FeatureRow{0, 0, 0}) == 0);
  }
  SUBCASE("defaulted leaves are counted") {
    // Three of four deep leaves are unreachable for this tiny dataset.
    const BinaryDataset data = make_dataset(2, 2, {{{0, 0}, 0}, {{1, 1}, 1}});
    DepthResult res = infer_min_depth(data, cfg);
    CHECK(res.report.depth == 1);
    for (int v = 0; v < res.tree.num_leaves(); v++) {
      CHECK(res.tree.leaf_at(v) != kDontCare);
    }
  }
}

TEST_CASE("minimal size driver") {
  InferenceConfig cfg;
  SUBCASE("worked dataset: depth 2, exactly 7 nodes") {
    SizeResult res = infer_min_size(worked_example_dataset(), cfg);
    CHECK(res.report.depth == 2);
    CHECK(res.report.node_count == 7);
    CHECK(res.report.complete);
    CHECK(res.tree.node_count() == 7);
  }
  SUBCASE("single-class dataset collapses to one node") {
    const BinaryDataset data = make_dataset(2, 1, {{{0, 1}, 0}, {{1, 0}, 0}});
    SizeResult res = infer_min_size(data, cfg);
    CHECK(res.report.node_count == 1);
  }
  SUBCASE("a dataset with a redundant branch prunes below the perfect size") {
    // Class is feature 0 alone; depth 1 suffices and needs 3 nodes.
    const BinaryDataset data =
        make_dataset(3, 2,
                     {{{0, 0, 1}, 0}, {{0, 1, 0}, 0}, {{1, 0, 0}, 1}, {{1, 1, 1}, 1}});
    SizeResult res = infer_min_size(data, cfg);
    CHECK(res.report.depth == 1);
    CHECK(res.report.node_count == 3);
  }
}

TEST_CASE("soundness and termination invariants on random instances") {
  std::mt19937_64 rng(17);
  ModelVerifier verifier;
  InferenceConfig cfg;
  cfg.model_inspector = std::ref(verifier);
  for (int round = 0; round < 30; round++) {
    GeneratorSpec spec;
    spec.depth = 1 + static_cast<int>(rng() % 3);
    spec.num_features = spec.depth + 1 + static_cast<int>(rng() % 3);
    spec.num_classes = 2;
    const std::size_t pool = std::size_t{1} << spec.num_features;
    spec.num_examples = 1 + static_cast<std::size_t>(rng()) % std::min<std::size_t>(12, pool);
    spec.seed = rng();
    auto [data, generating_tree] = generate_random_instance(spec);
    const ValidationReport report = validate(data);
    REQUIRE(report.feasible());

    DepthResult res = infer_min_depth(report.data, cfg);
    CHECK_FALSE(first_counterexample(res.tree, report.data.rows, report.data.labels));
    CHECK(res.report.examples_used <= report.data.rows.size());
    CHECK(res.report.depth <= spec.depth);  // the generating tree is a witness
  }
  CHECK(verifier.checked > 0);
  CHECK(verifier.passed == verifier.checked);
}

TEST_CASE("optimality matches the enumeration oracle on small instances") {
  std::mt19937_64 rng(23);
  InferenceConfig cfg;
  for (int round = 0; round < 40; round++) {
    const int m = 1 + static_cast<int>(rng() % 4);
    const int c = 1 + static_cast<int>(rng() % 3);
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 8);
    // Random distinct rows, random labels; retry on contradictions.
    std::vector<std::pair<std::vector<int>, int>> rows;
    std::set<std::vector<int>> seen;
    for (std::size_t i = 0; i < n; i++) {
      std::vector<int> bits(static_cast<std::size_t>(m));
      for (int f = 0; f < m; f++) bits[static_cast<std::size_t>(f)] = static_cast<int>(rng() % 2);
      if (!seen.insert(bits).second) continue;
      rows.push_back({bits, static_cast<int>(rng() % c)});
    }
    BinaryDataset data = make_dataset(m, c, rows);

    const auto oracle_depth = sattree::testing::oracle_min_depth(data, m);
    REQUIRE(oracle_depth.has_value());

    DepthResult depth_res = infer_min_depth(data, cfg);
    CHECK(depth_res.report.depth == *oracle_depth);

    SizeResult size_res = infer_min_size(data, cfg);
    CHECK(size_res.report.node_count ==
          sattree::testing::oracle_min_nodes(data, *oracle_depth));
  }
}

TEST_CASE("bound monotonicity") {
  const BinaryDataset data = worked_example_dataset();
  InferenceConfig cfg;
  // Found at (k=2, L=4) implies found at L bigger or depth deeper.
  for (int leaves = 4; leaves <= 4; leaves++) {
    FixedResult res = infer_fixed(data, 2, leaves, cfg);
    CHECK(res.status == InferStatus::kFound);
  }
  FixedResult deeper = infer_fixed(data, 3, 4, cfg);
  CHECK(deeper.status == InferStatus::kFound);
  FixedResult wider = infer_fixed(data, 3, 8, cfg);
  CHECK(wider.status == InferStatus::kFound);
  // And the infeasible direction stays infeasible.
  FixedResult too_tight = infer_fixed(data, 2, 3, cfg);
  CHECK(too_tight.status == InferStatus::kNoSolution);
}

TEST_CASE("both counterexample policies reach the same optimum") {
  std::mt19937_64 rng(29);
  for (int round = 0; round < 10; round++) {
    GeneratorSpec spec;
    spec.depth = 2;
    spec.num_features = 4;
    spec.num_classes = 2;
    spec.num_examples = 10;
    spec.seed = rng();
    auto [data, tree] = generate_random_instance(spec);
    const BinaryDataset clean = validate(data).data;

    InferenceConfig first;
    first.policy = CounterexamplePolicy::kFirstInOrder;
    InferenceConfig random_pick;
    random_pick.policy = CounterexamplePolicy::kSeededRandom;
    random_pick.seed = round;

    DepthResult a = infer_min_depth(clean, first);
    DepthResult b = infer_min_depth(clean, random_pick);
    CHECK(a.report.depth == b.report.depth);

    SizeResult sa = infer_min_size(clean, first);
    SizeResult sb = infer_min_size(clean, random_pick);
    CHECK(sa.report.node_count == sb.report.node_count);
  }
}

TEST_CASE("contradictory data raises when validation was skipped") {
  const BinaryDataset data = make_dataset(2, 2, {{{1, 0}, 0}, {{1, 0}, 1}});
  InferenceConfig cfg;
  CHECK_THROWS_AS(infer_fixed(data, 2, std::nullopt, cfg), ContradictoryDataset);
}

TEST_CASE("time budget propagates") {
  GeneratorSpec spec;
  spec.depth = 4;
  spec.num_features = 12;
  spec.num_classes = 2;
  spec.num_examples = 400;
  spec.seed = 5;
  auto [data, tree] = generate_random_instance(spec);
  const BinaryDataset clean = validate(data).data;
  InferenceConfig cfg;
  cfg.time_budget = std::chrono::duration<double>(1e-9);
  CHECK_THROWS_AS(infer_min_depth(clean, cfg), TimeoutError);
  SizeResult res = infer_min_size(clean, [&] {
    InferenceConfig c;
    c.time_budget = std::chrono::duration<double>(60.0);
    return c;
  }());
  CHECK(res.report.complete);
}

TEST_CASE("depth cap surfaces as an error") {
  const BinaryDataset data = worked_example_dataset();
  InferenceConfig cfg;
  cfg.max_depth = 1;
  CHECK_THROWS_AS(infer_min_depth(data, cfg), DepthCapExceeded);
}
