#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>

#include "sattree/cnf.hpp"
#include "sattree/dataset.hpp"
#include "sattree/solver.hpp"
#include "sattree/tree.hpp"

namespace sattree {

enum class CounterexamplePolicy { kFirstInOrder, kSeededRandom };

struct InferenceConfig {
  CounterexamplePolicy policy = CounterexamplePolicy::kFirstInOrder;
  std::uint64_t seed = 0;  // drives kSeededRandom
  std::optional<std::chrono::duration<double>> time_budget;
  int start_depth = 1;
  std::optional<int> max_depth;  // defaults to the feature count
  // Instrumentation hook invoked after every satisfiable solve with the
  // solver and the mirrored clause store (e.g. for model re-verification).
  std::function<void(const Solver&, const CnfBuffer&)> model_inspector;
};

struct InferenceReport {
  int depth = 0;
  int node_count = 0;
  std::size_t examples_used = 0;
  std::size_t iterations = 0;  // solve calls
  std::uint64_t clauses = 0;
  std::uint64_t variables = 0;
  double wall_seconds = 0.0;
  int defaulted_leaves = 0;  // dont-care leaves given the majority class
  bool complete = true;      // false when a size search returned early
};

enum class InferStatus { kFound, kNoSolution, kTimedOut };

struct FixedResult {
  InferStatus status;
  std::optional<DecisionTree> tree;
  InferenceReport report;
};

struct DepthResult {
  DecisionTree tree;
  InferenceReport report;
};

struct SizeResult {
  PrunedTree tree;
  InferenceReport report;
};

// One incremental run: a solver session plus the clause mirror, variable
// map and the set of examples whose constraints have been added. The size
// driver keeps a session alive across leaf bounds; bounds are imposed per
// solve through an assumption literal, never as clauses.
class InferenceSession {
 public:
  InferenceSession(const BinaryDataset& data, int depth, bool with_cardinality,
                   const InferenceConfig& cfg);

  // Counterexample loop at an optional leaf bound. Solves, decodes a
  // candidate, returns it if consistent with the whole dataset, otherwise
  // adds one mislabelled example's constraints and repeats.
  FixedResult run(std::optional<int> max_leaves,
                  std::optional<std::chrono::steady_clock::time_point> deadline);

  std::size_t examples_used() const { return examples_used_; }
  std::size_t iterations() const { return iterations_; }
  const CnfBuffer& buffer() const { return buffer_; }
  const VarMap& varmap() const { return varmap_; }

 private:
  void add_example(std::size_t index);
  void feed_solver();
  std::optional<std::size_t> pick_counterexample(const DecisionTree& tree);

  const BinaryDataset& data_;
  InferenceConfig cfg_;
  VarMap varmap_;
  CnfBuffer buffer_;
  Solver solver_;
  std::size_t fed_ = 0;
  std::size_t examples_used_ = 0;
  std::size_t iterations_ = 0;
  std::map<FeatureRow, int> added_;
  std::mt19937_64 rng_;
};

// Reads the tree out of a satisfying assignment: each internal node's unique
// true F variable, each leaf's lowest true C variable (dont-care when none).
DecisionTree decode_model(const Solver& solver, const VarMap& vm);

// Algorithm run at one fixed depth, fresh session.
FixedResult infer_fixed(const BinaryDataset& data, int depth, std::optional<int> max_leaves,
                        const InferenceConfig& cfg);

// Minimal-depth driver: k = 0 directly for single-class data, otherwise
// probes start_depth, start_depth+1, ... Dont-care leaves of the winning
// perfect tree receive the dataset's majority class; the count is reported.
DepthResult infer_min_depth(const BinaryDataset& data, const InferenceConfig& cfg);

// Minimal-node driver: fixes k via infer_min_depth, then binary-searches the
// leaf bound over [1, 2^k] in one shared session (node count = 2L - 1). On
// timeout returns the best tree found so far with report.complete = false.
SizeResult infer_min_size(const BinaryDataset& data, const InferenceConfig& cfg);

}  // namespace sattree
