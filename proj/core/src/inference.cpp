#include "sattree/inference.hpp"

#include <algorithm>
#include <cassert>

#include "sattree/errors.hpp"

namespace sattree {

namespace {

using Clock = std::chrono::steady_clock;

std::optional<Clock::time_point> deadline_from(const InferenceConfig& cfg) {
  if (!cfg.time_budget) return std::nullopt;
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(*cfg.time_budget);
}

std::optional<std::chrono::duration<double>> remaining(
    const std::optional<Clock::time_point>& deadline) {
  if (!deadline) return std::nullopt;
  return std::chrono::duration<double>(*deadline - Clock::now());
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int majority_class(const BinaryDataset& data) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(data.num_classes, 1)), 0);
  for (int label : data.labels) counts[static_cast<std::size_t>(label)]++;
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

bool single_class(const BinaryDataset& data) {
  for (int label : data.labels) {
    if (label != data.labels.front()) return false;
  }
  return true;
}

}  // namespace

InferenceSession::InferenceSession(const BinaryDataset& data, int depth, bool with_cardinality,
                                   const InferenceConfig& cfg)
    : data_(data),
      cfg_(cfg),
      varmap_(depth, data.num_features, std::max(data.num_classes, 1)),
      rng_(cfg.seed) {
  if (depth >= 1 && data.num_features < 1) {
    throw Error("cannot branch on a dataset with no features");
  }
  emit_node_feature_constraints(buffer_, varmap_);
  if (with_cardinality) emit_cardinality(buffer_, varmap_);
  feed_solver();
}

void InferenceSession::feed_solver() {
  solver_.ensure_vars(varmap_.num_allocated());
  const auto& clauses = buffer_.clauses();
  for (; fed_ < clauses.size(); fed_++) solver_.add_clause(clauses[fed_]);
}

void InferenceSession::add_example(std::size_t index) {
  const FeatureRow& row = data_.rows[index];
  const int label = data_.labels[index];
  auto it = added_.find(row);
  if (it != added_.end()) {
    if (it->second != label) {
      throw ContradictoryDataset("feature vector added under labels " +
                                 std::to_string(it->second) + " and " + std::to_string(label));
    }
    // A vector already constrained to its own label is classified correctly
    // by every model, so it can never come back as a counterexample.
    throw EncodingBug("counterexample already constrained");
  }
  added_.emplace(row, label);
  varmap_.alloc_example(static_cast<int>(index));
  emit_feature_constraints(buffer_, varmap_, static_cast<int>(index), row);
  emit_class_constraints(buffer_, varmap_, static_cast<int>(index), label);
  feed_solver();
  examples_used_++;
}

std::optional<std::size_t> InferenceSession::pick_counterexample(const DecisionTree& tree) {
  if (cfg_.policy == CounterexamplePolicy::kFirstInOrder) {
    return first_counterexample(tree, data_.rows, data_.labels);
  }
  std::vector<std::size_t> mismatched;
  for (std::size_t i = 0; i < data_.rows.size(); i++) {
    if (classify(tree, data_.rows[i]) != data_.labels[i]) mismatched.push_back(i);
  }
  if (mismatched.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, mismatched.size() - 1);
  return mismatched[pick(rng_)];
}

FixedResult InferenceSession::run(std::optional<int> max_leaves,
                                  std::optional<Clock::time_point> deadline) {
  std::vector<int> assumptions;
  if (max_leaves) {
    if (*max_leaves < 1 || *max_leaves > varmap_.num_leaves()) {
      throw Error("leaf bound out of range: " + std::to_string(*max_leaves));
    }
    assumptions.push_back(leaf_bound_literal(varmap_, *max_leaves));
  }

  for (;;) {
    auto budget = remaining(deadline);
    if (budget && budget->count() <= 0.0) return {InferStatus::kTimedOut, std::nullopt, {}};
    iterations_++;
    const Solver::Result res = solver_.solve(assumptions, budget);
    if (res == Solver::Result::kUnsat) return {InferStatus::kNoSolution, std::nullopt, {}};
    if (res == Solver::Result::kUnknown) return {InferStatus::kTimedOut, std::nullopt, {}};
    if (cfg_.model_inspector) cfg_.model_inspector(solver_, buffer_);

    DecisionTree candidate = decode_model(solver_, varmap_);
    auto counterexample = pick_counterexample(candidate);
    if (!counterexample) {
      InferenceReport report;
      report.depth = varmap_.depth();
      report.node_count = 2 * varmap_.num_leaves() - 1;
      report.examples_used = examples_used_;
      report.iterations = iterations_;
      report.clauses = buffer_.clause_count();
      report.variables = static_cast<std::uint64_t>(varmap_.num_allocated());
      return {InferStatus::kFound, std::move(candidate), report};
    }
    add_example(*counterexample);
  }
}

DecisionTree decode_model(const Solver& solver, const VarMap& vm) {
  std::vector<int> node_feature;
  node_feature.reserve(static_cast<std::size_t>(vm.num_nodes()));
  for (int q = 1; q <= vm.num_nodes(); q++) {
    int chosen = -1;
    for (int f = 0; f < vm.num_features(); f++) {
      if (!solver.value(vm.f(q, f))) continue;
      if (chosen != -1) {
        throw EncodingBug("node " + std::to_string(q) + " carries two features");
      }
      chosen = f;
    }
    if (chosen == -1) throw EncodingBug("node " + std::to_string(q) + " carries no feature");
    node_feature.push_back(chosen);
  }
  std::vector<int> leaf_class;
  leaf_class.reserve(static_cast<std::size_t>(vm.num_leaves()));
  for (int v = 0; v < vm.num_leaves(); v++) {
    int cls = kDontCare;
    for (int a = 0; a < vm.num_classes(); a++) {
      if (solver.value(vm.c(v, a))) {
        cls = a;
        break;
      }
    }
    leaf_class.push_back(cls);
  }
  return DecisionTree(vm.depth(), std::move(node_feature), std::move(leaf_class));
}

FixedResult infer_fixed(const BinaryDataset& data, int depth, std::optional<int> max_leaves,
                        const InferenceConfig& cfg) {
  const auto start = Clock::now();
  InferenceSession session(data, depth, max_leaves.has_value(), cfg);
  FixedResult result = session.run(max_leaves, deadline_from(cfg));
  result.report.wall_seconds = seconds_since(start);
  return result;
}

namespace {

// Minimal-depth search keeping dont-care leaves intact.
DepthResult min_depth_raw(const BinaryDataset& data, const InferenceConfig& cfg,
                          const std::optional<Clock::time_point>& deadline) {
  const auto start = Clock::now();
  if (data.rows.empty()) throw EmptyDatasetError("cannot infer from an empty dataset");

  if (single_class(data)) {
    InferenceReport report;
    report.depth = 0;
    report.node_count = 1;
    return {DecisionTree::leaf(data.labels.front()), report};
  }

  const int max_depth = cfg.max_depth.value_or(data.num_features);
  if (cfg.start_depth > max_depth) {
    throw Error("start_depth " + std::to_string(cfg.start_depth) + " exceeds max_depth " +
                std::to_string(max_depth));
  }
  for (int k = cfg.start_depth; k <= max_depth; k++) {
    InferenceSession session(data, k, /*with_cardinality=*/false, cfg);
    FixedResult res = session.run(std::nullopt, deadline);
    switch (res.status) {
      case InferStatus::kFound: {
        res.report.wall_seconds = seconds_since(start);
        return {std::move(*res.tree), res.report};
      }
      case InferStatus::kNoSolution:
        continue;
      case InferStatus::kTimedOut:
        throw TimeoutError("time budget exhausted at depth " + std::to_string(k));
    }
  }
  throw DepthCapExceeded("no consistent tree up to depth " + std::to_string(max_depth));
}

}  // namespace

DepthResult infer_min_depth(const BinaryDataset& data, const InferenceConfig& cfg) {
  DepthResult result = min_depth_raw(data, cfg, deadline_from(cfg));
  result.report.defaulted_leaves = result.tree.default_dont_care_leaves(majority_class(data));
  if (first_counterexample(result.tree, data.rows, data.labels)) {
    throw EncodingBug("inferred tree is not consistent with the dataset");
  }
  return result;
}

SizeResult infer_min_size(const BinaryDataset& data, const InferenceConfig& cfg) {
  const auto start = Clock::now();
  const auto deadline = deadline_from(cfg);
  DepthResult depth_phase = min_depth_raw(data, cfg, deadline);
  const int k = depth_phase.report.depth;

  auto finish = [&](PrunedTree tree, InferenceReport report, bool complete) {
    if (first_counterexample(tree, data.rows, data.labels)) {
      throw EncodingBug("pruned tree is not consistent with the dataset");
    }
    report.depth = k;
    report.node_count = tree.node_count();
    report.wall_seconds = seconds_since(start);
    report.complete = complete;
    return SizeResult{std::move(tree), std::move(report)};
  };

  if (k == 0) return finish(PrunedTree::make_leaf(data.labels.front()), depth_phase.report, true);

  InferenceSession session(data, k, /*with_cardinality=*/true, cfg);
  auto session_report = [&] {
    InferenceReport r;
    r.examples_used = session.examples_used();
    r.iterations = session.iterations();
    r.clauses = session.buffer().clause_count();
    r.variables = static_cast<std::uint64_t>(session.varmap().num_allocated());
    return r;
  };

  // The depth phase proved the vacuous bound L = 2^k feasible; run it once
  // to seed the session and get a tree whose leaf count tightens hi.
  PrunedTree best = prune(depth_phase.tree);
  int hi = 1 << k;
  {
    FixedResult res = session.run(hi, deadline);
    if (res.status == InferStatus::kTimedOut) {
      return finish(std::move(best), session_report(), false);
    }
    if (res.status != InferStatus::kFound) {
      throw EncodingBug("vacuous leaf bound reported unsatisfiable");
    }
    best = prune(*res.tree);
    hi = best.leaf_count();
  }

  int lo = 1;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    FixedResult res = session.run(mid, deadline);
    switch (res.status) {
      case InferStatus::kFound:
        best = prune(*res.tree);
        hi = best.leaf_count();  // never above mid
        break;
      case InferStatus::kNoSolution:
        lo = mid + 1;
        break;
      case InferStatus::kTimedOut:
        return finish(std::move(best), session_report(), false);
    }
  }
  return finish(std::move(best), session_report(), true);
}

}  // namespace sattree
