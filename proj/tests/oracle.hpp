#pragma once

// Test-only oracles, independent of the encoding and inference paths they
// check: exhaustive tree search by recursion over feature choices, and
// model re-verification straight off the clause list.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "sattree/cnf.hpp"
#include "sattree/dataset.hpp"
#include "sattree/solver.hpp"
#include "sattree/tree.hpp"

namespace sattree::testing {

inline constexpr long long kInfeasible = std::numeric_limits<long long>::max();

// Minimum number of occupied leaves over every depth-`depth` tree (feature
// repeats along a path allowed, exactly as the encoding permits) that is
// consistent with the data; kInfeasible when no such tree exists.
long long oracle_min_leaves(const BinaryDataset& data, int depth);

inline bool oracle_tree_exists(const BinaryDataset& data, int depth) {
  return oracle_min_leaves(data, depth) != kInfeasible;
}

// Smallest depth admitting a consistent tree, searching 0..cap.
std::optional<int> oracle_min_depth(const BinaryDataset& data, int cap);

// Minimal node count among depth-`depth` trees: 2L - 1 for L = min leaves.
inline long long oracle_min_nodes(const BinaryDataset& data, int depth) {
  const long long leaves = oracle_min_leaves(data, depth);
  return leaves == kInfeasible ? kInfeasible : 2 * leaves - 1;
}

// Evaluates every stored clause under the solver's model.
bool verify_model(const Solver& solver, const CnfBuffer& buffer);

// InferenceConfig::model_inspector hook counting verified models.
struct ModelVerifier {
  std::size_t checked = 0;
  std::size_t passed = 0;
  void operator()(const Solver& solver, const CnfBuffer& buffer) {
    checked++;
    if (verify_model(solver, buffer)) passed++;
  }
};

// Golden fixture: eight examples over four features in two classes, plus
// the known depth-2 tree that classifies all of them.
BinaryDataset worked_example_dataset();
DecisionTree worked_example_tree();

BinaryDataset make_dataset(int num_features, int num_classes,
                           const std::vector<std::pair<std::vector<int>, int>>& rows);

}  // namespace sattree::testing
