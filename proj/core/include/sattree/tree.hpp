#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sattree {

using FeatureRow = std::vector<std::uint8_t>;

// Leaf label meaning "no class assigned"; such leaves are removable by prune.
inline constexpr int kDontCare = -1;

// Perfect binary decision tree of depth k in array form. Internal node q
// (1-based) has children 2q and 2q+1; the false branch goes left, the true
// branch right. Leaves are indexed 0..2^k-1; the bit string of a leaf index,
// high bit first, spells the branch choices from the root.
class DecisionTree {
 public:
  DecisionTree(int depth, std::vector<int> node_feature, std::vector<int> leaf_class);

  // Single-leaf tree of depth 0.
  static DecisionTree leaf(int cls);

  int depth() const { return k_; }
  int num_nodes() const { return static_cast<int>(node_feature_.size()); }
  int num_leaves() const { return static_cast<int>(leaf_class_.size()); }
  // Feature tested at internal node q, 1-based.
  int feature_at(int q) const { return node_feature_[static_cast<std::size_t>(q) - 1]; }
  // Class of leaf v, or kDontCare.
  int leaf_at(int v) const { return leaf_class_[static_cast<std::size_t>(v)]; }

  const std::vector<int>& node_features() const { return node_feature_; }
  const std::vector<int>& leaf_classes() const { return leaf_class_; }

  // Replaces every kDontCare leaf with `cls`; returns how many were replaced.
  int default_dont_care_leaves(int cls);

  bool operator==(const DecisionTree&) const = default;

 private:
  int k_;
  std::vector<int> node_feature_;
  std::vector<int> leaf_class_;
};

// Possibly imperfect tree produced by pruning away dont-care leaves. Nodes
// live in a flat arena; every internal node has exactly two children.
class PrunedTree {
 public:
  static PrunedTree make_leaf(int cls);
  static PrunedTree make_internal(int feature, PrunedTree left, PrunedTree right);

  bool is_leaf_root() const;
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int leaf_count() const;
  int depth() const;

  int classify(std::span<const std::uint8_t> example) const;

  std::string serialize() const;
  static PrunedTree deserialize(const std::string& json_text);
  std::string to_dot() const;

  bool operator==(const PrunedTree&) const;

 private:
  friend PrunedTree prune(const DecisionTree& tree);
  struct Node {
    int feature_or_class;  // feature when internal, class when leaf
    int left = -1;         // -1 marks a leaf
    int right = -1;
  };
  PrunedTree() = default;
  int depth_of(int node) const;

  std::vector<Node> nodes_;
  int root_ = -1;
};

// Walks the tree on one example. Returns kDontCare when an unlabelled leaf
// is reached. Throws EvaluationError when a tested feature index is out of
// the example's range.
int classify(const DecisionTree& tree, std::span<const std::uint8_t> example);
int classify(const PrunedTree& tree, std::span<const std::uint8_t> example);

// First example (in stored order) whose classification differs from its
// label, with kDontCare counting as a mismatch; nullopt when consistent.
std::optional<std::size_t> first_counterexample(const DecisionTree& tree,
                                                std::span<const FeatureRow> rows,
                                                std::span<const int> labels);
std::optional<std::size_t> first_counterexample(const PrunedTree& tree,
                                                std::span<const FeatureRow> rows,
                                                std::span<const int> labels);

// Collapses every internal node one of whose subtrees holds only dont-care
// leaves into its other subtree. Throws PruneError when all leaves are
// dont-care.
PrunedTree prune(const DecisionTree& tree);

std::string serialize(const DecisionTree& tree);
DecisionTree deserialize_decision_tree(const std::string& json_text);
std::string to_dot(const DecisionTree& tree);

}  // namespace sattree
