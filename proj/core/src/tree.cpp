#include "sattree/tree.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

#include "sattree/errors.hpp"

namespace sattree {

using nlohmann::json;

DecisionTree::DecisionTree(int depth, std::vector<int> node_feature,
                           std::vector<int> leaf_class)
    : k_(depth), node_feature_(std::move(node_feature)), leaf_class_(std::move(leaf_class)) {
  if (k_ < 0 || k_ > 30) throw Error("tree depth out of range");
  const std::size_t nodes = (std::size_t{1} << k_) - 1;
  const std::size_t leaves = std::size_t{1} << k_;
  if (node_feature_.size() != nodes || leaf_class_.size() != leaves) {
    throw Error("array sizes do not match depth " + std::to_string(k_));
  }
}

DecisionTree DecisionTree::leaf(int cls) { return DecisionTree(0, {}, {cls}); }

int DecisionTree::default_dont_care_leaves(int cls) {
  int replaced = 0;
  for (int& leaf : leaf_class_) {
    if (leaf == kDontCare) {
      leaf = cls;
      replaced++;
    }
  }
  return replaced;
}

int classify(const DecisionTree& tree, std::span<const std::uint8_t> example) {
  int q = 1;
  for (int lvl = 0; lvl < tree.depth(); lvl++) {
    const int f = tree.feature_at(q);
    if (f < 0 || static_cast<std::size_t>(f) >= example.size()) {
      throw EvaluationError("feature index " + std::to_string(f) +
                            " outside example of width " + std::to_string(example.size()));
    }
    q = example[static_cast<std::size_t>(f)] ? 2 * q + 1 : 2 * q;
  }
  return tree.leaf_at(q - tree.num_leaves());
}

int PrunedTree::classify(std::span<const std::uint8_t> example) const {
  int n = root_;
  while (nodes_[static_cast<std::size_t>(n)].left != -1) {
    const Node& node = nodes_[static_cast<std::size_t>(n)];
    const int f = node.feature_or_class;
    if (f < 0 || static_cast<std::size_t>(f) >= example.size()) {
      throw EvaluationError("feature index " + std::to_string(f) +
                            " outside example of width " + std::to_string(example.size()));
    }
    n = example[static_cast<std::size_t>(f)] ? node.right : node.left;
  }
  return nodes_[static_cast<std::size_t>(n)].feature_or_class;
}

int classify(const PrunedTree& tree, std::span<const std::uint8_t> example) {
  return tree.classify(example);
}

namespace {

template <typename Tree>
std::optional<std::size_t> first_mismatch(const Tree& tree, std::span<const FeatureRow> rows,
                                          std::span<const int> labels) {
  for (std::size_t i = 0; i < rows.size(); i++) {
    if (classify(tree, rows[i]) != labels[i]) return i;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> first_counterexample(const DecisionTree& tree,
                                                std::span<const FeatureRow> rows,
                                                std::span<const int> labels) {
  return first_mismatch(tree, rows, labels);
}

std::optional<std::size_t> first_counterexample(const PrunedTree& tree,
                                                std::span<const FeatureRow> rows,
                                                std::span<const int> labels) {
  return first_mismatch(tree, rows, labels);
}

PrunedTree PrunedTree::make_leaf(int cls) {
  PrunedTree t;
  t.nodes_.push_back({cls, -1, -1});
  t.root_ = 0;
  return t;
}

PrunedTree PrunedTree::make_internal(int feature, PrunedTree left, PrunedTree right) {
  PrunedTree t;
  t.nodes_ = std::move(left.nodes_);
  const int offset = static_cast<int>(t.nodes_.size());
  for (Node n : right.nodes_) {
    if (n.left != -1) {
      n.left += offset;
      n.right += offset;
    }
    t.nodes_.push_back(n);
  }
  t.nodes_.push_back({feature, left.root_, right.root_ + offset});
  t.root_ = static_cast<int>(t.nodes_.size()) - 1;
  return t;
}

bool PrunedTree::is_leaf_root() const {
  return nodes_[static_cast<std::size_t>(root_)].left == -1;
}

int PrunedTree::leaf_count() const { return (node_count() + 1) / 2; }

int PrunedTree::depth_of(int node) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (n.left == -1) return 0;
  return 1 + std::max(depth_of(n.left), depth_of(n.right));
}

int PrunedTree::depth() const { return depth_of(root_); }

bool PrunedTree::operator==(const PrunedTree& other) const {
  // Structural equality; arenas may lay nodes out differently.
  std::string a = serialize();
  std::string b = other.serialize();
  return a == b;
}

namespace {

// Subtree with all leaves dont-care; signals removal to the caller.
struct DeadSubtree {};

std::optional<PrunedTree> prune_rec(const DecisionTree& tree, int q, int lvl) {
  if (lvl == tree.depth()) {
    const int cls = tree.leaf_at(q - tree.num_leaves());
    if (cls == kDontCare) return std::nullopt;
    return PrunedTree::make_leaf(cls);
  }
  auto left = prune_rec(tree, 2 * q, lvl + 1);
  auto right = prune_rec(tree, 2 * q + 1, lvl + 1);
  if (!left && !right) return std::nullopt;
  if (!left) return right;
  if (!right) return left;
  return PrunedTree::make_internal(tree.feature_at(q), std::move(*left), std::move(*right));
}

}  // namespace

PrunedTree prune(const DecisionTree& tree) {
  auto result = prune_rec(tree, 1, 0);
  if (!result) throw PruneError("every leaf is dont-care; nothing to keep");
  return std::move(*result);
}

std::string serialize(const DecisionTree& tree) {
  json leaves = json::array();
  for (int cls : tree.leaf_classes()) {
    if (cls == kDontCare) {
      leaves.push_back(nullptr);
    } else {
      leaves.push_back(cls);
    }
  }
  json doc;
  doc["k"] = tree.depth();
  doc["nodes"] = tree.node_features();
  doc["leaves"] = leaves;
  return doc.dump();
}

DecisionTree deserialize_decision_tree(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DecodeError(std::string("malformed tree JSON: ") + e.what());
  }
  try {
    const int k = doc.at("k").get<int>();
    std::vector<int> nodes = doc.at("nodes").get<std::vector<int>>();
    std::vector<int> leaves;
    for (const auto& leaf : doc.at("leaves")) {
      leaves.push_back(leaf.is_null() ? kDontCare : leaf.get<int>());
    }
    return DecisionTree(k, std::move(nodes), std::move(leaves));
  } catch (const json::exception& e) {
    throw DecodeError(std::string("invalid tree JSON: ") + e.what());
  } catch (const Error& e) {
    throw DecodeError(std::string("invalid tree JSON: ") + e.what());
  }
}

std::string PrunedTree::serialize() const {
  // Recursive {feature,left,right} | {class} form.
  struct Builder {
    const std::vector<Node>& nodes;
    json build(int idx) const {
      const Node& n = nodes[static_cast<std::size_t>(idx)];
      if (n.left == -1) return json{{"class", n.feature_or_class}};
      json doc;
      doc["feature"] = n.feature_or_class;
      doc["left"] = build(n.left);
      doc["right"] = build(n.right);
      return doc;
    }
  };
  return Builder{nodes_}.build(root_).dump();
}

PrunedTree PrunedTree::deserialize(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DecodeError(std::string("malformed tree JSON: ") + e.what());
  }
  struct Builder {
    PrunedTree build(const json& node) const {
      if (node.contains("class")) return make_leaf(node.at("class").get<int>());
      if (!node.contains("feature")) throw DecodeError("node has neither class nor feature");
      return make_internal(node.at("feature").get<int>(), build(node.at("left")),
                           build(node.at("right")));
    }
  };
  try {
    return Builder{}.build(doc);
  } catch (const json::exception& e) {
    throw DecodeError(std::string("invalid tree JSON: ") + e.what());
  }
}

std::string to_dot(const DecisionTree& tree) {
  std::ostringstream os;
  os << "digraph decision_tree {\n";
  for (int q = 1; q <= tree.num_nodes(); q++) {
    os << "  n" << q << " [label=\"f" << tree.feature_at(q) << "\"];\n";
  }
  for (int v = 0; v < tree.num_leaves(); v++) {
    const int cls = tree.leaf_at(v);
    os << "  l" << v << " [shape=box,label=\"";
    if (cls == kDontCare) {
      os << "-";
    } else {
      os << "class " << cls;
    }
    os << "\"];\n";
  }
  const int first_leaf_parent = tree.num_leaves() / 2;
  for (int q = 1; q <= tree.num_nodes(); q++) {
    if (q < first_leaf_parent) {
      os << "  n" << q << " -> n" << 2 * q << " [label=\"false\"];\n";
      os << "  n" << q << " -> n" << 2 * q + 1 << " [label=\"true\"];\n";
    } else {
      const int v = 2 * (q - first_leaf_parent);
      os << "  n" << q << " -> l" << v << " [label=\"false\"];\n";
      os << "  n" << q << " -> l" << v + 1 << " [label=\"true\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string PrunedTree::to_dot() const {
  std::ostringstream os;
  os << "digraph decision_tree {\n";
  for (std::size_t i = 0; i < nodes_.size(); i++) {
    const Node& n = nodes_[i];
    if (n.left == -1) {
      os << "  n" << i << " [shape=box,label=\"class " << n.feature_or_class << "\"];\n";
    } else {
      os << "  n" << i << " [label=\"f" << n.feature_or_class << "\"];\n";
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); i++) {
    const Node& n = nodes_[i];
    if (n.left != -1) {
      os << "  n" << i << " -> n" << n.left << " [label=\"false\"];\n";
      os << "  n" << i << " -> n" << n.right << " [label=\"true\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace sattree
