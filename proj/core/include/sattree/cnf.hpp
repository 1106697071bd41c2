#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sattree {

// Bijection between the semantic variables of the tree encoding and dense
// solver variable ids (allocated from 1).
//
//   X(i,j)  example i branches right at depth j; the bit string
//           X(i,0)..X(i,k-1) is the index of the leaf example i reaches
//   F(q,f)  internal node q (1-based, children 2q / 2q+1) tests feature f
//   C(v,a)  leaf v (0-based) is labelled with class a
//   U(v)    leaf v carries some class label
//   H(i,j)  at least j of the first i leaves carry a label
//
// F and C blocks are allocated at construction, U and H when the cardinality
// counter is set up, X blocks per example on arrival. Allocation order is
// fixed so DIMACS exports are reproducible.
class VarMap {
 public:
  VarMap(int depth, int num_features, int num_classes);

  int depth() const { return k_; }
  int num_features() const { return m_; }
  int num_classes() const { return c_; }
  int num_nodes() const { return num_nodes_; }    // internal nodes, 2^k - 1
  int num_leaves() const { return num_leaves_; }  // 2^k

  int f(int node, int feature) const;
  int c(int leaf, int cls) const;
  int x(int example, int level) const;
  int u(int leaf) const;
  int h(int pos, int count) const;  // pos in [0, 2^k], count in [0, 2^k + 1]

  bool has_example(int example) const { return x_base_.contains(example); }
  void alloc_example(int example);
  bool cardinality_ready() const { return u_base_ != 0; }
  void init_cardinality();

  int num_allocated() const { return next_ - 1; }
  // Semantic name of a variable id, e.g. "F(1,2)" or "X(0,1)".
  std::string name_of(int var) const;

 private:
  struct Entry {
    char kind;
    int a;
    int b;
  };

  int alloc_block(char kind, int count, int a0, int b_count);

  int k_;
  int m_;
  int c_;
  int num_nodes_;
  int num_leaves_;
  int next_ = 1;
  int f_base_ = 0;
  int c_base_ = 0;
  int u_base_ = 0;
  int h_base_ = 0;
  std::unordered_map<int, int> x_base_;
  std::vector<Entry> names_;
};

// Append-only clause store mirroring everything fed to the solver.
class CnfBuffer {
 public:
  // Rejects empty clauses and clauses containing a literal and its negation.
  void add(std::vector<int> lits);

  const std::vector<std::vector<int>>& clauses() const { return clauses_; }
  std::uint64_t clause_count() const { return clauses_.size(); }
  std::uint64_t literal_count() const { return literals_; }

 private:
  std::vector<std::vector<int>> clauses_;
  std::uint64_t literals_ = 0;
};

// Per-node "exactly one feature" constraints: one at-least-one clause and
// m(m-1)/2 pairwise at-most-one clauses per internal node. Emits nothing for
// depth 0.
void emit_node_feature_constraints(CnfBuffer& out, const VarMap& vm);

// Feature constraints for one example (depth-first over the perfect tree):
// at each internal node q reached with path clause P, the left branch forbids
// features true in the example, (P v X(i,lvl) v -F(q,f)), and the right
// branch forbids features false in it, (P v -X(i,lvl) v -F(q,f)). Emits
// m * (2^k - 1) clauses. Requires alloc_example(example) first.
void emit_feature_constraints(CnfBuffer& out, const VarMap& vm, int example,
                              std::span<const std::uint8_t> row);

// Class constraints for one example of class `cls`: for each leaf v with
// path clause P, (P v C(v,cls)) and (P v -C(v,a')) for every other class.
// Emits c * 2^k clauses.
void emit_class_constraints(CnfBuffer& out, const VarMap& vm, int example, int cls);

// Leaf-counting machinery, bound-free: U definitions, the unary counter
// chain, and the H(0,0) start. The bound itself is applied per solve as the
// assumption literal from leaf_bound_literal, so one emission serves every
// bound probed by the size search.
void emit_cardinality(CnfBuffer& out, VarMap& vm);

// Assumption literal -H(2^k, max_leaves + 1): at most max_leaves leaves may
// carry a label.
int leaf_bound_literal(const VarMap& vm, int max_leaves);

// Standard DIMACS CNF with a leading comment block mapping ids to semantic
// names ("c var <id> = <name>").
void export_dimacs(const CnfBuffer& buffer, const VarMap& vm, std::ostream& os);

}  // namespace sattree
