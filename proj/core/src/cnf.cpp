#include "sattree/cnf.hpp"

#include <cassert>
#include <ostream>
#include <stdexcept>

#include "sattree/errors.hpp"

namespace sattree {

VarMap::VarMap(int depth, int num_features, int num_classes)
    : k_(depth), m_(num_features), c_(num_classes) {
  if (depth < 0 || depth > 30) throw Error("tree depth out of range: " + std::to_string(depth));
  if (num_features < 0 || num_classes < 1) throw Error("invalid VarMap dimensions");
  num_leaves_ = 1 << k_;
  num_nodes_ = num_leaves_ - 1;
  f_base_ = alloc_block('F', num_nodes_ * m_, 1, m_);
  c_base_ = alloc_block('C', num_leaves_ * c_, 0, c_);
}

int VarMap::alloc_block(char kind, int count, int a0, int b_count) {
  int base = next_;
  for (int idx = 0; idx < count; idx++) {
    int a = a0 + (b_count > 0 ? idx / b_count : idx);
    int b = b_count > 0 ? idx % b_count : 0;
    names_.push_back({kind, a, b});
  }
  next_ += count;
  return base;
}

int VarMap::f(int node, int feature) const {
  assert(node >= 1 && node <= num_nodes_ && feature >= 0 && feature < m_);
  return f_base_ + (node - 1) * m_ + feature;
}

int VarMap::c(int leaf, int cls) const {
  assert(leaf >= 0 && leaf < num_leaves_ && cls >= 0 && cls < c_);
  return c_base_ + leaf * c_ + cls;
}

void VarMap::alloc_example(int example) {
  if (x_base_.contains(example)) return;
  // k = 0 trees have a single leaf and no branch variables.
  x_base_[example] = k_ == 0 ? next_ : alloc_block('X', k_, example, k_);
}

int VarMap::x(int example, int level) const {
  assert(level >= 0 && level < k_);
  auto it = x_base_.find(example);
  if (it == x_base_.end()) {
    throw Error("X variables not allocated for example " + std::to_string(example));
  }
  return it->second + level;
}

void VarMap::init_cardinality() {
  if (cardinality_ready()) return;
  u_base_ = alloc_block('U', num_leaves_, 0, 0);
  // Positions 0..2^k, counts 0..2^k+1; wide enough for every bound the
  // dichotomy can probe.
  h_base_ = alloc_block('H', (num_leaves_ + 1) * (num_leaves_ + 2), 0, num_leaves_ + 2);
}

int VarMap::u(int leaf) const {
  assert(cardinality_ready() && leaf >= 0 && leaf < num_leaves_);
  return u_base_ + leaf;
}

int VarMap::h(int pos, int count) const {
  assert(cardinality_ready());
  assert(pos >= 0 && pos <= num_leaves_ && count >= 0 && count <= num_leaves_ + 1);
  return h_base_ + pos * (num_leaves_ + 2) + count;
}

std::string VarMap::name_of(int var) const {
  if (var < 1 || var > num_allocated()) {
    throw Error("no semantic name for variable " + std::to_string(var));
  }
  const Entry& e = names_[static_cast<std::size_t>(var) - 1];
  std::string s(1, e.kind);
  if (e.kind == 'U') return s + "(" + std::to_string(e.a) + ")";
  return s + "(" + std::to_string(e.a) + "," + std::to_string(e.b) + ")";
}

void CnfBuffer::add(std::vector<int> lits) {
  if (lits.empty()) throw Error("attempted to append an empty clause");
#ifndef NDEBUG
  for (std::size_t i = 0; i < lits.size(); i++) {
    for (std::size_t j = i + 1; j < lits.size(); j++) {
      assert(lits[i] != -lits[j] && "tautological clause");
    }
  }
#endif
  literals_ += lits.size();
  clauses_.push_back(std::move(lits));
}

void emit_node_feature_constraints(CnfBuffer& out, const VarMap& vm) {
  const int m = vm.num_features();
  for (int q = 1; q <= vm.num_nodes(); q++) {
    std::vector<int> at_least_one;
    at_least_one.reserve(static_cast<std::size_t>(m));
    for (int f = 0; f < m; f++) at_least_one.push_back(vm.f(q, f));
    out.add(std::move(at_least_one));
    for (int f1 = 0; f1 < m; f1++) {
      for (int f2 = f1 + 1; f2 < m; f2++) {
        out.add({-vm.f(q, f1), -vm.f(q, f2)});
      }
    }
  }
}

namespace {

void feature_rec(CnfBuffer& out, const VarMap& vm, int example,
                 std::span<const std::uint8_t> row, int q, int lvl,
                 std::vector<int>& path) {
  if (lvl == vm.depth()) return;
  const int x = vm.x(example, lvl);
  const int m = vm.num_features();
  // Left branch: node q cannot test a feature that is true in the example.
  for (int f = 0; f < m; f++) {
    if (!row[static_cast<std::size_t>(f)]) continue;
    std::vector<int> cl = path;
    cl.push_back(x);
    cl.push_back(-vm.f(q, f));
    out.add(std::move(cl));
  }
  path.push_back(x);
  feature_rec(out, vm, example, row, 2 * q, lvl + 1, path);
  path.pop_back();
  // Right branch: node q cannot test a feature that is false in the example.
  for (int f = 0; f < m; f++) {
    if (row[static_cast<std::size_t>(f)]) continue;
    std::vector<int> cl = path;
    cl.push_back(-x);
    cl.push_back(-vm.f(q, f));
    out.add(std::move(cl));
  }
  path.push_back(-x);
  feature_rec(out, vm, example, row, 2 * q + 1, lvl + 1, path);
  path.pop_back();
}

void class_rec(CnfBuffer& out, const VarMap& vm, int example, int cls, int q,
               int lvl, std::vector<int>& path) {
  if (lvl == vm.depth()) {
    std::vector<int> cl = path;
    cl.push_back(vm.c(q, cls));
    out.add(std::move(cl));
    for (int other = 0; other < vm.num_classes(); other++) {
      if (other == cls) continue;
      std::vector<int> excl = path;
      excl.push_back(-vm.c(q, other));
      out.add(std::move(excl));
    }
    return;
  }
  const int x = vm.x(example, lvl);
  path.push_back(x);
  class_rec(out, vm, example, cls, 2 * q, lvl + 1, path);
  path.pop_back();
  path.push_back(-x);
  class_rec(out, vm, example, cls, 2 * q + 1, lvl + 1, path);
  path.pop_back();
}

}  // namespace

void emit_feature_constraints(CnfBuffer& out, const VarMap& vm, int example,
                              std::span<const std::uint8_t> row) {
  if (static_cast<int>(row.size()) != vm.num_features()) {
    throw Error("example width does not match the feature count");
  }
  std::vector<int> path;
  feature_rec(out, vm, example, row, 1, 0, path);
}

void emit_class_constraints(CnfBuffer& out, const VarMap& vm, int example, int cls) {
  if (cls < 0 || cls >= vm.num_classes()) {
    throw Error("class index out of range: " + std::to_string(cls));
  }
  std::vector<int> path;
  class_rec(out, vm, example, cls, 0, 0, path);
}

void emit_cardinality(CnfBuffer& out, VarMap& vm) {
  vm.init_cardinality();
  const int leaves = vm.num_leaves();
  for (int v = 0; v < leaves; v++) {
    for (int a = 0; a < vm.num_classes(); a++) {
      out.add({-vm.c(v, a), vm.u(v)});
    }
  }
  out.add({vm.h(0, 0)});
  for (int i = 0; i < leaves; i++) {
    for (int j = 0; j <= leaves; j++) {
      out.add({-vm.h(i, j), vm.h(i + 1, j)});
      out.add({-vm.u(i), -vm.h(i, j), vm.h(i + 1, j + 1)});
    }
  }
}

int leaf_bound_literal(const VarMap& vm, int max_leaves) {
  if (!vm.cardinality_ready()) throw Error("cardinality counter not initialized");
  if (max_leaves < 1 || max_leaves > vm.num_leaves()) {
    throw Error("leaf bound out of range: " + std::to_string(max_leaves));
  }
  return -vm.h(vm.num_leaves(), max_leaves + 1);
}

void export_dimacs(const CnfBuffer& buffer, const VarMap& vm, std::ostream& os) {
  for (int v = 1; v <= vm.num_allocated(); v++) {
    os << "c var " << v << " = " << vm.name_of(v) << '\n';
  }
  os << "p cnf " << vm.num_allocated() << ' ' << buffer.clause_count() << '\n';
  for (const auto& clause : buffer.clauses()) {
    for (int lit : clause) os << lit << ' ';
    os << "0\n";
  }
  if (!os) throw IoError("DIMACS export failed");
}

}  // namespace sattree
