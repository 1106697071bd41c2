#include "sattree/solver.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>

#include "sattree/errors.hpp"

namespace sattree {

namespace {

constexpr double kVarDecay = 0.95;
constexpr double kClaDecay = 0.999;
constexpr double kRescaleLimit = 1e100;
constexpr int kRestartBase = 100;

// Luby restart sequence: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
double luby(double y, int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    seq++;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    seq--;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

int Solver::new_var() {
  assign_.push_back(kUndef);
  phase_.push_back(0);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  activity_.push_back(0.0);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_pos_.push_back(-1);
  int v = static_cast<int>(assign_.size()) - 1;
  heap_insert(v);
  return v + 1;
}

void Solver::ensure_vars(int n) {
  while (num_vars() < n) new_var();
}

float Solver::cl_activity(ClauseRef c) const {
  return std::bit_cast<float>(clause_data_[c + 2]);
}

void Solver::cl_set_activity(ClauseRef c, float a) {
  clause_data_[c + 2] = std::bit_cast<std::uint32_t>(a);
}

Solver::ClauseRef Solver::alloc_clause(std::span<const int> lits, bool learnt) {
  ClauseRef cref = static_cast<ClauseRef>(clause_data_.size());
  clause_data_.push_back(static_cast<std::uint32_t>(lits.size()));
  clause_data_.push_back(learnt ? 1u : 0u);
  clause_data_.push_back(std::bit_cast<std::uint32_t>(0.0f));
  for (int l : lits) clause_data_.push_back(static_cast<std::uint32_t>(l));
  return cref;
}

void Solver::attach_clause(ClauseRef cref) {
  const std::uint32_t* lits = cl_lits(cref);
  assert(cl_size(cref) >= 2);
  watches_[neg(static_cast<int>(lits[0]))].push_back({cref, static_cast<int>(lits[1])});
  watches_[neg(static_cast<int>(lits[1]))].push_back({cref, static_cast<int>(lits[0])});
}

void Solver::add_clause(std::initializer_list<int> lits) {
  add_clause(std::span<const int>(lits.begin(), lits.size()));
}

void Solver::add_clause(std::span<const int> lits) {
  num_input_clauses_++;
  if (!ok_) return;
  int max_var = 0;
  for (int dl : lits) max_var = std::max(max_var, dl > 0 ? dl : -dl);
  ensure_vars(max_var);

  // Level-0 simplification: drop satisfied clauses and false literals,
  // collapse duplicates, skip tautologies.
  assert(decision_level() == 0);
  std::vector<int> cl;
  cl.reserve(lits.size());
  for (int dl : lits) cl.push_back(int_lit(dl));
  std::sort(cl.begin(), cl.end());
  std::vector<int> out;
  int prev = -2;
  for (int l : cl) {
    if (l == prev) continue;
    if (l == neg(prev) && var_of(l) == var_of(prev)) return;  // tautology
    if (lit_value(l) == kTrue) return;                        // already satisfied
    if (lit_value(l) == kFalse) {
      prev = l;
      continue;
    }
    out.push_back(l);
    prev = l;
  }

  if (out.empty()) {
    ok_ = false;
    return;
  }
  if (out.size() == 1) {
    enqueue(out[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return;
  }
  ClauseRef cref = alloc_clause(out, /*learnt=*/false);
  attach_clause(cref);
}

void Solver::enqueue(int lit, ClauseRef reason) {
  int v = var_of(lit);
  assert(assign_[v] == kUndef);
  assign_[v] = (lit & 1) ? kFalse : kTrue;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(lit);
}

Solver::ClauseRef Solver::propagate() {
  while (propagate_head_ < trail_.size()) {
    int p = trail_[propagate_head_++];
    propagations_++;
    std::vector<Watcher>& ws = watches_[p];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      Watcher w = ws[i];
      if (lit_value(w.blocker) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      std::uint32_t* lits = cl_lits(w.cref);
      const int false_lit = neg(p);
      if (static_cast<int>(lits[0]) == false_lit) std::swap(lits[0], lits[1]);
      assert(static_cast<int>(lits[1]) == false_lit);
      const int first = static_cast<int>(lits[0]);
      if (lit_value(first) == kTrue) {
        ws[j++] = {w.cref, first};
        i++;
        continue;
      }
      const std::uint32_t size = cl_size(w.cref);
      bool found = false;
      for (std::uint32_t k = 2; k < size; k++) {
        if (lit_value(static_cast<int>(lits[k])) != kFalse) {
          std::swap(lits[1], lits[k]);
          watches_[neg(static_cast<int>(lits[1]))].push_back({w.cref, first});
          found = true;
          break;
        }
      }
      if (found) {
        i++;
        continue;
      }
      // Unit or conflicting.
      ws[j++] = {w.cref, first};
      i++;
      if (lit_value(first) == kFalse) {
        propagate_head_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        return w.cref;
      }
      enqueue(first, w.cref);
    }
    ws.resize(j);
  }
  return kNoReason;
}

void Solver::var_bump(int var) {
  activity_[var] += var_inc_;
  if (activity_[var] > kRescaleLimit) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  heap_update(var);
}

void Solver::cla_bump(ClauseRef c) {
  float a = cl_activity(c) + static_cast<float>(cla_inc_);
  if (a > 1e20f) {
    for (ClauseRef lc : learnts_) cl_set_activity(lc, cl_activity(lc) * 1e-20f);
    cla_inc_ *= 1e-20;
    a = cl_activity(c) + static_cast<float>(cla_inc_);
  }
  cl_set_activity(c, a);
}

// First-UIP conflict analysis; learnt[0] is the asserting literal.
void Solver::analyze(ClauseRef conflict, std::vector<int>& learnt, int& backtrack_level) {
  learnt.clear();
  learnt.push_back(0);  // placeholder for the asserting literal

  int path_count = 0;
  int p = -1;
  int index = static_cast<int>(trail_.size()) - 1;
  ClauseRef confl = conflict;

  do {
    assert(confl != kNoReason);
    if (cl_learnt(confl)) cla_bump(confl);
    const std::uint32_t* lits = cl_lits(confl);
    const std::uint32_t size = cl_size(confl);
    for (std::uint32_t k = (p == -1 ? 0u : 1u); k < size; k++) {
      int q = static_cast<int>(lits[k]);
      int v = var_of(q);
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        var_bump(v);
        if (level_[v] >= decision_level()) {
          path_count++;
        } else {
          learnt.push_back(q);
        }
      }
    }
    while (!seen_[var_of(trail_[index])]) index--;
    p = trail_[index--];
    confl = reason_[var_of(p)];
    seen_[var_of(p)] = 0;
    path_count--;
  } while (path_count > 0);
  learnt[0] = neg(p);

  if (learnt.size() == 1) {
    backtrack_level = 0;
  } else {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); k++) {
      if (level_[var_of(learnt[k])] > level_[var_of(learnt[max_i])]) max_i = k;
    }
    std::swap(learnt[1], learnt[max_i]);
    backtrack_level = level_[var_of(learnt[1])];
  }
  for (std::size_t k = 1; k < learnt.size(); k++) seen_[var_of(learnt[k])] = 0;
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  for (int i = static_cast<int>(trail_.size()) - 1; i >= trail_lim_[level]; i--) {
    int v = var_of(trail_[i]);
    phase_[v] = (assign_[v] == kTrue) ? 1 : 0;
    assign_[v] = kUndef;
    reason_[v] = kNoReason;
    heap_insert(v);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  propagate_head_ = trail_.size();
}

bool Solver::heap_less(int a, int b) const {
  if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
  return a < b;
}

void Solver::heap_insert(int var) {
  if (heap_pos_[var] != -1) return;
  heap_pos_[var] = static_cast<int>(heap_.size());
  heap_.push_back(var);
  heap_sift_up(heap_pos_[var]);
}

void Solver::heap_update(int var) {
  if (heap_pos_[var] != -1) heap_sift_up(heap_pos_[var]);
}

void Solver::heap_sift_up(int pos) {
  int v = heap_[pos];
  while (pos > 0) {
    int parent = (pos - 1) >> 1;
    if (!heap_less(v, heap_[parent])) break;
    heap_[pos] = heap_[parent];
    heap_pos_[heap_[pos]] = pos;
    pos = parent;
  }
  heap_[pos] = v;
  heap_pos_[v] = pos;
}

void Solver::heap_sift_down(int pos) {
  int v = heap_[pos];
  const int n = static_cast<int>(heap_.size());
  while (true) {
    int child = 2 * pos + 1;
    if (child >= n) break;
    if (child + 1 < n && heap_less(heap_[child + 1], heap_[child])) child++;
    if (!heap_less(heap_[child], v)) break;
    heap_[pos] = heap_[child];
    heap_pos_[heap_[pos]] = pos;
    pos = child;
  }
  heap_[pos] = v;
  heap_pos_[v] = pos;
}

int Solver::heap_pop() {
  int v = heap_[0];
  heap_pos_[v] = -1;
  int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_sift_down(0);
  }
  return v;
}

int Solver::pick_branch_var() {
  while (!heap_.empty()) {
    int v = heap_pop();
    if (assign_[v] == kUndef) return v;
  }
  return -1;
}

// Drops low-activity learnt clauses and rebuilds the arena. Runs only at
// decision level 0, where no learnt clause is needed as a reason.
void Solver::reduce_learnt_db() {
  assert(decision_level() == 0);
  for (int lit : trail_) reason_[var_of(lit)] = kNoReason;

  std::vector<ClauseRef> sorted = learnts_;
  std::sort(sorted.begin(), sorted.end(), [this](ClauseRef a, ClauseRef b) {
    return cl_activity(a) > cl_activity(b);
  });
  std::vector<char> keep_learnt(clause_data_.size(), 0);
  std::size_t kept = 0;
  for (ClauseRef c : sorted) {
    if (cl_size(c) == 2 || kept < sorted.size() / 2) {
      keep_learnt[c] = 1;
      kept++;
    }
  }

  std::vector<std::uint32_t> new_data;
  new_data.reserve(clause_data_.size());
  std::vector<ClauseRef> new_learnts;
  std::vector<int> tmp;
  std::size_t off = 0;
  while (off < clause_data_.size()) {
    ClauseRef c = static_cast<ClauseRef>(off);
    std::uint32_t size = cl_size(c);
    std::size_t next = off + 3 + size;
    bool learnt = cl_learnt(c);
    if (!learnt || keep_learnt[c]) {
      // Simplify against the level-0 assignment so fresh watches are valid.
      tmp.clear();
      bool satisfied = false;
      const std::uint32_t* lits = cl_lits(c);
      for (std::uint32_t k = 0; k < size; k++) {
        int l = static_cast<int>(lits[k]);
        if (lit_value(l) == kTrue) {
          satisfied = true;
          break;
        }
        if (lit_value(l) != kFalse) tmp.push_back(l);
      }
      if (!satisfied) {
        // At a level-0 propagation fixpoint an unsatisfied clause keeps at
        // least two free literals; anything narrower means the fixpoint
        // precondition was broken upstream.
        if (tmp.size() < 2) {
          throw StateError("learnt reduction reached a non-fixpoint clause");
        }
        ClauseRef nc = static_cast<ClauseRef>(new_data.size());
        new_data.push_back(static_cast<std::uint32_t>(tmp.size()));
        new_data.push_back(learnt ? 1u : 0u);
        new_data.push_back(clause_data_[c + 2]);
        for (int l : tmp) new_data.push_back(static_cast<std::uint32_t>(l));
        if (learnt) new_learnts.push_back(nc);
      }
    }
    off = next;
  }
  clause_data_ = std::move(new_data);
  learnts_ = std::move(new_learnts);
  for (auto& ws : watches_) ws.clear();
  off = 0;
  while (off < clause_data_.size()) {
    ClauseRef c = static_cast<ClauseRef>(off);
    attach_clause(c);
    off += 3 + cl_size(c);
  }
}

Solver::Result Solver::search(
    std::span<const int> assumptions,
    const std::optional<std::chrono::steady_clock::time_point>& deadline) {
  std::vector<int> learnt;
  int restart_round = 0;
  std::uint64_t conflicts_since_restart = 0;
  std::uint64_t restart_budget =
      static_cast<std::uint64_t>(luby(2.0, restart_round) * kRestartBase);

  for (;;) {
    ClauseRef confl = propagate();
    if (confl != kNoReason) {
      conflicts_++;
      conflicts_since_restart++;
      if (decision_level() == 0) {
        ok_ = false;
        return Result::kUnsat;
      }
      int bt_level = 0;
      analyze(confl, learnt, bt_level);
      cancel_until(bt_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        ClauseRef cref = alloc_clause(learnt, /*learnt=*/true);
        learnts_.push_back(cref);
        attach_clause(cref);
        cla_bump(cref);
        enqueue(learnt[0], cref);
      }
      var_inc_ /= kVarDecay;
      cla_inc_ /= kClaDecay;
      continue;
    }

    if (deadline && std::chrono::steady_clock::now() >= *deadline) {
      cancel_until(0);
      return Result::kUnknown;
    }
    if (conflicts_since_restart >= restart_budget) {
      restarts_++;
      restart_round++;
      conflicts_since_restart = 0;
      restart_budget = static_cast<std::uint64_t>(luby(2.0, restart_round) * kRestartBase);
      cancel_until(0);
      if (learnts_.size() > learnt_db_cap_) reduce_learnt_db();
      continue;
    }

    int next = -1;
    while (decision_level() < static_cast<int>(assumptions.size())) {
      int p = int_lit(assumptions[decision_level()]);
      if (lit_value(p) == kTrue) {
        new_decision_level();  // dummy level, assumption already holds
      } else if (lit_value(p) == kFalse) {
        cancel_until(0);
        return Result::kUnsat;
      } else {
        next = p;
        break;
      }
    }
    if (next == -1) {
      int v = pick_branch_var();
      if (v == -1) {
        model_.assign(assign_.begin(), assign_.end());
        return Result::kSat;
      }
      next = phase_[v] ? 2 * v : 2 * v + 1;
    }
    new_decision_level();
    enqueue(next, kNoReason);
  }
}

Solver::Result Solver::solve(std::span<const int> assumptions,
                             std::optional<std::chrono::duration<double>> budget) {
  if (!ok_) {
    last_result_ = Result::kUnsat;
    return last_result_;
  }
  for (int a : assumptions) {
    int v = a > 0 ? a : -a;
    ensure_vars(v);
  }
  std::optional<std::chrono::steady_clock::time_point> deadline;
  if (budget) {
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(*budget);
  }
  last_result_ = search(assumptions, deadline);
  cancel_until(0);
  return last_result_;
}

bool Solver::value(int var) const {
  if (last_result_ != Result::kSat) {
    throw StateError("model queried while solver state is not Sat");
  }
  if (var < 1 || var > static_cast<int>(model_.size())) {
    throw StateError("model queried for unallocated variable " + std::to_string(var));
  }
  return model_[var - 1] == kTrue;
}

}  // namespace sattree
