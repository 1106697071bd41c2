#pragma once

#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace sattree {

// Incremental CDCL SAT solver.
//
// Literals use the DIMACS convention: variables are positive integers
// allocated densely from 1, literal +v means "v is true", -v means "v is
// false". Clauses persist across solve() calls; assumptions hold for a
// single call only and are retracted afterwards.
class Solver {
 public:
  enum class Result { kSat, kUnsat, kUnknown };

  Solver() = default;

  // Allocates and returns a fresh variable id.
  int new_var();
  // Grows the variable range so that ids 1..n are valid.
  void ensure_vars(int n);
  int num_vars() const { return static_cast<int>(assign_.size()); }

  // Adds a permanent clause. An empty clause moves the solver into a
  // permanently unsatisfiable state.
  void add_clause(std::span<const int> lits);
  void add_clause(std::initializer_list<int> lits);

  // Solves the accumulated clauses under the given assumption literals.
  // Returns kUnknown only when the time budget expires.
  Result solve(std::span<const int> assumptions = {},
               std::optional<std::chrono::duration<double>> budget = std::nullopt);

  // Model value of a variable. Valid only while last_result() == kSat;
  // throws StateError otherwise.
  bool value(int var) const;
  Result last_result() const { return last_result_; }

  std::uint64_t num_clauses() const { return num_input_clauses_; }
  std::uint64_t num_conflicts() const { return conflicts_; }
  std::uint64_t num_propagations() const { return propagations_; }
  std::uint64_t num_restarts() const { return restarts_; }

  // Learnt clauses above this count are halved at the next restart.
  void set_learnt_db_cap(std::size_t cap) { learnt_db_cap_ = cap; }

 private:
  using ClauseRef = std::uint32_t;
  static constexpr ClauseRef kNoReason = 0xFFFFFFFFu;

  struct Watcher {
    ClauseRef cref;
    int blocker;  // internal literal; clause skipped when blocker is true
  };

  // Internal literal coding: 0-based variable v gives literals 2v (positive)
  // and 2v+1 (negative).
  static int int_lit(int dimacs_lit) {
    int v = dimacs_lit > 0 ? dimacs_lit : -dimacs_lit;
    return dimacs_lit > 0 ? 2 * (v - 1) : 2 * (v - 1) + 1;
  }
  static int neg(int lit) { return lit ^ 1; }
  static int var_of(int lit) { return lit >> 1; }

  enum : std::int8_t { kTrue = 1, kFalse = -1, kUndef = 0 };

  std::int8_t lit_value(int lit) const {
    std::int8_t v = assign_[var_of(lit)];
    return (lit & 1) ? static_cast<std::int8_t>(-v) : v;
  }

  // Arena clause layout: [size][flags][activity][lit0 lit1 ...], cref is the
  // offset of the size word.
  std::uint32_t cl_size(ClauseRef c) const { return clause_data_[c]; }
  bool cl_learnt(ClauseRef c) const { return clause_data_[c + 1] & 1u; }
  std::uint32_t* cl_lits(ClauseRef c) { return clause_data_.data() + c + 3; }
  const std::uint32_t* cl_lits(ClauseRef c) const { return clause_data_.data() + c + 3; }
  float cl_activity(ClauseRef c) const;
  void cl_set_activity(ClauseRef c, float a);
  ClauseRef alloc_clause(std::span<const int> lits, bool learnt);
  void attach_clause(ClauseRef cref);

  void enqueue(int lit, ClauseRef reason);
  ClauseRef propagate();
  void analyze(ClauseRef conflict, std::vector<int>& learnt, int& backtrack_level);
  void cancel_until(int level);
  void new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  int pick_branch_var();
  void var_bump(int var);
  void cla_bump(ClauseRef c);
  void reduce_learnt_db();
  Result search(std::span<const int> assumptions,
                const std::optional<std::chrono::steady_clock::time_point>& deadline);

  // Max-heap on activity; ties resolve by variable index so identical
  // clause/assumption sequences replay identically.
  bool heap_less(int a, int b) const;
  void heap_insert(int var);
  void heap_update(int var);
  int heap_pop();
  void heap_sift_up(int pos);
  void heap_sift_down(int pos);

  std::vector<std::uint32_t> clause_data_;
  std::vector<ClauseRef> learnts_;

  std::vector<std::int8_t> assign_;
  std::vector<std::int8_t> phase_;
  std::vector<int> level_;
  std::vector<ClauseRef> reason_;
  std::vector<double> activity_;
  std::vector<std::vector<Watcher>> watches_;  // indexed by internal literal

  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t propagate_head_ = 0;

  std::vector<int> heap_;
  std::vector<int> heap_pos_;

  std::vector<char> seen_;
  std::vector<std::int8_t> model_;

  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;

  bool ok_ = true;  // false once unsatisfiable without assumptions
  Result last_result_ = Result::kUnknown;
  std::size_t learnt_db_cap_ = 20000;
  std::uint64_t num_input_clauses_ = 0;
  std::uint64_t conflicts_ = 0;
  std::uint64_t propagations_ = 0;
  std::uint64_t restarts_ = 0;
};

}  // namespace sattree
