// SPDX-License-Identifier: Apache-2.0
//
// CDCL SAT solver and CNF encoding of LUT cones.

#pragma once

#include "stps/network.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace stps {

/// DIMACS-style literal: +v or -v for a variable v >= 1.
using Lit = int32_t;

struct Cnf {
  uint32_t num_vars = 0;
  std::vector<std::vector<Lit>> clauses;
  /// node id -> variable
  std::unordered_map<uint32_t, uint32_t> var_of_node;

  uint32_t new_var() { return ++num_vars; }
  /// Variable of a node, creating it on first use.
  uint32_t node_var(NodeId id);
  /// Throws std::invalid_argument on an empty clause or an undeclared
  /// variable.
  void add_clause(std::vector<Lit> clause);
};

/// Adds consistency clauses for every node in the fanin cones of `roots`.
/// Each LUT gets one clause per truth-table row (2^arity clauses), minus
/// rows that become tautologies when a fanin is repeated.
void encode_cone_into(Cnf &cnf, const Network &net, std::span<const NodeId> roots);
Cnf encode_cone(const Network &net, std::span<const NodeId> roots);

enum class SatStatus { Unsat, Sat, Undet };

struct SatOutcome {
  SatStatus status = SatStatus::Undet;
  /// From solve(): model[v] for variable v (index 0 unused).
  std::vector<bool> model;
  /// From the network queries: values of the support PIs, sorted by id.
  std::vector<std::pair<NodeId, bool>> ce;
  /// Conflicts spent on the query.
  uint64_t conflicts = 0;
};

/// Conflict-driven clause learning: two watched literals, first-UIP learning
/// with clause minimization, activity-based branching with phase saving, and
/// Luby restarts.
class Solver {
public:
  explicit Solver(uint64_t seed = 0);

  uint32_t new_var();
  uint32_t num_vars() const { return static_cast<uint32_t>(assigns_.size()); }
  /// Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::span<const Lit> clause);

  /// conflict_limit = 0 means unlimited; otherwise the search gives up with
  /// Undet once the conflict count of this call exceeds the limit.
  SatStatus solve(std::span<const Lit> assumptions = {}, uint64_t conflict_limit = 0);

  bool model_value(uint32_t var) const { return model_.at(var - 1); }
  uint64_t conflicts() const { return conflicts_; }

private:
  struct Watcher {
    uint32_t cref;
    uint32_t blocker;
  };
  static constexpr uint8_t kFalse = 0, kTrue = 1, kUndef = 2;

  uint8_t value(uint32_t lit) const {
    const uint8_t v = assigns_[lit >> 1];
    return v == kUndef ? kUndef : static_cast<uint8_t>(v ^ (lit & 1));
  }
  uint32_t decision_level() const { return static_cast<uint32_t>(trail_lim_.size()); }
  void enqueue(uint32_t lit, int64_t reason);
  int64_t propagate();
  void analyze(int64_t confl, std::vector<uint32_t> &learnt, uint32_t &bt_level);
  bool redundant(uint32_t lit) const;
  void cancel_until(uint32_t level);
  void attach(uint32_t cref);
  void bump(uint32_t var);
  int64_t pick_branch();
  SatStatus search(uint64_t budget, std::span<const uint32_t> assumptions, uint64_t limit,
                   uint64_t start);

  void heap_insert(uint32_t v);
  uint32_t heap_pop();
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  bool heap_less(uint32_t a, uint32_t b) const;

  std::vector<std::vector<uint32_t>> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<uint8_t> assigns_;
  std::vector<uint8_t> saved_phase_;
  std::vector<uint32_t> level_;
  std::vector<int64_t> reason_;
  std::vector<uint32_t> trail_;
  std::vector<uint32_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<uint32_t> heap_;
  std::vector<int64_t> heap_pos_;
  std::vector<uint8_t> seen_;
  std::vector<bool> model_;
  uint64_t conflicts_ = 0;
  uint64_t seed_;
  bool ok_ = true;
};

SatOutcome solve(const Cnf &cnf, std::span<const Lit> assumptions = {},
                 uint64_t conflict_limit = 0, uint64_t seed = 0);

/// Is there an input under which `a` differs from `b` (or from NOT b when
/// `inverted`)? Unsat proves the two equivalent under that phase; Sat
/// carries the distinguishing PI assignment in `ce`.
SatOutcome prove_equiv(const Network &net, NodeId a, NodeId b, bool inverted,
                       uint64_t conflict_limit = 0);

/// Is there an input under which `node` evaluates to `value`?
SatOutcome find_assignment(const Network &net, NodeId node, bool value,
                           uint64_t conflict_limit = 0);

std::string to_dimacs(const Cnf &cnf);

} // namespace stps
