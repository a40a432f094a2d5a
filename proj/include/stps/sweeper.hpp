// SPDX-License-Identifier: Apache-2.0
//
// SAT sweeping: merge functionally equivalent nodes using simulation to
// propose candidates and SAT to confirm or refute them.

#pragma once

#include "stps/network.hpp"
#include "stps/sat.hpp"
#include "stps/simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stps {

struct SweepConfig {
  /// Max TFI nodes examined per class member when collecting drivers.
  std::size_t tfi_bound = 1000;
  /// 0 disables the limit.
  uint64_t conflict_limit = 0;
  std::size_t n_base_patterns = 2048;
  double toggle_threshold = 1.0 / 64;
  uint64_t seed = 1;
  /// Largest PI support that gets exhaustive simulation during refinement.
  unsigned window_cap = 16;
  /// Split classes by exhaustive simulation after every counter-example.
  bool exhaustive_refinement = true;
  /// Patterns derived from each counter-example.
  std::size_t ce_patterns = 64;
};

struct SweepStats {
  std::size_t gates = 0;  // live LUTs before
  std::size_t result = 0; // live LUTs after
  uint64_t sat_calls_total = 0;
  uint64_t sat_calls_sat = 0;
  uint64_t sat_calls_unsat = 0;
  uint64_t sat_calls_undet = 0;
  /// SAT calls spent generating the initial patterns.
  uint64_t pattern_sat_calls = 0;
  uint64_t merges = 0;
  uint64_t constants = 0;
  uint64_t ce_refinements = 0;
  uint64_t exhaustive_splits = 0;
  double sim_time = 0;
  double total_time = 0;
};

/// `gate,result,sat_calls,total_sat_calls,sim_time_s,total_time_s`
std::string stats_csv_header();
/// sat_calls counts satisfiable sweep queries, total_sat_calls all of them.
std::string stats_csv_row(const SweepStats &s);
/// One `key=value` per line.
std::string stats_report(const SweepStats &s);

/// Candidate equivalence classes. Every node has a class id (or none) and a
/// phase bit; two nodes of one class agree on all patterns seen so far once
/// each is complemented according to its phase.
class ClassManager {
public:
  static constexpr uint32_t kNone = UINT32_MAX;

  explicit ClassManager(std::size_t n_nodes = 0);

  uint32_t class_of(NodeId id) const {
    return id.value < class_of_.size() ? class_of_[id.value] : kNone;
  }
  bool phase(NodeId id) const { return id.value < phase_.size() && phase_[id.value]; }
  std::size_t num_classes() const { return members_.size(); }
  /// Members in topological order. May include nodes that have died since.
  const std::vector<NodeId> &members(uint32_t cls) const { return members_.at(cls); }
  /// Members that are still alive in `net`.
  std::vector<NodeId> live_members(const Network &net, uint32_t cls) const;
  bool exact(uint32_t cls) const { return exact_.at(cls); }
  void set_exact(uint32_t cls) { exact_.at(cls) = 1; }

  /// Appends a class; `phases[i]` belongs to `nodes[i]`. Nodes must not be
  /// in another class.
  uint32_t add_class(const std::vector<NodeId> &nodes, const std::vector<bool> &phases);

  /// Splits class `cls` so that live members with equal keys stay together;
  /// `keys[i]` belongs to live_members(net, cls)[i]. Dead members are
  /// dropped. Groups of one member leave the class structure. Returns the
  /// number of additional groups created.
  std::size_t split(const Network &net, uint32_t cls,
                    const std::vector<std::vector<uint64_t>> &keys);

  /// Classes with at least two live members.
  std::vector<uint32_t> active_classes(const Network &net) const;

private:
  std::vector<uint32_t> class_of_;
  std::vector<uint8_t> phase_;
  std::vector<std::vector<NodeId>> members_;
  std::vector<uint8_t> exact_;
};

struct GuidedPatterns {
  PatternSet patterns;
  /// Nodes proved constant, with their value.
  std::vector<std::pair<NodeId, bool>> constants;
  uint64_t sat_calls = 0;
};

/// Random base patterns enriched in two rounds. Round 1 asks SAT for the
/// opposite value of every node whose signature is constant: Unsat proves
/// the node constant, Sat adds the assignment as a pattern. Round 2 does the
/// same for the minority value of nodes whose toggle rate (bit flips between
/// consecutive patterns over signature length) is below `toggle_threshold`
/// or above 1 - `toggle_threshold`. PIs outside a query's support get random
/// values.
GuidedPatterns sat_guided_patterns(const Network &net, const SweepConfig &cfg);

/// Replaces every listed constant with the shared constant-0 node (inverted
/// for constant 1). Returns the number of substitutions.
std::size_t constant_prop(Network &net, const std::vector<std::pair<NodeId, bool>> &constants);

/// Groups live nodes by signature, complementing a signature whose first bit
/// is 1 and recording that in the phase.
ClassManager init_equiv_classes(const Network &net, const SignatureTable &sigs);

/// Expands the counter-example to cfg.ce_patterns patterns (PIs it leaves
/// open get pseudo-random values derived from seed and counter-example),
/// simulates the members of all active classes with simulate_specified and
/// splits the classes accordingly. With cfg.exhaustive_refinement, classes
/// whose PI support fits cfg.window_cap are then split by their exhaustive
/// truth tables and marked exact. The expanded patterns are appended to
/// `history` when given. Returns the number of new groups created.
std::size_t refine_classes(ClassManager &mgr, const Network &net,
                           const std::vector<std::pair<NodeId, bool>> &ce, const SweepConfig &cfg,
                           PatternSet *history = nullptr, SweepStats *stats = nullptr);

struct SweepResult {
  Network net;
  SweepStats stats;
};

/// Full sweep: guided patterns, constant propagation, classes, then every
/// gate in reverse topological order is tried against the earlier members of
/// its class until one is proved equivalent. Dead logic is removed at the
/// end.
SweepResult sweep(Network net, const SweepConfig &cfg = {});

} // namespace stps
