// SPDX-License-Identifier: Apache-2.0
//
// Bit-parallel simulation of LUT networks. Pattern j of a PatternSet lives in
// word j / 64, bit j % 64 of every row.

#pragma once

#include "stps/network.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stps {

inline std::size_t words_for(std::size_t n_bits) { return (n_bits + 63) / 64; }

/// One bit row per PI. Bits past n_patterns are zero.
struct PatternSet {
  std::size_t n_patterns = 0;
  std::vector<std::vector<uint64_t>> rows;

  std::size_t n_words() const { return words_for(n_patterns); }
  std::size_t n_pis() const { return rows.size(); }
  bool bit(std::size_t pi, std::size_t j) const { return (rows[pi][j >> 6] >> (j & 63)) & 1; }
  void set_bit(std::size_t pi, std::size_t j, bool v);
  /// Appends one pattern; `values[i]` is PI i's value.
  void append(const std::vector<bool> &values);
  /// The PI values of pattern j, first PI first, e.g. "01100".
  std::string pattern(std::size_t j) const;
};

PatternSet gen_random_patterns(std::size_t n_pi, std::size_t n_patterns, uint64_t seed);

/// All 2^|leaves| assignments of `leaves` (which index into the PI list):
/// pattern j sets leaves[i] to bit (|leaves| - 1 - i) of j. Other PIs are 0.
PatternSet exhaustive_patterns(std::size_t n_pi, std::span<const std::size_t> leaves);

/// One line of 0/1 characters per PI, all of equal length. Also accepts the
/// rows concatenated into a single line whose length is a multiple of n_pi.
/// Throws std::invalid_argument on ragged or non-binary input.
PatternSet parse_patterns(std::string_view text, std::size_t n_pi);
std::string write_patterns(const PatternSet &p);

struct Signature {
  NodeId node;
  std::size_t n_patterns = 0;
  std::vector<uint64_t> words;

  bool bit(std::size_t j) const { return (words[j >> 6] >> (j & 63)) & 1; }
  /// Pattern 0 first.
  std::string to_string() const;
};

/// Signatures of every node, indexed by NodeId. Dead nodes read as zero.
class SignatureTable {
public:
  SignatureTable() = default;
  SignatureTable(std::size_t n_nodes, std::size_t n_patterns);

  std::size_t n_patterns() const { return n_patterns_; }
  std::size_t n_words() const { return n_words_; }
  std::size_t n_nodes() const { return n_words_ ? data_.size() / n_words_ : 0; }

  std::span<const uint64_t> operator[](NodeId id) const {
    return {data_.data() + id.value * n_words_, n_words_};
  }
  std::span<uint64_t> operator[](NodeId id) { return {data_.data() + id.value * n_words_, n_words_}; }

  Signature signature(NodeId id) const;

private:
  std::size_t n_patterns_ = 0;
  std::size_t n_words_ = 0;
  std::vector<uint64_t> data_;
};

/// Simulates every live node in topological order. Throws
/// std::invalid_argument if the pattern rows do not match the PI count.
SignatureTable simulate_all(const Network &net, const PatternSet &p);

/// floor(log2 n_patterns) clamped to [1, 16].
unsigned cut_limit(std::size_t n_patterns);

/// A tree-shaped piece of the network. `members` holds the root and every
/// interior node, in topological order; `leaves` are sorted by id and are
/// PIs or roots of other cuts.
struct Cut {
  NodeId root;
  std::vector<NodeId> leaves;
  std::vector<NodeId> members;
};

struct CutSet {
  unsigned limit = 0;
  /// In topological order of their roots.
  std::vector<Cut> cuts;

  std::vector<NodeId> roots() const;
};

/// Partitions the fanin cones of `targets` into tree cuts. Cone nodes are
/// visited in reverse topological order. Targets, PO drivers and nodes with
/// other than one consumer inside the cone start a new cut; any other node
/// joins its consumer's cut if the cut keeps at most `limit` leaves, and
/// starts a new cut otherwise. A cut consisting of a single LUT can exceed
/// `limit` when that LUT's own fanin count does.
CutSet circuit_cut(const Network &net, unsigned limit, std::span<const NodeId> targets);

/// Function of each cut root over its leaves (first leaf is x1), computed by
/// composing the member truth tables with compose_terms.
std::vector<LogicMatrix> cut_truth_tables(const Network &net, const CutSet &cuts);

/// Signatures of `targets` only: cut the target cones, compute the cut truth
/// tables, and evaluate the cut roots in topological order. Bit-identical to
/// simulate_all on the targets.
std::vector<Signature> simulate_specified(const Network &net, const PatternSet &p,
                                          std::span<const NodeId> targets);

struct WindowResult {
  /// PI support of the targets, sorted by id; leaves[0] is x1.
  std::vector<NodeId> leaves;
  /// Truth row of each target over `leaves`.
  std::vector<LogicMatrix> rows;
  /// Signature of each target under exhaustive_patterns over `leaves`.
  std::vector<Signature> signatures;
};

/// Exhaustive simulation over the joint PI support of `targets`. Returns
/// nullopt when the support has more than `window_cap` PIs.
std::optional<WindowResult> exhaustive_window_sim(const Network &net,
                                                  std::span<const NodeId> targets,
                                                  unsigned window_cap = 16);

} // namespace stps
