// SPDX-License-Identifier: Apache-2.0
//
// k-LUT network: primary inputs, LUT nodes with truth tables, and primary
// outputs with an optional inversion.

#pragma once

#include "stps/stp.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace stps {

struct NodeId {
  uint32_t value = 0;

  auto operator<=>(const NodeId &) const = default;
};

struct NodeIdHash {
  std::size_t operator()(NodeId id) const noexcept { return std::hash<uint32_t>{}(id.value); }
};

enum class NodeKind : uint8_t { Pi, Lut };

struct LutNode {
  NodeId id;
  NodeKind kind = NodeKind::Lut;
  std::string name;
  std::vector<NodeId> fanins;
  /// Function of the fanins; arity == fanins.size(), first fanin is x1.
  LogicMatrix tt;
  uint32_t fanout_count = 0;
  bool dont_touch = false;
  bool dead = false;

  bool is_pi() const { return kind == NodeKind::Pi; }
  /// A LUT without fanins.
  bool is_constant() const { return kind == NodeKind::Lut && fanins.empty(); }
};

struct PrimaryOutput {
  NodeId driver;
  bool inverted = false;
  std::string name;
};

class Network {
public:
  explicit Network(std::string name = "top") : name_(std::move(name)) {}

  const std::string &name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  NodeId add_pi(std::string name);
  /// Fanins must already exist, so ids are created in a topological order.
  NodeId add_lut(std::vector<NodeId> fanins, LogicMatrix tt, std::string name = {});
  /// Shared constant-0 LUT, created on first use.
  NodeId constant_zero();
  void add_po(NodeId driver, bool inverted, std::string name);

  std::size_t size() const { return nodes_.size(); }
  const LutNode &node(NodeId id) const { return nodes_.at(id.value); }
  std::span<const NodeId> pis() const { return pis_; }
  std::span<const PrimaryOutput> pos() const { return pos_; }
  /// Consumers of `id`, one entry per fanin edge.
  std::span<const NodeId> fanouts(NodeId id) const { return fanouts_.at(id.value); }
  bool drives_po(NodeId id) const { return po_refs_.at(id.value) > 0; }

  /// Live LUTs excluding constants.
  std::size_t lut_count() const;
  std::optional<NodeId> find(std::string_view name) const;

  void set_dont_touch(NodeId id, bool value = true) { nodes_.at(id.value).dont_touch = value; }

  /// Redirects every fanout and PO of `old_node` to `new_node`. With
  /// `inverted`, consumers see the complement: their truth tables flip the
  /// affected variable and PO phases toggle. `old_node` and any fanin cone
  /// left without fanouts are marked dead. Throws std::invalid_argument if
  /// the substitution would create a cycle or old_node == new_node.
  void substitute_node(NodeId old_node, NodeId new_node, bool inverted);

  /// Deletes every node that cannot reach a PO. PIs are kept. Ids are
  /// renumbered: PIs first, then LUTs in topological order. Returns the
  /// number of removed nodes.
  std::size_t remove_dead();

private:
  void kill(NodeId id);

  std::string name_;
  std::vector<LutNode> nodes_;
  std::vector<NodeId> pis_;
  std::vector<PrimaryOutput> pos_;
  std::vector<std::vector<NodeId>> fanouts_;
  std::vector<uint32_t> po_refs_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::optional<NodeId> const0_;
};

/// Non-dead nodes with every fanin before its fanouts; ties are broken by the
/// smaller id. Throws std::runtime_error on a cycle.
std::vector<NodeId> topo_order(const Network &net);
std::vector<NodeId> reverse_topo_order(const Network &net);

/// Non-PI nodes in the transitive fanin of `node` (excluding `node`), in
/// breadth-first order over fanins, truncated to `bound` entries.
std::vector<NodeId> transitive_fanin(const Network &net, NodeId node, std::size_t bound);

/// True iff `b` is reachable from `a` along fanout edges (a reaches itself).
bool is_in_tfo(const Network &net, NodeId a, NodeId b);

/// PIs in the transitive fanin of the given nodes, sorted by id.
std::vector<NodeId> structural_support(const Network &net, std::span<const NodeId> nodes);

/// Flips variable `var` of `tt`: result(x) = tt(x with x_var complemented).
LogicMatrix flip_variable(const LogicMatrix &tt, unsigned var);

/// Checks the structural invariants (DAG, fanout tallies, tt arities).
/// Returns an empty string when all hold, otherwise a description.
std::string check_integrity(const Network &net);

} // namespace stps
