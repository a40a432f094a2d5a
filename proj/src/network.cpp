// SPDX-License-Identifier: Apache-2.0

#include "stps/network.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace stps {

NodeId Network::add_pi(std::string name) {
  const NodeId id{static_cast<uint32_t>(nodes_.size())};
  LutNode n;
  n.id = id;
  n.kind = NodeKind::Pi;
  n.name = std::move(name);
  if (!n.name.empty())
    by_name_.emplace(n.name, id);
  nodes_.push_back(std::move(n));
  fanouts_.emplace_back();
  po_refs_.push_back(0);
  pis_.push_back(id);
  return id;
}

NodeId Network::add_lut(std::vector<NodeId> fanins, LogicMatrix tt, std::string name) {
  if (tt.arity() != fanins.size())
    throw std::invalid_argument("add_lut: truth table arity " + std::to_string(tt.arity()) +
                                " does not match " + std::to_string(fanins.size()) + " fanins");
  const NodeId id{static_cast<uint32_t>(nodes_.size())};
  for (NodeId f : fanins) {
    if (f.value >= nodes_.size())
      throw std::invalid_argument("add_lut: unknown fanin");
    if (nodes_[f.value].dead)
      throw std::invalid_argument("add_lut: fanin is dead");
  }
  for (NodeId f : fanins) {
    fanouts_[f.value].push_back(id);
    ++nodes_[f.value].fanout_count;
  }
  LutNode n;
  n.id = id;
  n.kind = NodeKind::Lut;
  n.name = std::move(name);
  n.fanins = std::move(fanins);
  n.tt = std::move(tt);
  if (!n.name.empty())
    by_name_.emplace(n.name, id);
  nodes_.push_back(std::move(n));
  fanouts_.emplace_back();
  po_refs_.push_back(0);
  return id;
}

NodeId Network::constant_zero() {
  if (!const0_ || nodes_[const0_->value].dead)
    const0_ = add_lut({}, LogicMatrix::constant(false));
  return *const0_;
}

void Network::add_po(NodeId driver, bool inverted, std::string name) {
  if (driver.value >= nodes_.size() || nodes_[driver.value].dead)
    throw std::invalid_argument("add_po: unknown driver");
  ++po_refs_[driver.value];
  pos_.push_back(PrimaryOutput{driver, inverted, std::move(name)});
}

std::size_t Network::lut_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const LutNode &n) {
    return !n.dead && n.kind == NodeKind::Lut && !n.fanins.empty();
  }));
}

std::optional<NodeId> Network::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end())
    return std::nullopt;
  return it->second;
}

void Network::kill(NodeId root) {
  std::vector<NodeId> stack{root};
  nodes_[root.value].dead = true;
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    for (NodeId f : nodes_[id.value].fanins) {
      auto &fo = fanouts_[f.value];
      auto it = std::find(fo.begin(), fo.end(), id);
      if (it != fo.end())
        fo.erase(it);
      LutNode &fn = nodes_[f.value];
      --fn.fanout_count;
      if (fn.fanout_count == 0 && !fn.dead && !fn.is_pi() && po_refs_[f.value] == 0) {
        fn.dead = true;
        stack.push_back(f);
      }
    }
  }
}

void Network::substitute_node(NodeId old_node, NodeId new_node, bool inverted) {
  if (old_node.value >= nodes_.size() || new_node.value >= nodes_.size())
    throw std::invalid_argument("substitute_node: unknown node");
  if (old_node == new_node)
    throw std::invalid_argument("substitute_node: node cannot replace itself");
  if (nodes_[old_node.value].dead || nodes_[new_node.value].dead)
    throw std::invalid_argument("substitute_node: node is dead");
  if (is_in_tfo(*this, old_node, new_node))
    throw std::invalid_argument("substitute_node: replacement lies in the fanout cone");

  std::vector<NodeId> consumers = fanouts_[old_node.value];
  std::sort(consumers.begin(), consumers.end());
  consumers.erase(std::unique(consumers.begin(), consumers.end()), consumers.end());
  for (NodeId c : consumers) {
    LutNode &cn = nodes_[c.value];
    for (unsigned i = 0; i < cn.fanins.size(); ++i) {
      if (cn.fanins[i] != old_node)
        continue;
      cn.fanins[i] = new_node;
      if (inverted)
        cn.tt = flip_variable(cn.tt, i);
      fanouts_[new_node.value].push_back(c);
      ++nodes_[new_node.value].fanout_count;
    }
  }
  fanouts_[old_node.value].clear();
  nodes_[old_node.value].fanout_count = 0;

  for (auto &po : pos_) {
    if (po.driver != old_node)
      continue;
    po.driver = new_node;
    po.inverted ^= inverted;
    --po_refs_[old_node.value];
    ++po_refs_[new_node.value];
  }

  if (!nodes_[old_node.value].is_pi())
    kill(old_node);
}

std::size_t Network::remove_dead() {
  const std::size_t n = nodes_.size();
  std::vector<char> live(n, 0);
  std::vector<NodeId> stack;
  for (const auto &po : pos_)
    if (!live[po.driver.value]) {
      live[po.driver.value] = 1;
      stack.push_back(po.driver);
    }
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    for (NodeId f : nodes_[id.value].fanins)
      if (!live[f.value]) {
        live[f.value] = 1;
        stack.push_back(f);
      }
  }
  for (NodeId pi : pis_)
    live[pi.value] = 1;

  std::size_t removed = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!live[i] && !nodes_[i].is_pi())
      ++removed;

  // live LUTs in topological order, smaller id first among ready nodes
  std::vector<uint32_t> pending(n, 0);
  std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (!live[i] || nodes_[i].is_pi())
      continue;
    for (NodeId f : nodes_[i].fanins)
      if (!nodes_[f.value].is_pi())
        ++pending[i];
    if (pending[i] == 0)
      ready.push(static_cast<uint32_t>(i));
  }
  std::vector<std::vector<uint32_t>> live_fanouts(n);
  for (std::size_t i = 0; i < n; ++i)
    if (live[i] && !nodes_[i].is_pi())
      for (NodeId f : nodes_[i].fanins)
        if (!nodes_[f.value].is_pi())
          live_fanouts[f.value].push_back(static_cast<uint32_t>(i));

  std::vector<NodeId> order(pis_.begin(), pis_.end());
  while (!ready.empty()) {
    const uint32_t i = ready.top();
    ready.pop();
    order.push_back(NodeId{i});
    for (uint32_t c : live_fanouts[i])
      if (--pending[c] == 0)
        ready.push(c);
  }

  std::vector<NodeId> remap(n, NodeId{UINT32_MAX});
  for (std::size_t i = 0; i < order.size(); ++i)
    remap[order[i].value] = NodeId{static_cast<uint32_t>(i)};

  Network rebuilt(name_);
  for (NodeId old : order) {
    const LutNode &on = nodes_[old.value];
    NodeId fresh;
    if (on.is_pi()) {
      fresh = rebuilt.add_pi(on.name);
    } else {
      std::vector<NodeId> fanins;
      fanins.reserve(on.fanins.size());
      for (NodeId f : on.fanins)
        fanins.push_back(remap[f.value]);
      fresh = rebuilt.add_lut(std::move(fanins), on.tt, on.name);
    }
    rebuilt.nodes_[fresh.value].dont_touch = on.dont_touch;
  }
  for (const auto &po : pos_)
    rebuilt.add_po(remap[po.driver.value], po.inverted, po.name);
  if (const0_ && live[const0_->value])
    rebuilt.const0_ = remap[const0_->value];
  *this = std::move(rebuilt);
  return removed;
}

std::vector<NodeId> topo_order(const Network &net) {
  const std::size_t n = net.size();
  std::vector<uint32_t> pending(n, 0);
  std::priority_queue<uint32_t, std::vector<uint32_t>, std::greater<>> ready;
  std::size_t alive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const LutNode &node = net.node(NodeId{static_cast<uint32_t>(i)});
    if (node.dead)
      continue;
    ++alive;
    pending[i] = static_cast<uint32_t>(node.fanins.size());
    if (pending[i] == 0)
      ready.push(static_cast<uint32_t>(i));
  }
  std::vector<NodeId> order;
  order.reserve(alive);
  while (!ready.empty()) {
    const uint32_t i = ready.top();
    ready.pop();
    order.push_back(NodeId{i});
    for (NodeId c : net.fanouts(NodeId{i}))
      if (--pending[c.value] == 0)
        ready.push(c.value);
  }
  if (order.size() != alive)
    throw std::runtime_error("topo_order: network contains a cycle");
  return order;
}

std::vector<NodeId> reverse_topo_order(const Network &net) {
  auto order = topo_order(net);
  std::reverse(order.begin(), order.end());
  return order;
}

std::vector<NodeId> transitive_fanin(const Network &net, NodeId node, std::size_t bound) {
  std::vector<NodeId> out;
  if (bound == 0)
    return out;
  std::unordered_set<uint32_t> seen{node.value};
  std::queue<NodeId> queue;
  queue.push(node);
  while (!queue.empty()) {
    const NodeId id = queue.front();
    queue.pop();
    for (NodeId f : net.node(id).fanins) {
      if (!seen.insert(f.value).second || net.node(f).is_pi())
        continue;
      out.push_back(f);
      if (out.size() == bound)
        return out;
      queue.push(f);
    }
  }
  return out;
}

bool is_in_tfo(const Network &net, NodeId a, NodeId b) {
  if (a == b)
    return true;
  std::unordered_set<uint32_t> seen{a.value};
  std::vector<NodeId> stack{a};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    for (NodeId c : net.fanouts(id)) {
      if (c == b)
        return true;
      if (seen.insert(c.value).second)
        stack.push_back(c);
    }
  }
  return false;
}

std::vector<NodeId> structural_support(const Network &net, std::span<const NodeId> nodes) {
  std::unordered_set<uint32_t> seen;
  std::vector<NodeId> stack;
  std::vector<NodeId> support;
  for (NodeId n : nodes)
    if (seen.insert(n.value).second)
      stack.push_back(n);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const LutNode &node = net.node(id);
    if (node.is_pi()) {
      support.push_back(id);
      continue;
    }
    for (NodeId f : node.fanins)
      if (seen.insert(f.value).second)
        stack.push_back(f);
  }
  std::sort(support.begin(), support.end());
  return support;
}

LogicMatrix flip_variable(const LogicMatrix &tt, unsigned var) {
  if (var >= tt.arity())
    throw std::invalid_argument("flip_variable: variable out of range");
  LogicMatrix out(tt.arity());
  const unsigned bit = tt.arity() - 1 - var;
  auto src = tt.words();
  auto dst = out.words();
  if (bit >= 6) {
    const std::size_t block = std::size_t{1} << (bit - 6);
    for (std::size_t w = 0; w < src.size(); ++w)
      dst[w ^ block] = src[w];
  } else {
    static constexpr uint64_t kHigh[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull,
                                          0xF0F0F0F0F0F0F0F0ull, 0xFF00FF00FF00FF00ull,
                                          0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    const unsigned s = 1u << bit;
    for (std::size_t w = 0; w < src.size(); ++w)
      dst[w] = ((src[w] & kHigh[bit]) >> s) | ((src[w] << s) & kHigh[bit]);
  }
  return out;
}

std::string check_integrity(const Network &net) {
  std::ostringstream err;
  std::vector<uint32_t> tally(net.size(), 0);
  for (std::size_t i = 0; i < net.size(); ++i) {
    const LutNode &n = net.node(NodeId{static_cast<uint32_t>(i)});
    if (n.id.value != i)
      err << "node " << i << " has id " << n.id.value << "\n";
    if (n.dead)
      continue;
    if (!n.is_pi() && n.tt.arity() != n.fanins.size())
      err << "node " << i << " tt arity mismatch\n";
    for (NodeId f : n.fanins) {
      if (f.value >= net.size()) {
        err << "node " << i << " has unknown fanin\n";
        continue;
      }
      if (net.node(f).dead)
        err << "node " << i << " has dead fanin " << f.value << "\n";
      ++tally[f.value];
    }
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    const LutNode &n = net.node(NodeId{static_cast<uint32_t>(i)});
    if (n.dead)
      continue;
    if (n.fanout_count != tally[i] || net.fanouts(n.id).size() != tally[i])
      err << "node " << i << " fanout count " << n.fanout_count << " != tally " << tally[i]
          << "\n";
  }
  for (const auto &po : net.pos())
    if (po.driver.value >= net.size() || net.node(po.driver).dead)
      err << "PO " << po.name << " has an invalid driver\n";
  try {
    (void)topo_order(net);
  } catch (const std::exception &e) {
    err << e.what() << "\n";
  }
  return err.str();
}

} // namespace stps
