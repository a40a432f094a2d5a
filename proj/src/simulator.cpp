// SPDX-License-Identifier: Apache-2.0

#include "stps/simulator.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace stps {

namespace {

constexpr uint32_t kNoSlot = UINT32_MAX;

uint64_t last_word_mask(std::size_t n_bits) {
  const std::size_t r = n_bits & 63;
  return r == 0 ? ~uint64_t{0} : (uint64_t{1} << r) - 1;
}

void mask_tail(std::span<uint64_t> words, std::size_t n_bits) {
  if (!words.empty())
    words.back() &= last_word_mask(n_bits);
}

std::vector<uint32_t> pi_positions(const Network &net) {
  std::vector<uint32_t> pos(net.size(), kNoSlot);
  for (std::size_t i = 0; i < net.pis().size(); ++i)
    pos[net.pis()[i].value] = static_cast<uint32_t>(i);
  return pos;
}

void check_patterns(const Network &net, const PatternSet &p) {
  if (p.rows.size() != net.pis().size())
    throw std::invalid_argument("simulation: pattern set has " + std::to_string(p.rows.size()) +
                                " rows but the network has " +
                                std::to_string(net.pis().size()) + " PIs");
  for (const auto &row : p.rows)
    if (row.size() < p.n_words())
      throw std::invalid_argument("simulation: pattern row is too short");
}

} // namespace

void PatternSet::set_bit(std::size_t pi, std::size_t j, bool v) {
  const uint64_t m = uint64_t{1} << (j & 63);
  if (v)
    rows[pi][j >> 6] |= m;
  else
    rows[pi][j >> 6] &= ~m;
}

void PatternSet::append(const std::vector<bool> &values) {
  if (values.size() != rows.size())
    throw std::invalid_argument("PatternSet::append: value count does not match PI count");
  const std::size_t j = n_patterns++;
  for (auto &row : rows)
    row.resize(n_words(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    set_bit(i, j, values[i]);
}

std::string PatternSet::pattern(std::size_t j) const {
  std::string s;
  for (std::size_t i = 0; i < rows.size(); ++i)
    s.push_back(bit(i, j) ? '1' : '0');
  return s;
}

PatternSet gen_random_patterns(std::size_t n_pi, std::size_t n_patterns, uint64_t seed) {
  std::mt19937_64 rng(seed);
  PatternSet p;
  p.n_patterns = n_patterns;
  p.rows.assign(n_pi, std::vector<uint64_t>(p.n_words()));
  for (auto &row : p.rows) {
    for (auto &w : row)
      w = rng();
    mask_tail(row, n_patterns);
  }
  return p;
}

PatternSet exhaustive_patterns(std::size_t n_pi, std::span<const std::size_t> leaves) {
  static constexpr uint64_t kProj[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull,
                                        0xF0F0F0F0F0F0F0F0ull, 0xFF00FF00FF00FF00ull,
                                        0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
  const std::size_t m = leaves.size();
  if (m > 30)
    throw std::invalid_argument("exhaustive_patterns: too many leaves");
  PatternSet p;
  p.n_patterns = std::size_t{1} << m;
  p.rows.assign(n_pi, std::vector<uint64_t>(p.n_words(), 0));
  for (std::size_t i = 0; i < m; ++i) {
    if (leaves[i] >= n_pi)
      throw std::invalid_argument("exhaustive_patterns: leaf index out of range");
    const std::size_t b = m - 1 - i;
    auto &row = p.rows[leaves[i]];
    for (std::size_t w = 0; w < row.size(); ++w)
      row[w] = b < 6 ? kProj[b] : (((w >> (b - 6)) & 1) ? ~uint64_t{0} : 0);
    mask_tail(row, p.n_patterns);
  }
  return p;
}

PatternSet parse_patterns(std::string_view text, std::size_t n_pi) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    line.erase(std::remove_if(line.begin(), line.end(),
                              [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
               line.end());
    if (!line.empty())
      lines.push_back(line);
  }
  if (n_pi == 0)
    throw std::invalid_argument("parse_patterns: the network has no PIs");
  if (lines.size() == 1 && n_pi > 1) {
    if (lines[0].size() % n_pi != 0)
      throw std::invalid_argument("parse_patterns: a single line must hold " +
                                  std::to_string(n_pi) + " rows of equal length");
    const std::size_t len = lines[0].size() / n_pi;
    std::vector<std::string> split;
    for (std::size_t i = 0; i < n_pi; ++i)
      split.push_back(lines[0].substr(i * len, len));
    lines = std::move(split);
  }
  if (lines.size() != n_pi)
    throw std::invalid_argument("parse_patterns: expected " + std::to_string(n_pi) +
                                " lines, got " + std::to_string(lines.size()));
  const std::size_t n = lines[0].size();
  if (n == 0)
    throw std::invalid_argument("parse_patterns: empty pattern rows");
  PatternSet p;
  p.n_patterns = n;
  p.rows.assign(n_pi, std::vector<uint64_t>(p.n_words(), 0));
  for (std::size_t i = 0; i < n_pi; ++i) {
    if (lines[i].size() != n)
      throw std::invalid_argument("parse_patterns: line " + std::to_string(i + 1) +
                                  " has a different length");
    for (std::size_t j = 0; j < n; ++j) {
      const char c = lines[i][j];
      if (c != '0' && c != '1')
        throw std::invalid_argument("parse_patterns: line " + std::to_string(i + 1) +
                                    " contains '" + std::string(1, c) + "'");
      if (c == '1')
        p.set_bit(i, j, true);
    }
  }
  return p;
}

std::string write_patterns(const PatternSet &p) {
  std::string s;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    for (std::size_t j = 0; j < p.n_patterns; ++j)
      s.push_back(p.bit(i, j) ? '1' : '0');
    s.push_back('\n');
  }
  return s;
}

std::string Signature::to_string() const {
  std::string s(n_patterns, '0');
  for (std::size_t j = 0; j < n_patterns; ++j)
    if (bit(j))
      s[j] = '1';
  return s;
}

SignatureTable::SignatureTable(std::size_t n_nodes, std::size_t n_patterns)
    : n_patterns_(n_patterns), n_words_(words_for(n_patterns)), data_(n_nodes * n_words_, 0) {}

Signature SignatureTable::signature(NodeId id) const {
  const auto w = (*this)[id];
  return Signature{id, n_patterns_, std::vector<uint64_t>(w.begin(), w.end())};
}

SignatureTable simulate_all(const Network &net, const PatternSet &p) {
  check_patterns(net, p);
  SignatureTable table(net.size(), p.n_patterns);
  const std::size_t nw = table.n_words();
  for (std::size_t i = 0; i < net.pis().size(); ++i)
    std::copy_n(p.rows[i].begin(), nw, table[net.pis()[i]].begin());
  std::vector<const uint64_t *> inputs;
  for (NodeId id : topo_order(net)) {
    const LutNode &n = net.node(id);
    if (n.is_pi())
      continue;
    inputs.clear();
    for (NodeId f : n.fanins)
      inputs.push_back(table[f].data());
    auto out = table[id];
    LogicProgram(n.tt).run(inputs, out.data(), nw);
    mask_tail(out, p.n_patterns);
  }
  return table;
}

unsigned cut_limit(std::size_t n_patterns) {
  if (n_patterns < 2)
    return 1;
  const unsigned l = static_cast<unsigned>(std::bit_width(n_patterns) - 1);
  return std::clamp(l, 1u, 16u);
}

std::vector<NodeId> CutSet::roots() const {
  std::vector<NodeId> r;
  r.reserve(cuts.size());
  for (const auto &c : cuts)
    r.push_back(c.root);
  return r;
}

namespace {

std::vector<NodeId> distinct_sorted(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

/// Non-PI nodes of the fanin cones of `targets`, fanins first. Fanins are
/// visited in order, so the result is deterministic.
std::vector<NodeId> cone_postorder(const Network &net, std::span<const NodeId> targets) {
  std::vector<uint8_t> seen(net.size(), 0);
  std::vector<NodeId> order;
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId t : targets) {
    if (t.value >= net.size() || net.node(t).dead)
      throw std::invalid_argument("target " + std::to_string(t.value) + " is not a live node");
    if (seen[t.value])
      continue;
    seen[t.value] = 1;
    stack.emplace_back(t, 0);
    while (!stack.empty()) {
      auto &[id, next] = stack.back();
      const LutNode &n = net.node(id);
      if (next < n.fanins.size()) {
        const NodeId f = n.fanins[next++];
        if (!seen[f.value]) {
          seen[f.value] = 1;
          stack.emplace_back(f, 0);
        }
        continue;
      }
      if (!n.is_pi())
        order.push_back(id);
      stack.pop_back();
    }
  }
  return order;
}

} // namespace

CutSet circuit_cut(const Network &net, unsigned limit, std::span<const NodeId> targets) {
  if (limit == 0)
    throw std::invalid_argument("circuit_cut: limit must be at least 1");
  const std::vector<NodeId> order = cone_postorder(net, targets);

  std::vector<uint8_t> is_target(net.size(), 0);
  for (NodeId t : targets)
    is_target[t.value] = 1;
  std::vector<uint32_t> consumers(net.size(), 0);
  std::vector<NodeId> consumer(net.size());
  std::vector<std::vector<NodeId>> fanin_set(net.size());
  for (NodeId id : order) {
    fanin_set[id.value] = distinct_sorted(net.node(id).fanins);
    for (NodeId f : fanin_set[id.value]) {
      ++consumers[f.value];
      consumer[f.value] = id;
    }
  }

  std::vector<int32_t> cut_of(net.size(), -1);
  std::vector<Cut> cuts;
  std::vector<NodeId> merged;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId id = *it;
    const auto &fl = fanin_set[id.value];
    const bool must_root = is_target[id.value] || net.drives_po(id) || consumers[id.value] != 1;
    if (!must_root) {
      const int32_t k = cut_of[consumer[id.value].value];
      Cut &c = cuts[static_cast<std::size_t>(k)];
      merged.clear();
      for (NodeId l : c.leaves)
        if (l != id)
          merged.push_back(l);
      merged.insert(merged.end(), fl.begin(), fl.end());
      merged = distinct_sorted(std::move(merged));
      if (merged.size() <= limit) {
        c.leaves = merged;
        c.members.push_back(id);
        cut_of[id.value] = k;
        continue;
      }
    }
    cut_of[id.value] = static_cast<int32_t>(cuts.size());
    cuts.push_back(Cut{id, fl, {id}});
  }

  CutSet out;
  out.limit = limit;
  out.cuts.assign(std::make_move_iterator(cuts.rbegin()), std::make_move_iterator(cuts.rend()));
  for (auto &c : out.cuts)
    std::reverse(c.members.begin(), c.members.end());
  return out;
}

namespace {

/// Function of one cut over its sorted leaves. `terms` is scratch space.
LogicMatrix cut_function(const Network &net, const Cut &c,
                         std::unordered_map<uint32_t, LogicTerm> &terms) {
  if (c.leaves.size() > LogicMatrix::kMaxArity)
    throw std::length_error("cut_truth_tables: cut has too many leaves");
  terms.clear();
  for (NodeId l : c.leaves)
    terms.emplace(l.value, LogicTerm{LogicMatrix::identity(), {l.value}});
  std::vector<LogicTerm> children;
  for (NodeId m : c.members) {
    const LutNode &n = net.node(m);
    children.clear();
    for (NodeId f : n.fanins)
      children.push_back(terms.at(f.value));
    terms.insert_or_assign(m.value, compose_terms(n.tt, children));
  }
  const LogicTerm &root = terms.at(c.root.value);
  std::vector<uint32_t> leaf_ids;
  for (NodeId l : c.leaves)
    leaf_ids.push_back(l.value);
  return root.vars == leaf_ids ? root.matrix : expand_to(root.matrix, root.vars, leaf_ids);
}

} // namespace

std::vector<LogicMatrix> cut_truth_tables(const Network &net, const CutSet &cuts) {
  std::vector<LogicMatrix> out;
  out.reserve(cuts.cuts.size());
  std::unordered_map<uint32_t, LogicTerm> terms;
  for (const Cut &c : cuts.cuts)
    out.push_back(cut_function(net, c, terms));
  return out;
}

std::vector<Signature> simulate_specified(const Network &net, const PatternSet &p,
                                          std::span<const NodeId> targets) {
  check_patterns(net, p);
  const std::size_t nw = p.n_words();
  const CutSet cuts = circuit_cut(net, cut_limit(p.n_patterns), targets);
  const std::vector<uint32_t> pi_pos = pi_positions(net);

  std::vector<uint32_t> slot(net.size(), kNoSlot);
  std::vector<uint64_t> values;
  auto value_of = [&](NodeId id) -> const uint64_t * {
    if (slot[id.value] == kNoSlot) {
      if (pi_pos[id.value] == kNoSlot)
        throw std::logic_error("simulate_specified: leaf evaluated before its cut");
      return p.rows[pi_pos[id.value]].data();
    }
    return values.data() + std::size_t{slot[id.value]} * nw;
  };

  for (std::size_t i = 0; i < cuts.cuts.size(); ++i)
    slot[cuts.cuts[i].root.value] = static_cast<uint32_t>(i);
  values.assign(cuts.cuts.size() * nw, 0);
  std::vector<const uint64_t *> inputs;
  std::unordered_map<uint32_t, LogicTerm> terms;
  for (std::size_t i = 0; i < cuts.cuts.size(); ++i) {
    const Cut &c = cuts.cuts[i];
    uint64_t *out = values.data() + i * nw;
    inputs.clear();
    if (c.members.size() == 1) {
      // A lone LUT is its own cut function, taken over its fanin order.
      const LutNode &n = net.node(c.root);
      for (NodeId f : n.fanins)
        inputs.push_back(value_of(f));
      LogicProgram(n.tt).run(inputs, out, nw);
    } else {
      for (NodeId l : c.leaves)
        inputs.push_back(value_of(l));
      LogicProgram(cut_function(net, c, terms)).run(inputs, out, nw);
    }
    mask_tail({out, nw}, p.n_patterns);
  }

  std::vector<Signature> sigs;
  sigs.reserve(targets.size());
  for (NodeId t : targets) {
    const uint64_t *w = value_of(t);
    Signature s{t, p.n_patterns, std::vector<uint64_t>(w, w + nw)};
    mask_tail(s.words, p.n_patterns);
    sigs.push_back(std::move(s));
  }
  return sigs;
}

std::optional<WindowResult> exhaustive_window_sim(const Network &net,
                                                  std::span<const NodeId> targets,
                                                  unsigned window_cap) {
  if (targets.empty())
    throw std::invalid_argument("exhaustive_window_sim: no targets");
  std::vector<NodeId> leaves = structural_support(net, targets);
  if (leaves.size() > window_cap)
    return std::nullopt;
  const std::vector<uint32_t> pi_pos = pi_positions(net);
  std::vector<std::size_t> leaf_index;
  for (NodeId l : leaves)
    leaf_index.push_back(pi_pos[l.value]);
  const PatternSet p = exhaustive_patterns(net.pis().size(), leaf_index);

  WindowResult r;
  r.signatures = simulate_specified(net, p, targets);
  const unsigned m = static_cast<unsigned>(leaves.size());
  for (const auto &s : r.signatures)
    r.rows.push_back(LogicMatrix::from_words(m, s.words));
  r.leaves = std::move(leaves);
  return r;
}

} // namespace stps
