// SPDX-License-Identifier: Apache-2.0

#include "stps/sat.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stps {

uint32_t Cnf::node_var(NodeId id) {
  auto [it, inserted] = var_of_node.emplace(id.value, 0);
  if (inserted)
    it->second = new_var();
  return it->second;
}

void Cnf::add_clause(std::vector<Lit> clause) {
  if (clause.empty())
    throw std::invalid_argument("Cnf::add_clause: empty clause");
  for (Lit l : clause)
    if (l == 0 || static_cast<uint32_t>(l < 0 ? -l : l) > num_vars)
      throw std::invalid_argument("Cnf::add_clause: undeclared variable");
  clauses.push_back(std::move(clause));
}

void encode_cone_into(Cnf &cnf, const Network &net, std::span<const NodeId> roots) {
  std::vector<uint8_t> seen(net.size(), 0);
  std::vector<NodeId> order;
  std::vector<std::pair<NodeId, std::size_t>> stack;
  for (NodeId r : roots) {
    if (seen[r.value])
      continue;
    seen[r.value] = 1;
    stack.emplace_back(r, 0);
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
      order.push_back(id);
      stack.pop_back();
    }
  }

  std::vector<Lit> clause;
  for (NodeId id : order) {
    const bool fresh = !cnf.var_of_node.count(id.value);
    const Lit y = static_cast<Lit>(cnf.node_var(id));
    const LutNode &n = net.node(id);
    if (n.is_pi() || !fresh)
      continue;
    std::vector<Lit> in;
    for (NodeId f : n.fanins)
      in.push_back(static_cast<Lit>(cnf.node_var(f)));
    const unsigned k = n.tt.arity();
    for (uint64_t m = 0; m < n.tt.num_columns(); ++m) {
      clause.clear();
      bool tautology = false;
      for (unsigned i = 0; i < k && !tautology; ++i) {
        const bool bit = (m >> (k - 1 - i)) & 1;
        const Lit l = bit ? -in[i] : in[i];
        if (std::find(clause.begin(), clause.end(), -l) != clause.end())
          tautology = true;
        else if (std::find(clause.begin(), clause.end(), l) == clause.end())
          clause.push_back(l);
      }
      if (tautology)
        continue;
      clause.push_back(n.tt.value(m) ? y : -y);
      cnf.add_clause(clause);
    }
  }
}

Cnf encode_cone(const Network &net, std::span<const NodeId> roots) {
  Cnf cnf;
  encode_cone_into(cnf, net, roots);
  return cnf;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace {

uint32_t to_internal(Lit l) {
  return l > 0 ? static_cast<uint32_t>(l - 1) * 2 : static_cast<uint32_t>(-l - 1) * 2 + 1;
}

double luby(double y, uint64_t x) {
  uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i)
    r *= y;
  return r;
}

constexpr double kVarDecay = 0.95;
constexpr uint64_t kRestartBase = 100;

} // namespace

Solver::Solver(uint64_t seed) : seed_(seed) {}

uint32_t Solver::new_var() {
  const uint32_t v = num_vars();
  assigns_.push_back(kUndef);
  saved_phase_.push_back(kFalse);
  level_.push_back(0);
  reason_.push_back(-1);
  double a = 0;
  if (seed_ != 0) {
    std::mt19937_64 rng(seed_ ^ (0x9E3779B97F4A7C15ull * (v + 1)));
    a = static_cast<double>(rng() % 1000) * 1e-6;
  }
  activity_.push_back(a);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v + 1;
}

bool Solver::heap_less(uint32_t a, uint32_t b) const {
  if (activity_[a] != activity_[b])
    return activity_[a] > activity_[b];
  return a < b;
}

void Solver::heap_up(std::size_t i) {
  const uint32_t v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent]))
      break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int64_t>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int64_t>(i);
}

void Solver::heap_down(std::size_t i) {
  const uint32_t v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size())
      break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child]))
      ++child;
    if (!heap_less(heap_[child], v))
      break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int64_t>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int64_t>(i);
}

void Solver::heap_insert(uint32_t v) {
  if (heap_pos_[v] >= 0)
    return;
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

uint32_t Solver::heap_pop() {
  const uint32_t top = heap_[0];
  heap_pos_[top] = -1;
  const uint32_t last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

void Solver::bump(uint32_t var) {
  if ((activity_[var] += var_inc_) > 1e100) {
    for (auto &a : activity_)
      a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[var] >= 0)
    heap_up(static_cast<std::size_t>(heap_pos_[var]));
}

void Solver::enqueue(uint32_t lit, int64_t reason) {
  const uint32_t v = lit >> 1;
  assigns_[v] = static_cast<uint8_t>((lit & 1) ? kFalse : kTrue);
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(lit);
}

void Solver::attach(uint32_t cref) {
  const auto &c = clauses_[cref];
  watches_[c[0]].push_back(Watcher{cref, c[1]});
  watches_[c[1]].push_back(Watcher{cref, c[0]});
}

bool Solver::add_clause(std::span<const Lit> clause) {
  if (!ok_)
    return false;
  cancel_until(0);
  std::vector<uint32_t> c;
  for (Lit l : clause) {
    if (l == 0 || static_cast<uint32_t>(l < 0 ? -l : l) > num_vars())
      throw std::invalid_argument("Solver::add_clause: undeclared variable");
    c.push_back(to_internal(l));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::vector<uint32_t> kept;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && (c[i] ^ 1) == c[i + 1])
      return true; // tautology
    const uint8_t v = value(c[i]);
    if (v == kTrue)
      return true;
    if (v == kUndef)
      kept.push_back(c[i]);
  }
  if (kept.empty())
    return ok_ = false;
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    return ok_ = propagate() < 0;
  }
  clauses_.push_back(std::move(kept));
  attach(static_cast<uint32_t>(clauses_.size() - 1));
  return true;
}

int64_t Solver::propagate() {
  while (qhead_ < trail_.size()) {
    const uint32_t p = trail_[qhead_++];
    const uint32_t false_lit = p ^ 1;
    auto &ws = watches_[false_lit];
    std::size_t i = 0, j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (value(w.blocker) == kTrue) {
        ws[j++] = ws[i++];
        continue;
      }
      auto &c = clauses_[w.cref];
      if (c[0] == false_lit)
        std::swap(c[0], c[1]);
      ++i;
      const uint32_t first = c[0];
      if (first != w.blocker && value(first) == kTrue) {
        ws[j++] = Watcher{w.cref, first};
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back(Watcher{w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = Watcher{w.cref, first};
      if (value(first) == kFalse) {
        while (i < ws.size())
          ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return w.cref;
      }
      enqueue(first, w.cref);
    }
    ws.resize(j);
  }
  return -1;
}

bool Solver::redundant(uint32_t lit) const {
  const int64_t r = reason_[lit >> 1];
  if (r < 0)
    return false;
  const auto &c = clauses_[static_cast<std::size_t>(r)];
  for (std::size_t k = 1; k < c.size(); ++k) {
    const uint32_t v = c[k] >> 1;
    if (!seen_[v] && level_[v] > 0)
      return false;
  }
  return true;
}

void Solver::analyze(int64_t confl, std::vector<uint32_t> &learnt, uint32_t &bt_level) {
  learnt.clear();
  learnt.push_back(0);
  int path = 0;
  int64_t p = -1;
  std::size_t idx = trail_.size();
  do {
    const auto &c = clauses_[static_cast<std::size_t>(confl)];
    for (std::size_t k = (p < 0 ? 0 : 1); k < c.size(); ++k) {
      const uint32_t q = c[k];
      const uint32_t v = q >> 1;
      if (seen_[v] || level_[v] == 0)
        continue;
      seen_[v] = 1;
      bump(v);
      if (level_[v] >= decision_level())
        ++path;
      else
        learnt.push_back(q);
    }
    while (!seen_[trail_[--idx] >> 1]) {
    }
    p = trail_[idx];
    confl = reason_[static_cast<std::size_t>(p) >> 1];
    seen_[static_cast<std::size_t>(p) >> 1] = 0;
    --path;
  } while (path > 0);
  learnt[0] = static_cast<uint32_t>(p) ^ 1;

  std::vector<uint32_t> all(learnt.begin() + 1, learnt.end());
  std::size_t j = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k)
    if (!redundant(learnt[k]))
      learnt[j++] = learnt[k];
  learnt.resize(j);
  for (uint32_t q : all)
    seen_[q >> 1] = 0;

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (level_[learnt[k] >> 1] > level_[learnt[max_i] >> 1])
        max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[learnt[1] >> 1];
  }
}

void Solver::cancel_until(uint32_t level) {
  if (decision_level() <= level)
    return;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[level];) {
    const uint32_t v = trail_[i] >> 1;
    saved_phase_[v] = assigns_[v];
    assigns_[v] = kUndef;
    reason_[v] = -1;
    heap_insert(v);
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

int64_t Solver::pick_branch() {
  while (!heap_.empty()) {
    const uint32_t v = heap_pop();
    if (assigns_[v] == kUndef)
      return static_cast<int64_t>(2 * v + (saved_phase_[v] == kTrue ? 0 : 1));
  }
  return -1;
}

SatStatus Solver::search(uint64_t budget, std::span<const uint32_t> assumptions, uint64_t limit,
                         uint64_t start) {
  std::vector<uint32_t> learnt;
  uint64_t local = 0;
  for (;;) {
    const int64_t confl = propagate();
    if (confl >= 0) {
      ++conflicts_;
      ++local;
      if (decision_level() == 0) {
        ok_ = false;
        return SatStatus::Unsat;
      }
      uint32_t bt = 0;
      analyze(confl, learnt, bt);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(learnt);
        const auto cref = static_cast<uint32_t>(clauses_.size() - 1);
        attach(cref);
        enqueue(learnt[0], cref);
      }
      var_inc_ /= kVarDecay;
      if (limit != 0 && conflicts_ - start > limit)
        return SatStatus::Undet;
      continue;
    }
    if (local >= budget) {
      cancel_until(0);
      return SatStatus::Undet;
    }
    int64_t next = -1;
    while (decision_level() < assumptions.size()) {
      const uint32_t a = assumptions[decision_level()];
      const uint8_t v = value(a);
      if (v == kTrue) {
        trail_lim_.push_back(static_cast<uint32_t>(trail_.size()));
      } else if (v == kFalse) {
        return SatStatus::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next < 0) {
      next = pick_branch();
      if (next < 0) {
        model_.assign(assigns_.size(), false);
        for (std::size_t v = 0; v < assigns_.size(); ++v)
          model_[v] = assigns_[v] == kTrue;
        return SatStatus::Sat;
      }
    }
    trail_lim_.push_back(static_cast<uint32_t>(trail_.size()));
    enqueue(static_cast<uint32_t>(next), -1);
  }
}

SatStatus Solver::solve(std::span<const Lit> assumptions, uint64_t conflict_limit) {
  if (!ok_)
    return SatStatus::Unsat;
  std::vector<uint32_t> assume;
  for (Lit l : assumptions) {
    if (l == 0 || static_cast<uint32_t>(l < 0 ? -l : l) > num_vars())
      throw std::invalid_argument("Solver::solve: undeclared assumption variable");
    assume.push_back(to_internal(l));
  }
  const uint64_t start = conflicts_;
  SatStatus status = SatStatus::Undet;
  for (uint64_t round = 0;; ++round) {
    const auto budget = static_cast<uint64_t>(luby(2, round) * kRestartBase);
    status = search(budget, assume, conflict_limit, start);
    if (status != SatStatus::Undet)
      break;
    if (conflict_limit != 0 && conflicts_ - start > conflict_limit)
      break;
  }
  cancel_until(0);
  return status;
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

SatOutcome solve(const Cnf &cnf, std::span<const Lit> assumptions, uint64_t conflict_limit,
                 uint64_t seed) {
  Solver s(seed);
  for (uint32_t v = 0; v < cnf.num_vars; ++v)
    s.new_var();
  SatOutcome out;
  bool ok = true;
  for (const auto &c : cnf.clauses)
    if (!(ok = s.add_clause(c)))
      break;
  out.status = ok ? s.solve(assumptions, conflict_limit) : SatStatus::Unsat;
  out.conflicts = s.conflicts();
  if (out.status == SatStatus::Sat) {
    out.model.assign(cnf.num_vars + 1, false);
    for (uint32_t v = 1; v <= cnf.num_vars; ++v)
      out.model[v] = s.model_value(v);
  }
  return out;
}

namespace {

void extract_ce(const Network &net, const Cnf &cnf, std::span<const NodeId> roots,
                SatOutcome &out) {
  for (NodeId pi : structural_support(net, roots)) {
    auto it = cnf.var_of_node.find(pi.value);
    out.ce.emplace_back(pi, it != cnf.var_of_node.end() && out.model[it->second]);
  }
}

} // namespace

SatOutcome prove_equiv(const Network &net, NodeId a, NodeId b, bool inverted,
                       uint64_t conflict_limit) {
  const NodeId roots[2] = {a, b};
  if (a == b) {
    SatOutcome out;
    out.status = inverted ? SatStatus::Sat : SatStatus::Unsat;
    if (inverted)
      for (NodeId pi : structural_support(net, std::span<const NodeId>(roots, 1)))
        out.ce.emplace_back(pi, false);
    return out;
  }
  Cnf cnf = encode_cone(net, roots);
  const Lit va = static_cast<Lit>(cnf.var_of_node.at(a.value));
  const Lit vb = static_cast<Lit>(cnf.var_of_node.at(b.value));
  if (inverted) {
    cnf.add_clause({-va, vb});
    cnf.add_clause({va, -vb});
  } else {
    cnf.add_clause({va, vb});
    cnf.add_clause({-va, -vb});
  }
  SatOutcome out = solve(cnf, {}, conflict_limit);
  if (out.status == SatStatus::Sat)
    extract_ce(net, cnf, roots, out);
  return out;
}

SatOutcome find_assignment(const Network &net, NodeId node, bool value,
                           uint64_t conflict_limit) {
  const NodeId roots[1] = {node};
  Cnf cnf = encode_cone(net, roots);
  const Lit v = static_cast<Lit>(cnf.var_of_node.at(node.value));
  cnf.add_clause({value ? v : -v});
  SatOutcome out = solve(cnf, {}, conflict_limit);
  if (out.status == SatStatus::Sat)
    extract_ce(net, cnf, roots, out);
  return out;
}

std::string to_dimacs(const Cnf &cnf) {
  std::ostringstream os;
  os << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto &c : cnf.clauses) {
    for (Lit l : c)
      os << l << ' ';
    os << "0\n";
  }
  return os.str();
}

} // namespace stps
