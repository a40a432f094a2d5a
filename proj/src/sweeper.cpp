// SPDX-License-Identifier: Apache-2.0

#include "stps/sweeper.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace stps {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct WordsHash {
  std::size_t operator()(const std::vector<uint64_t> &v) const noexcept {
    uint64_t h = v.size();
    for (uint64_t w : v)
      h = splitmix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

uint64_t tail_mask(std::size_t n_bits) {
  const std::size_t r = n_bits & 63;
  return r == 0 ? ~uint64_t{0} : (uint64_t{1} << r) - 1;
}

std::vector<uint64_t> phase_key(std::span<const uint64_t> words, bool phase, std::size_t n_bits) {
  std::vector<uint64_t> key(words.begin(), words.end());
  if (phase)
    for (auto &w : key)
      w = ~w;
  if (!key.empty())
    key.back() &= tail_mask(n_bits);
  return key;
}

std::vector<uint32_t> pi_index(const Network &net) {
  std::vector<uint32_t> idx(net.size(), UINT32_MAX);
  for (std::size_t i = 0; i < net.pis().size(); ++i)
    idx[net.pis()[i].value] = static_cast<uint32_t>(i);
  return idx;
}

/// Values of every node under a single input assignment.
std::vector<uint8_t> eval_pattern(const Network &net, const std::vector<NodeId> &order,
                                  const std::vector<bool> &pi_values) {
  std::vector<uint8_t> val(net.size(), 0);
  for (std::size_t i = 0; i < net.pis().size(); ++i)
    val[net.pis()[i].value] = pi_values[i];
  for (NodeId id : order) {
    const LutNode &n = net.node(id);
    if (n.is_pi())
      continue;
    uint64_t m = 0;
    for (NodeId f : n.fanins)
      m = (m << 1) | val[f.value];
    val[id.value] = n.tt.value(m);
  }
  return val;
}

} // namespace

std::string stats_csv_header() {
  return "gate,result,sat_calls,total_sat_calls,sim_time_s,total_time_s";
}

std::string stats_csv_row(const SweepStats &s) {
  std::ostringstream os;
  os << s.gates << ',' << s.result << ',' << s.sat_calls_sat << ',' << s.sat_calls_total << ','
     << s.sim_time << ',' << s.total_time;
  return os.str();
}

std::string stats_report(const SweepStats &s) {
  std::ostringstream os;
  os << "gate=" << s.gates << '\n'
     << "result=" << s.result << '\n'
     << "sat_calls_total=" << s.sat_calls_total << '\n'
     << "sat_calls_sat=" << s.sat_calls_sat << '\n'
     << "sat_calls_unsat=" << s.sat_calls_unsat << '\n'
     << "sat_calls_undet=" << s.sat_calls_undet << '\n'
     << "pattern_sat_calls=" << s.pattern_sat_calls << '\n'
     << "merges=" << s.merges << '\n'
     << "constants=" << s.constants << '\n'
     << "ce_refinements=" << s.ce_refinements << '\n'
     << "exhaustive_splits=" << s.exhaustive_splits << '\n'
     << "sim_time_s=" << s.sim_time << '\n'
     << "total_time_s=" << s.total_time << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// ClassManager
// ---------------------------------------------------------------------------

ClassManager::ClassManager(std::size_t n_nodes) : class_of_(n_nodes, kNone), phase_(n_nodes, 0) {}

std::vector<NodeId> ClassManager::live_members(const Network &net, uint32_t cls) const {
  std::vector<NodeId> out;
  for (NodeId m : members_.at(cls))
    if (!net.node(m).dead && class_of_[m.value] == cls)
      out.push_back(m);
  return out;
}

uint32_t ClassManager::add_class(const std::vector<NodeId> &nodes, const std::vector<bool> &phases) {
  const auto cls = static_cast<uint32_t>(members_.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId n = nodes[i];
    if (n.value >= class_of_.size()) {
      class_of_.resize(n.value + 1, kNone);
      phase_.resize(n.value + 1, 0);
    }
    if (class_of_[n.value] != kNone)
      throw std::invalid_argument("ClassManager::add_class: node already has a class");
    class_of_[n.value] = cls;
    phase_[n.value] = phases[i];
  }
  members_.push_back(nodes);
  exact_.push_back(0);
  return cls;
}

std::size_t ClassManager::split(const Network &net, uint32_t cls,
                                const std::vector<std::vector<uint64_t>> &keys) {
  const std::vector<NodeId> live = live_members(net, cls);
  if (keys.size() != live.size())
    throw std::invalid_argument("ClassManager::split: key count does not match live members");
  for (NodeId m : members_[cls])
    if (class_of_[m.value] == cls)
      class_of_[m.value] = kNone;

  std::unordered_map<std::vector<uint64_t>, std::size_t, WordsHash> group_of;
  std::vector<std::vector<NodeId>> groups;
  for (std::size_t i = 0; i < live.size(); ++i) {
    auto [it, inserted] = group_of.emplace(keys[i], groups.size());
    if (inserted)
      groups.emplace_back();
    groups[it->second].push_back(live[i]);
  }
  members_[cls].clear();
  const uint8_t was_exact = exact_[cls];
  bool first = true;
  for (auto &g : groups) {
    if (g.size() < 2)
      continue;
    uint32_t id = cls;
    if (!first) {
      id = static_cast<uint32_t>(members_.size());
      members_.emplace_back();
      exact_.push_back(was_exact);
    }
    first = false;
    for (NodeId m : g)
      class_of_[m.value] = id;
    members_[id] = std::move(g);
  }
  return groups.empty() ? 0 : groups.size() - 1;
}

std::vector<uint32_t> ClassManager::active_classes(const Network &net) const {
  std::vector<uint32_t> out;
  for (uint32_t c = 0; c < members_.size(); ++c) {
    std::size_t live = 0;
    for (NodeId m : members_[c])
      if (!net.node(m).dead && class_of_[m.value] == c && ++live >= 2)
        break;
    if (live >= 2)
      out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patterns, constants, classes
// ---------------------------------------------------------------------------

GuidedPatterns sat_guided_patterns(const Network &net, const SweepConfig &cfg) {
  GuidedPatterns g;
  const std::size_t n_pi = net.pis().size();
  g.patterns = gen_random_patterns(n_pi, std::max<std::size_t>(cfg.n_base_patterns, 1), cfg.seed);
  std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x5EED));
  const std::vector<NodeId> order = topo_order(net);
  const std::vector<uint32_t> pidx = pi_index(net);

  std::vector<uint8_t> seen0(net.size(), 0), seen1(net.size(), 0);
  auto observe_all = [&](const SignatureTable &sigs) {
    const std::size_t n = sigs.n_patterns();
    for (NodeId id : order) {
      uint64_t ones = 0;
      for (uint64_t w : sigs[id])
        ones += static_cast<uint64_t>(std::popcount(w));
      seen1[id.value] = ones > 0;
      seen0[id.value] = ones < n;
    }
  };
  auto add_pattern = [&](const std::vector<std::pair<NodeId, bool>> &ce) {
    std::vector<bool> values(n_pi);
    for (std::size_t i = 0; i < n_pi; ++i)
      values[i] = rng() & 1;
    for (const auto &[pi, v] : ce)
      values[pidx[pi.value]] = v;
    g.patterns.append(values);
    const auto val = eval_pattern(net, order, values);
    for (NodeId id : order) {
      seen1[id.value] |= val[id.value];
      seen0[id.value] |= !val[id.value];
    }
    return val;
  };
  auto skip = [&](const LutNode &n) { return n.is_pi() || n.is_constant(); };

  // Round 1: constant-looking signatures.
  observe_all(simulate_all(net, g.patterns));
  std::unordered_set<uint32_t> constant;
  for (NodeId id : order) {
    const LutNode &n = net.node(id);
    if (skip(n) || (seen0[id.value] && seen1[id.value]))
      continue;
    const bool want = !seen1[id.value];
    const SatOutcome out = find_assignment(net, id, want, cfg.conflict_limit);
    ++g.sat_calls;
    if (out.status == SatStatus::Unsat) {
      g.constants.emplace_back(id, !want);
      constant.insert(id.value);
    } else if (out.status == SatStatus::Sat) {
      add_pattern(out.ce);
    }
  }

  // Round 2: low or high toggle rate.
  const SignatureTable sigs = simulate_all(net, g.patterns);
  const std::size_t n = sigs.n_patterns();
  std::vector<std::vector<uint8_t>> added;
  for (NodeId id : order) {
    const LutNode &node = net.node(id);
    if (skip(node) || constant.count(id.value))
      continue;
    const auto w = sigs[id];
    uint64_t ones = 0, toggles = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      ones += static_cast<uint64_t>(std::popcount(w[i]));
      uint64_t shifted = w[i] >> 1;
      if (i + 1 < w.size())
        shifted |= w[i + 1] << 63;
      uint64_t t = w[i] ^ shifted;
      if (i + 1 == w.size())
        t &= n % 64 ? (uint64_t{1} << ((n - 1) % 64)) - 1 : ~uint64_t{0} >> 1;
      toggles += static_cast<uint64_t>(std::popcount(t));
    }
    const double rate = static_cast<double>(toggles) / static_cast<double>(n);
    if (rate >= cfg.toggle_threshold && rate <= 1 - cfg.toggle_threshold)
      continue;
    const bool minority = 2 * ones < n;
    if (std::any_of(added.begin(), added.end(),
                    [&](const auto &val) { return val[id.value] == minority; }))
      continue;
    const SatOutcome out = find_assignment(net, id, minority, cfg.conflict_limit);
    ++g.sat_calls;
    if (out.status == SatStatus::Sat)
      added.push_back(add_pattern(out.ce));
  }
  return g;
}

std::size_t constant_prop(Network &net, const std::vector<std::pair<NodeId, bool>> &constants) {
  std::size_t count = 0;
  for (const auto &[id, value] : constants) {
    const LutNode &n = net.node(id);
    if (n.dead || n.is_pi() || n.is_constant())
      continue;
    const NodeId c0 = net.constant_zero();
    net.substitute_node(id, c0, value);
    ++count;
  }
  return count;
}

ClassManager init_equiv_classes(const Network &net, const SignatureTable &sigs) {
  ClassManager mgr(net.size());
  const std::size_t n = sigs.n_patterns();
  std::unordered_map<std::vector<uint64_t>, std::size_t, WordsHash> group_of;
  std::vector<std::vector<NodeId>> nodes;
  std::vector<std::vector<bool>> phases;
  for (NodeId id : topo_order(net)) {
    const auto w = sigs[id];
    const bool phase = n > 0 && (w[0] & 1);
    auto [it, inserted] = group_of.emplace(phase_key(w, phase, n), nodes.size());
    if (inserted) {
      nodes.emplace_back();
      phases.emplace_back();
    }
    nodes[it->second].push_back(id);
    phases[it->second].push_back(phase);
  }
  for (std::size_t g = 0; g < nodes.size(); ++g)
    if (nodes[g].size() >= 2)
      mgr.add_class(nodes[g], phases[g]);
  return mgr;
}

std::size_t refine_classes(ClassManager &mgr, const Network &net,
                           const std::vector<std::pair<NodeId, bool>> &ce, const SweepConfig &cfg,
                           PatternSet *history, SweepStats *stats) {
  const std::size_t n_pi = net.pis().size();
  const std::size_t n = std::max<std::size_t>(cfg.ce_patterns, 1);
  const std::vector<uint32_t> pidx = pi_index(net);

  uint64_t h = splitmix64(cfg.seed);
  for (const auto &[pi, v] : ce)
    h = splitmix64(h ^ (uint64_t{pi.value} << 1 | (v ? 1 : 0)));
  std::mt19937_64 rng(h);
  PatternSet p;
  p.n_patterns = n;
  p.rows.assign(n_pi, std::vector<uint64_t>(p.n_words()));
  for (auto &row : p.rows)
    for (auto &w : row)
      w = rng();
  for (const auto &[pi, v] : ce)
    std::fill(p.rows[pidx[pi.value]].begin(), p.rows[pidx[pi.value]].end(),
              v ? ~uint64_t{0} : 0);
  for (auto &row : p.rows)
    row.back() &= tail_mask(n);

  std::size_t splits = 0;
  const auto active = mgr.active_classes(net);
  std::vector<NodeId> targets;
  for (uint32_t c : active) {
    const auto live = mgr.live_members(net, c);
    targets.insert(targets.end(), live.begin(), live.end());
  }
  if (!targets.empty()) {
    const auto t0 = Clock::now();
    const auto sigs = simulate_specified(net, p, targets);
    if (stats)
      stats->sim_time += seconds_since(t0);
    std::size_t k = 0;
    for (uint32_t c : active) {
      const auto live = mgr.live_members(net, c);
      std::vector<std::vector<uint64_t>> keys;
      for (NodeId m : live)
        keys.push_back(phase_key(sigs[k++].words, mgr.phase(m), n));
      splits += mgr.split(net, c, keys);
    }
  }

  if (cfg.exhaustive_refinement) {
    for (uint32_t c : mgr.active_classes(net)) {
      if (mgr.exact(c))
        continue;
      const auto live = mgr.live_members(net, c);
      const auto t0 = Clock::now();
      const auto window = exhaustive_window_sim(net, live, cfg.window_cap);
      if (stats)
        stats->sim_time += seconds_since(t0);
      if (!window)
        continue;
      std::vector<std::vector<uint64_t>> keys;
      for (std::size_t i = 0; i < live.size(); ++i) {
        const LogicMatrix row =
            mgr.phase(live[i]) ? window->rows[i].complement() : window->rows[i];
        keys.emplace_back(row.words().begin(), row.words().end());
      }
      const std::size_t before = mgr.num_classes();
      const std::size_t s = mgr.split(net, c, keys);
      splits += s;
      if (stats)
        stats->exhaustive_splits += s;
      mgr.set_exact(c);
      for (std::size_t id = before; id < mgr.num_classes(); ++id)
        mgr.set_exact(static_cast<uint32_t>(id));
    }
  }

  if (history) {
    std::vector<bool> values(n_pi);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n_pi; ++i)
        values[i] = p.bit(i, j);
      history->append(values);
    }
  }
  return splits;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

SweepResult sweep(Network net, const SweepConfig &cfg) {
  const auto t_start = Clock::now();
  SweepStats stats;
  stats.gates = net.lut_count();

  GuidedPatterns guided = sat_guided_patterns(net, cfg);
  stats.pattern_sat_calls = guided.sat_calls;
  stats.constants = constant_prop(net, guided.constants);

  const auto t0 = Clock::now();
  const SignatureTable sigs = simulate_all(net, guided.patterns);
  stats.sim_time += seconds_since(t0);
  ClassManager mgr = init_equiv_classes(net, sigs);

  const std::vector<NodeId> order = topo_order(net);
  std::vector<std::size_t> pos(net.size(), SIZE_MAX);
  for (std::size_t i = 0; i < order.size(); ++i)
    pos[order[i].value] = i;

  std::unordered_set<uint32_t> tried;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId cand = *it;
    const LutNode &cn = net.node(cand);
    if (cn.dead || cn.is_pi() || cn.is_constant() || cn.dont_touch)
      continue;
    const uint32_t cls = mgr.class_of(cand);
    if (cls == ClassManager::kNone)
      continue;
    const std::vector<NodeId> class_new = mgr.live_members(net, cls);
    if (class_new.size() < 2)
      continue;

    tried.clear();
    bool done = false;
    for (NodeId gj : class_new) {
      if (done)
        break;
      std::vector<NodeId> drivers;
      for (NodeId k : transitive_fanin(net, gj, cfg.tfi_bound))
        if (mgr.class_of(k) == cls)
          drivers.push_back(k);
      drivers.push_back(gj);
      for (NodeId drv : drivers) {
        if (!tried.insert(drv.value).second)
          continue;
        // Drivers must precede the candidate in the original order. That
        // keeps them out of its TFO and keeps `order` topological after the
        // substitution.
        if (drv == cand || net.node(drv).dead || pos[drv.value] >= pos[cand.value] ||
            mgr.class_of(drv) != mgr.class_of(cand))
          continue;
        const bool phase = mgr.phase(cand) != mgr.phase(drv);
        const SatOutcome out = prove_equiv(net, cand, drv, phase, cfg.conflict_limit);
        ++stats.sat_calls_total;
        if (out.status == SatStatus::Undet) {
          ++stats.sat_calls_undet;
          net.set_dont_touch(cand);
          done = true;
          break;
        }
        if (out.status == SatStatus::Unsat) {
          ++stats.sat_calls_unsat;
          net.substitute_node(cand, drv, phase);
          ++stats.merges;
          done = true;
          break;
        }
        ++stats.sat_calls_sat;
        ++stats.ce_refinements;
        refine_classes(mgr, net, out.ce, cfg, nullptr, &stats);
        const uint32_t now = mgr.class_of(cand);
        if (now == ClassManager::kNone || mgr.live_members(net, now).size() < 2) {
          done = true;
          break;
        }
      }
    }
  }

  net.remove_dead();
  stats.result = net.lut_count();
  stats.total_time = seconds_since(t_start);
  return SweepResult{std::move(net), stats};
}

} // namespace stps
