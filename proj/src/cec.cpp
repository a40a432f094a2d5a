// SPDX-License-Identifier: Apache-2.0

#include "stps/cec.hpp"

#include "stps/sat.hpp"
#include "stps/simulator.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace stps {

namespace {

/// perm[i] = index in `b` matched to index i in `a`.
std::vector<std::size_t> match_names(const std::vector<std::string> &a,
                                     const std::vector<std::string> &b, const char *what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string("interface mismatch: ") + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + " " + what);
  std::unordered_map<std::string, std::size_t> index_b;
  for (std::size_t j = 0; j < b.size(); ++j)
    index_b.emplace(b[j], j);
  std::vector<std::size_t> perm(a.size());
  bool by_name = index_b.size() == b.size();
  std::vector<uint8_t> used(b.size(), 0);
  for (std::size_t i = 0; i < a.size() && by_name; ++i) {
    auto it = index_b.find(a[i]);
    if (it == index_b.end() || used[it->second]) {
      by_name = false;
      break;
    }
    used[it->second] = 1;
    perm[i] = it->second;
  }
  if (!by_name)
    for (std::size_t i = 0; i < a.size(); ++i)
      perm[i] = i;
  return perm;
}

std::vector<std::string> pi_names(const Network &n) {
  std::vector<std::string> out;
  for (NodeId pi : n.pis())
    out.push_back(n.node(pi).name);
  return out;
}

std::vector<std::string> po_names(const Network &n) {
  std::vector<std::string> out;
  for (const auto &po : n.pos())
    out.push_back(po.name);
  return out;
}

/// Copies the live logic of `src` into `dst`; src PI i becomes pis[i].
std::vector<NodeId> append(Network &dst, const Network &src, const std::vector<NodeId> &pis) {
  std::vector<NodeId> map(src.size());
  for (std::size_t i = 0; i < src.pis().size(); ++i)
    map[src.pis()[i].value] = pis[i];
  for (NodeId id : topo_order(src)) {
    const LutNode &n = src.node(id);
    if (n.is_pi())
      continue;
    std::vector<NodeId> fanins;
    for (NodeId f : n.fanins)
      fanins.push_back(map[f.value]);
    map[id.value] = dst.add_lut(std::move(fanins), n.tt);
  }
  return map;
}

} // namespace

CecResult check_equivalence(const Network &a, const Network &b, unsigned exhaustive_max_pis) {
  const auto pi_perm = match_names(pi_names(a), pi_names(b), "PIs");
  const auto po_perm = match_names(po_names(a), po_names(b), "POs");
  const std::size_t n = a.pis().size();
  CecResult r;
  r.equivalent = true;

  if (n <= exhaustive_max_pis) {
    r.method = "exhaustive";
    std::vector<std::size_t> leaves(n);
    for (std::size_t i = 0; i < n; ++i)
      leaves[i] = i;
    const PatternSet pa = exhaustive_patterns(n, leaves);
    PatternSet pb = pa;
    for (std::size_t i = 0; i < n; ++i)
      pb.rows[pi_perm[i]] = pa.rows[i];
    const SignatureTable sa = simulate_all(a, pa);
    const SignatureTable sb = simulate_all(b, pb);
    const std::size_t nw = pa.n_words();
    const uint64_t tail = pa.n_patterns % 64 ? (uint64_t{1} << (pa.n_patterns % 64)) - 1 : ~0ull;
    for (std::size_t k = 0; k < a.pos().size(); ++k) {
      const auto &oa = a.pos()[k];
      const auto &ob = b.pos()[po_perm[k]];
      const uint64_t flip = oa.inverted != ob.inverted ? ~uint64_t{0} : 0;
      for (std::size_t w = 0; w < nw; ++w) {
        uint64_t diff = sa[oa.driver][w] ^ sb[ob.driver][w] ^ flip;
        if (w + 1 == nw)
          diff &= tail;
        if (!diff)
          continue;
        const std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(diff));
        r.equivalent = false;
        r.failing_po = oa.name;
        for (std::size_t i = 0; i < n; ++i)
          r.ce.emplace_back(a.node(a.pis()[i]).name, pa.bit(i, j));
        return r;
      }
    }
    return r;
  }

  r.method = "sat";
  Network m("miter");
  std::vector<NodeId> pis_a, pis_b(n);
  for (NodeId pi : a.pis())
    pis_a.push_back(m.add_pi(a.node(pi).name));
  for (std::size_t i = 0; i < n; ++i)
    pis_b[pi_perm[i]] = pis_a[i];
  const auto map_a = append(m, a, pis_a);
  const auto map_b = append(m, b, pis_b);
  for (std::size_t k = 0; k < a.pos().size(); ++k) {
    const auto &oa = a.pos()[k];
    const auto &ob = b.pos()[po_perm[k]];
    const SatOutcome out = prove_equiv(m, map_a[oa.driver.value], map_b[ob.driver.value],
                                       oa.inverted != ob.inverted);
    if (out.status == SatStatus::Unsat)
      continue;
    if (out.status == SatStatus::Undet)
      throw std::runtime_error("check_equivalence: SAT query undetermined");
    r.equivalent = false;
    r.failing_po = oa.name;
    std::unordered_map<uint32_t, bool> value;
    for (const auto &[pi, v] : out.ce)
      value[pi.value] = v;
    for (std::size_t i = 0; i < n; ++i)
      r.ce.emplace_back(a.node(a.pis()[i]).name, value.count(pis_a[i].value) &&
                                                     value[pis_a[i].value]);
    return r;
  }
  return r;
}

} // namespace stps
