// SPDX-License-Identifier: Apache-2.0

#include "stps/io.hpp"
#include "stps/simulator.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <set>

namespace stps {
namespace {

using testing::Rng;

std::vector<NodeId> live_luts(const Network &net) {
  std::vector<NodeId> out;
  for (uint32_t v = 0; v < net.size(); ++v)
    if (!net.node(NodeId{v}).dead && !net.node(NodeId{v}).is_pi())
      out.push_back(NodeId{v});
  return out;
}

std::vector<NodeId> by_names(const Network &net, std::initializer_list<const char *> names) {
  std::vector<NodeId> out;
  for (const char *n : names)
    out.push_back(*net.find(n));
  return out;
}

TEST(PatternTest, ParseWriteAndAppend) {
  const PatternSet p = parse_patterns("0110\n1010\n", 2);
  EXPECT_EQ(p.n_patterns, 4u);
  EXPECT_EQ(p.pattern(1), "10");
  EXPECT_EQ(write_patterns(p), "0110\n1010\n");
  const PatternSet q = parse_patterns(testing::kExamplePatterns, 5);
  EXPECT_EQ(q.n_patterns, 10u);
  EXPECT_EQ(q.pattern(0), "01101");
  PatternSet r = p;
  r.append({true, true});
  EXPECT_EQ(r.n_patterns, 5u);
  EXPECT_EQ(r.pattern(4), "11");
  EXPECT_THROW(parse_patterns("01\n011\n", 2), std::invalid_argument);
  EXPECT_THROW(parse_patterns("0120\n0110\n", 2), std::invalid_argument);
  EXPECT_THROW(parse_patterns("011\n", 2), std::invalid_argument);
}

TEST(PatternTest, ExhaustivePatternsPutFirstLeafFirst) {
  const std::size_t leaves[] = {3, 1};
  const PatternSet p = exhaustive_patterns(4, leaves);
  ASSERT_EQ(p.n_patterns, 4u);
  EXPECT_EQ(p.pattern(0), "0000");
  EXPECT_EQ(p.pattern(1), "0100");
  EXPECT_EQ(p.pattern(2), "0001");
  EXPECT_EQ(p.pattern(3), "0101");
}

TEST(PatternTest, RandomPatternsAreSeededAndMasked) {
  const PatternSet a = gen_random_patterns(3, 100, 7), b = gen_random_patterns(3, 100, 7);
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_NE(a.rows, gen_random_patterns(3, 100, 8).rows);
  for (const auto &row : a.rows)
    EXPECT_EQ(row[1] >> 36, 0u);
}

TEST(CutLimitTest, Values) {
  EXPECT_EQ(cut_limit(10), 3u);
  EXPECT_EQ(cut_limit(2), 1u);
  EXPECT_EQ(cut_limit(1), 1u);
  EXPECT_EQ(cut_limit(4096), 12u);
  EXPECT_EQ(cut_limit(1000000), 16u);
}

TEST(SimulateTest, WorkedExampleSignatures) {
  const Network net = parse_blif(testing::kExampleBlif);
  const PatternSet p = parse_patterns(testing::kExamplePatterns, 5);
  const auto all = simulate_all(net, p);
  // Column j of the pattern matrix is pattern j.
  EXPECT_EQ(all.signature(*net.find("1")).to_string(), "0111001011");
  const auto targets = by_names(net, {"7", "8"});
  const auto spec = simulate_specified(net, p, targets);
  ASSERT_EQ(spec.size(), 2u);
  EXPECT_EQ(spec[0].to_string(), all.signature(targets[0]).to_string());
  EXPECT_EQ(spec[1].to_string(), all.signature(targets[1]).to_string());

  const NodeId t7[] = {targets[0]};
  const auto w7 = exhaustive_window_sim(net, t7);
  ASSERT_TRUE(w7);
  EXPECT_EQ(w7->signatures[0].to_string(), "1110");
  EXPECT_EQ(w7->rows[0].to_string(), "0111");
  const NodeId t8[] = {targets[1]};
  const auto w8 = exhaustive_window_sim(net, t8);
  ASSERT_TRUE(w8);
  EXPECT_EQ(w8->signatures[0].to_string(), "11110001");
  EXPECT_EQ(w8->leaves, by_names(net, {"2", "3", "4"}));
}

TEST(CircuitCutTest, WorkedExample) {
  const Network net = parse_blif(testing::kExampleBlif);
  const auto targets = by_names(net, {"7", "8", "10", "11"});
  const CutSet cs = circuit_cut(net, 3, targets);
  EXPECT_EQ(cs.limit, 3u);
  std::set<std::pair<std::string, std::string>> got;
  for (const Cut &c : cs.cuts) {
    std::string members;
    for (NodeId m : c.members)
      members += net.node(m).name + ",";
    got.emplace(net.node(c.root).name, members);
  }
  const std::set<std::pair<std::string, std::string>> expect = {
      {"7", "7,"}, {"8", "8,"}, {"10", "6,10,"}, {"11", "9,11,"}};
  EXPECT_EQ(got, expect);
  const auto tts = cut_truth_tables(net, cs);
  for (std::size_t i = 0; i < cs.cuts.size(); ++i)
    if (net.node(cs.cuts[i].root).name == "10") {
      EXPECT_EQ(cs.cuts[i].leaves, by_names(net, {"1", "3", "8"}));
      // (1 NAND 3) XOR 8
      for (uint64_t m = 0; m < 8; ++m) {
        const bool a = m & 4, c = m & 2, e = m & 1;
        EXPECT_EQ(tts[i].value(m), (!(a && c)) != e);
      }
    }
}

TEST(CircuitCutTest, StructuralPropertiesOnRandomNets) {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const Network net = testing::random_network(rng, {10, 120, 4, 3});
    const auto luts = live_luts(net);
    std::vector<NodeId> targets;
    for (int i = 0; i < 5; ++i)
      targets.push_back(luts[rng() % luts.size()]);
    const unsigned limit = 1 + static_cast<unsigned>(rng() % 8);
    const CutSet cs = circuit_cut(net, limit, targets);
    std::set<uint32_t> roots, members;
    for (const Cut &c : cs.cuts)
      roots.insert(c.root.value);
    for (NodeId tg : targets)
      EXPECT_TRUE(roots.count(tg.value));
    for (const Cut &c : cs.cuts) {
      EXPECT_TRUE(c.leaves.size() <= limit || c.members.size() == 1);
      EXPECT_EQ(c.members.back(), c.root);
      EXPECT_TRUE(std::is_sorted(c.leaves.begin(), c.leaves.end()));
      const std::set<uint32_t> mine = [&] {
        std::set<uint32_t> s;
        for (NodeId m : c.members)
          s.insert(m.value);
        return s;
      }();
      for (NodeId m : c.members) {
        EXPECT_TRUE(members.insert(m.value).second) << "node in two cuts";
        for (NodeId f : net.node(m).fanins) {
          const bool inside = mine.count(f.value) > 0;
          const bool leaf = std::binary_search(c.leaves.begin(), c.leaves.end(), f);
          EXPECT_TRUE(inside != leaf);
          if (leaf) {
            EXPECT_TRUE(net.node(f).is_pi() || roots.count(f.value));
          }
        }
      }
    }
  }
}

TEST(SimulateTest, SimulateAllMatchesReferenceEvaluation) {
  Rng rng(22);
  for (int t = 0; t < 30; ++t) {
    const Network net = testing::random_network(rng, {8, 60, 4, 3});
    const PatternSet p = gen_random_patterns(8, 150, rng());
    const auto sigs = simulate_all(net, p);
    for (std::size_t j = 0; j < p.n_patterns; ++j) {
      std::vector<bool> in(8);
      for (std::size_t i = 0; i < 8; ++i)
        in[i] = p.bit(i, j);
      const auto val = testing::reference_eval(net, in);
      for (uint32_t v = 0; v < net.size(); ++v)
        ASSERT_EQ(sigs.signature(NodeId{v}).bit(j), val[v] == 1);
    }
  }
}

TEST(SimulateTest, SpecifiedMatchesAllProperty) {
  Rng rng(23);
  for (int t = 0; t < 60; ++t) {
    const auto n_pi = 1 + static_cast<unsigned>(rng() % 20);
    const Network net = testing::random_network(rng, {n_pi, 1 + static_cast<unsigned>(rng() % 300),
                                                      4, 3});
    const std::size_t n_patterns = 1 + rng() % 3000;
    const PatternSet p = gen_random_patterns(n_pi, n_patterns, rng());
    const auto all = simulate_all(net, p);
    std::vector<NodeId> targets;
    for (uint32_t v = 0; v < net.size(); ++v)
      if (rng() % 4 == 0)
        targets.push_back(NodeId{v});
    const auto spec = simulate_specified(net, p, targets);
    ASSERT_EQ(spec.size(), targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      EXPECT_EQ(spec[i].node, targets[i]);
      ASSERT_EQ(spec[i].words, all.signature(targets[i]).words);
    }
  }
}

TEST(SimulateTest, ExhaustiveWindowMatchesBruteForceProperty) {
  Rng rng(24);
  for (int t = 0; t < 40; ++t) {
    const auto n_pi = 1 + static_cast<unsigned>(rng() % 12);
    const Network net = testing::random_network(rng, {n_pi, 40, 4, 2});
    const auto luts = live_luts(net);
    std::vector<NodeId> targets{luts[rng() % luts.size()], luts[rng() % luts.size()]};
    const auto w = exhaustive_window_sim(net, targets);
    ASSERT_TRUE(w);
    const auto n = w->leaves.size();
    std::vector<std::size_t> pi_pos;
    for (NodeId l : w->leaves)
      pi_pos.push_back(std::find(net.pis().begin(), net.pis().end(), l) - net.pis().begin());
    for (uint64_t m = 0; m < (uint64_t{1} << n); ++m) {
      std::vector<bool> in(n_pi, false);
      for (std::size_t i = 0; i < n; ++i)
        in[pi_pos[i]] = (m >> (n - 1 - i)) & 1;
      const auto val = testing::reference_eval(net, in);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        ASSERT_EQ(w->signatures[k].bit(m), val[targets[k].value] == 1);
        ASSERT_EQ(w->rows[k].value(m), val[targets[k].value] == 1);
      }
    }
  }
}

TEST(SimulateTest, WindowCapAndErrors) {
  Rng rng(25);
  const Network net = testing::random_network(rng, {20, 200, 4, 2});
  std::vector<NodeId> all_pos;
  for (const auto &po : net.pos())
    all_pos.push_back(po.driver);
  const auto support = structural_support(net, all_pos);
  EXPECT_EQ(exhaustive_window_sim(net, all_pos, static_cast<unsigned>(support.size()) - 1),
            std::nullopt);
  EXPECT_THROW(simulate_all(net, gen_random_patterns(3, 10, 1)), std::invalid_argument);
}

TEST(SimulateTest, PiTargetsAndDuplicateFanins) {
  Network net;
  const NodeId a = net.add_pi("a"), b = net.add_pi("b");
  const NodeId g = net.add_lut({a, a, b}, LogicMatrix::from_string("10010110"));
  net.add_po(g, false, "y");
  const PatternSet p = gen_random_patterns(2, 77, 3);
  const NodeId targets[] = {a, g};
  const auto spec = simulate_specified(net, p, targets);
  const auto all = simulate_all(net, p);
  EXPECT_EQ(spec[0].words, all.signature(a).words);
  EXPECT_EQ(spec[1].words, all.signature(g).words);
}

} // namespace
} // namespace stps
