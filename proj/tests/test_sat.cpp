// SPDX-License-Identifier: Apache-2.0

#include "stps/cec.hpp"
#include "stps/io.hpp"
#include "stps/sat.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace stps {
namespace {

using testing::Rng;

Cnf random_cnf(Rng &rng, uint32_t n_vars, std::size_t n_clauses, unsigned max_len) {
  Cnf cnf;
  cnf.num_vars = n_vars;
  for (std::size_t i = 0; i < n_clauses; ++i) {
    const unsigned len = 1 + static_cast<unsigned>(rng() % max_len);
    std::vector<Lit> c;
    for (unsigned j = 0; j < len; ++j) {
      const auto v = static_cast<Lit>(1 + rng() % n_vars);
      c.push_back(rng() & 1 ? v : -v);
    }
    cnf.add_clause(std::move(c));
  }
  return cnf;
}

bool satisfies(const Cnf &cnf, uint64_t assignment) {
  for (const auto &c : cnf.clauses) {
    bool sat = false;
    for (Lit l : c) {
      const bool v = (assignment >> (std::abs(l) - 1)) & 1;
      sat |= (l > 0) == v;
    }
    if (!sat)
      return false;
  }
  return true;
}

bool brute_force_sat(const Cnf &cnf) {
  for (uint64_t m = 0; m < (uint64_t{1} << cnf.num_vars); ++m)
    if (satisfies(cnf, m))
      return true;
  return false;
}

TEST(SolverTest, TrivialCases) {
  Solver s;
  const uint32_t a = s.new_var(), b = s.new_var();
  const Lit c1[] = {static_cast<Lit>(a), static_cast<Lit>(b)};
  const Lit c2[] = {-static_cast<Lit>(a)};
  EXPECT_TRUE(s.add_clause(c1));
  EXPECT_TRUE(s.add_clause(c2));
  EXPECT_EQ(s.solve(), SatStatus::Sat);
  EXPECT_FALSE(s.model_value(a));
  EXPECT_TRUE(s.model_value(b));
  const Lit assume[] = {-static_cast<Lit>(b)};
  EXPECT_EQ(s.solve(assume), SatStatus::Unsat);
  EXPECT_EQ(s.solve(), SatStatus::Sat);
  const Lit c3[] = {-static_cast<Lit>(b)};
  s.add_clause(c3);
  EXPECT_EQ(s.solve(), SatStatus::Unsat);
}

TEST(SolverTest, RandomCnfAgreesWithEnumerationProperty) {
  Rng rng(31);
  int sat = 0;
  for (int t = 0; t < 400; ++t) {
    const auto n = static_cast<uint32_t>(1 + rng() % 14);
    const Cnf cnf = random_cnf(rng, n, static_cast<std::size_t>(n * (1 + rng() % 3)), 3);
    const SatOutcome r = solve(cnf, {}, 0, rng() % 3);
    const bool expect = brute_force_sat(cnf);
    ASSERT_EQ(r.status == SatStatus::Sat, expect);
    if (expect) {
      ++sat;
      uint64_t m = 0;
      for (uint32_t v = 1; v <= n; ++v)
        m |= uint64_t{r.model[v]} << (v - 1);
      ASSERT_TRUE(satisfies(cnf, m));
    }
  }
  EXPECT_GT(sat, 50);
  EXPECT_LT(sat, 350);
}

TEST(SolverTest, AssumptionsAgreeWithEnumeration) {
  Rng rng(32);
  for (int t = 0; t < 200; ++t) {
    const auto n = static_cast<uint32_t>(3 + rng() % 10);
    Cnf cnf = random_cnf(rng, n, n * 3, 3);
    std::vector<Lit> assume;
    for (uint32_t v = 1; v <= n; ++v)
      if (rng() % 4 == 0)
        assume.push_back(rng() & 1 ? static_cast<Lit>(v) : -static_cast<Lit>(v));
    Cnf with_units = cnf;
    for (Lit l : assume)
      with_units.add_clause({l});
    EXPECT_EQ(solve(cnf, assume).status == SatStatus::Sat, brute_force_sat(with_units));
  }
}

TEST(SolverTest, PigeonholeIsUnsatAndRespectsConflictLimit) {
  // 7 pigeons, 6 holes.
  const int p = 7, h = 6;
  Cnf cnf;
  auto var = [&](int i, int j) { return static_cast<Lit>(1 + i * h + j); };
  cnf.num_vars = p * h;
  for (int i = 0; i < p; ++i) {
    std::vector<Lit> c;
    for (int j = 0; j < h; ++j)
      c.push_back(var(i, j));
    cnf.add_clause(c);
  }
  for (int j = 0; j < h; ++j)
    for (int a = 0; a < p; ++a)
      for (int b = a + 1; b < p; ++b)
        cnf.add_clause({-var(a, j), -var(b, j)});
  EXPECT_EQ(solve(cnf, {}, 10).status, SatStatus::Undet);
  EXPECT_EQ(solve(cnf).status, SatStatus::Unsat);
}

TEST(CnfTest, RejectsBadClausesAndWritesDimacs) {
  Cnf cnf;
  cnf.new_var();
  EXPECT_THROW(cnf.add_clause({}), std::invalid_argument);
  EXPECT_THROW(cnf.add_clause({2}), std::invalid_argument);
  cnf.add_clause({1, -1});
  EXPECT_EQ(to_dimacs(cnf), "p cnf 1 1\n1 -1 0\n");
}

TEST(CnfTest, ConeEncodingHasOneSolutionPerInput) {
  Rng rng(33);
  for (int t = 0; t < 20; ++t) {
    const Network net = testing::random_network(rng, {5, 15, 3, 1});
    std::vector<NodeId> roots;
    for (const auto &po : net.pos())
      roots.push_back(po.driver);
    const Cnf cnf = encode_cone(net, roots);
    ASSERT_LE(cnf.num_vars, 20u);
    uint64_t count = 0;
    for (uint64_t m = 0; m < (uint64_t{1} << cnf.num_vars); ++m)
      count += satisfies(cnf, m);
    const auto support = structural_support(net, roots);
    EXPECT_EQ(count, uint64_t{1} << support.size());
  }
}

TEST(ProveEquivTest, AgreesWithTruthTablesProperty) {
  Rng rng(34);
  for (int t = 0; t < 15; ++t) {
    const auto n_pi = 2 + static_cast<unsigned>(rng() % 7);
    const Network net = testing::random_network(rng, {n_pi, 20, 3, 1});
    std::vector<std::string> tt(net.size(), std::string(std::size_t{1} << n_pi, '0'));
    for (uint64_t m = 0; m < (uint64_t{1} << n_pi); ++m) {
      const auto val = testing::reference_eval(net, testing::assignment(m, n_pi));
      for (uint32_t v = 0; v < net.size(); ++v)
        tt[v][m] = val[v] ? '1' : '0';
    }
    for (uint32_t a = 0; a < net.size(); ++a)
      for (uint32_t b = a; b < net.size(); ++b)
        for (bool inv : {false, true}) {
          std::string tb = tt[b];
          if (inv)
            for (char &c : tb)
              c = c == '0' ? '1' : '0';
          const SatOutcome r = prove_equiv(net, NodeId{a}, NodeId{b}, inv);
          ASSERT_EQ(r.status == SatStatus::Unsat, tt[a] == tb) << a << " " << b << " " << inv;
          if (r.status == SatStatus::Sat) {
            std::vector<bool> in(n_pi, false);
            for (const auto &[pi, v] : r.ce)
              in[std::find(net.pis().begin(), net.pis().end(), pi) - net.pis().begin()] = v;
            const auto val = testing::reference_eval(net, in);
            ASSERT_NE(val[a], val[b] != inv);
          }
        }
  }
}

TEST(FindAssignmentTest, ConstantsAndWitnesses) {
  Network net;
  const NodeId a = net.add_pi("a");
  const NodeId na = net.add_lut({a}, LogicMatrix::from_string("01"));
  const NodeId z = net.add_lut({a, na}, LogicMatrix::from_string("1000"));
  EXPECT_EQ(find_assignment(net, z, true).status, SatStatus::Unsat);
  const SatOutcome r = find_assignment(net, na, true);
  ASSERT_EQ(r.status, SatStatus::Sat);
  ASSERT_EQ(r.ce.size(), 1u);
  EXPECT_FALSE(r.ce[0].second);
}

TEST(CecTest, ExhaustiveAndSatAgree) {
  Rng rng(35);
  for (int t = 0; t < 20; ++t) {
    const Network a = testing::random_network(rng, {8, 40, 4, 2});
    Network b = parse_blif(write_blif(a));
    const auto ex = check_equivalence(a, b);
    EXPECT_TRUE(ex.equivalent);
    EXPECT_EQ(ex.method, "exhaustive");
    const auto st = check_equivalence(a, b, 0);
    EXPECT_TRUE(st.equivalent);
    EXPECT_EQ(st.method, "sat");
  }
}

TEST(CecTest, ReportsCounterExample) {
  const Network a = parse_blif(testing::kExampleBlif);
  std::string text = testing::kExampleBlif;
  text.replace(text.find(".names 4 5 9\n11 1"), 17, ".names 4 5 9\n10 1");
  const Network b = parse_blif(text);
  for (unsigned cap : {14u, 0u}) {
    const auto r = check_equivalence(a, b, cap);
    ASSERT_FALSE(r.equivalent);
    EXPECT_EQ(r.failing_po, "po2");
    std::vector<bool> in(5, false);
    for (const auto &[name, v] : r.ce)
      in[std::stoi(name) - 1] = v;
    const auto va = testing::reference_eval(a, in), vb = testing::reference_eval(b, in);
    EXPECT_NE(va[a.pos()[1].driver.value], vb[b.pos()[1].driver.value]);
  }
  Network small;
  small.add_pi("x");
  EXPECT_THROW(check_equivalence(a, small), std::invalid_argument);
}

} // namespace
} // namespace stps
