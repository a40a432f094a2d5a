// SPDX-License-Identifier: Apache-2.0

#include "stps/expr.hpp"
#include "stps/stp.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace stps {
namespace {

using testing::Rng;
using testing::random_tt;

IntMatrix eye(std::size_t n) { return IntMatrix::identity(n); }

/// Dense product L · (I_{2^pos} ⊗ B), the reference for the compact ops.
IntMatrix dense_apply(const LogicMatrix &l, unsigned pos, const IntMatrix &b) {
  return stp(l.to_dense(), kronecker(eye(std::size_t{1} << pos), b));
}

TEST(IntMatrixTest, MultiplyAndKronecker) {
  const IntMatrix a{{1, 2}, {3, 4}};
  const IntMatrix b{{0, 1}, {1, 0}};
  EXPECT_EQ(multiply(a, b), (IntMatrix{{2, 1}, {4, 3}}));
  EXPECT_EQ(kronecker(eye(2), b), (IntMatrix{{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));
  EXPECT_THROW(multiply(a, IntMatrix(3, 1)), std::invalid_argument);
}

TEST(IntMatrixTest, StpReducesToProductWhenDimensionsMatch) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    IntMatrix a(3, 4), b(4, 2);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 4; ++c)
        a(r, c) = static_cast<int64_t>(rng() % 7) - 3;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 2; ++c)
        b(r, c) = static_cast<int64_t>(rng() % 7) - 3;
    EXPECT_EQ(stp(a, b), multiply(a, b));
  }
}

TEST(IntMatrixTest, StpHandlesBothMismatchDirections) {
  // A has 4 columns, B 2 rows: B is padded with I_2.
  const IntMatrix a{{1, 0, 0, 1}};
  const IntMatrix b{{1}, {2}};
  EXPECT_EQ(stp(a, b), (IntMatrix{{1, 2}}));
  // A has 1 column, B 2 rows: A is padded with I_2.
  const IntMatrix c{{1}, {0}};
  const IntMatrix d{{0, 1}, {1, 0}};
  const IntMatrix r = stp(c, d);
  EXPECT_EQ(r.rows(), 4u);
  EXPECT_EQ(r.cols(), 2u);
  EXPECT_EQ(r, multiply(kronecker(c, eye(2)), d));
}

TEST(IntMatrixTest, StpIsAssociative) {
  Rng rng(5);
  auto rand_m = [&](std::size_t r, std::size_t c) {
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        m(i, j) = static_cast<int64_t>(rng() % 5) - 2;
    return m;
  };
  const std::size_t dims[] = {1, 2, 4};
  for (int t = 0; t < 50; ++t) {
    const IntMatrix a = rand_m(dims[rng() % 3], dims[rng() % 3]);
    const IntMatrix b = rand_m(dims[rng() % 3], dims[rng() % 3]);
    const IntMatrix c = rand_m(dims[rng() % 3], dims[rng() % 3]);
    EXPECT_EQ(stp(stp(a, b), c), stp(a, stp(b, c)));
  }
}

TEST(StructuralMatrixTest, OrTimesNot) {
  const IntMatrix r = stp(structural_matrix(LogicOp::Or).to_dense(),
                          structural_matrix(LogicOp::Not).to_dense());
  EXPECT_EQ(r, (IntMatrix{{1, 0, 1, 1}, {0, 1, 0, 0}}));
}

TEST(StructuralMatrixTest, BuiltInOperators) {
  EXPECT_EQ(structural_matrix(LogicOp::Not).to_string(), "01");
  EXPECT_EQ(structural_matrix(LogicOp::And).to_string(), "1000");
  EXPECT_EQ(structural_matrix(LogicOp::Or).to_string(), "1110");
  EXPECT_EQ(structural_matrix(LogicOp::Xor).to_string(), "0110");
  EXPECT_EQ(structural_matrix(LogicOp::Implies).to_string(), "1011");
  EXPECT_EQ(structural_matrix(LogicOp::Iff).to_string(), "1001");
  EXPECT_EQ(structural_matrix(LogicOp::Nand).to_string(), "0111");
  EXPECT_EQ(structural_matrix(LogicOp::Nor).to_string(), "0001");
  EXPECT_EQ(structural_matrix("<->"), structural_matrix(LogicOp::Iff));
  EXPECT_THROW(structural_matrix("??"), std::invalid_argument);
}

TEST(StructuralMatrixTest, AgreesWithBooleanVectorProducts) {
  for (LogicOp op : {LogicOp::And, LogicOp::Or, LogicOp::Xor, LogicOp::Implies, LogicOp::Iff}) {
    const LogicMatrix m = structural_matrix(op);
    for (bool a : {false, true})
      for (bool b : {false, true}) {
        const IntMatrix r = stp(stp(m.to_dense(), BoolVec{a}.matrix()), BoolVec{b}.matrix());
        const uint64_t minterm = (a ? 2 : 0) | (b ? 1 : 0);
        EXPECT_EQ(to_bool_vec(r).value, m.value(minterm));
      }
  }
}

TEST(LogicMatrixTest, StringRoundTripAndValidation) {
  const auto m = LogicMatrix::from_string("10010110");
  EXPECT_EQ(m.arity(), 3u);
  EXPECT_EQ(m.to_string(), "10010110");
  EXPECT_TRUE(m.column_top(0));
  EXPECT_TRUE(m.value(7));
  EXPECT_EQ(m.count_ones(), 4u);
  EXPECT_EQ(m.complement().to_string(), "01101001");
  EXPECT_THROW(LogicMatrix::from_string("101"), std::invalid_argument);
  EXPECT_THROW(LogicMatrix::from_string("10a1"), std::invalid_argument);
  EXPECT_TRUE(LogicMatrix::constant(false).is_const0());
  EXPECT_TRUE(LogicMatrix::constant(true).is_const1());
  EXPECT_EQ(LogicMatrix::from_dense(m.to_dense()), m);
}

TEST(LogicMatrixTest, ProjectionAndLargeArity) {
  const auto p = LogicMatrix::projection(3, 1);
  for (uint64_t m = 0; m < 8; ++m)
    EXPECT_EQ(p.value(m), ((m >> 1) & 1) != 0);
  const auto big = LogicMatrix::projection(10, 0);
  EXPECT_EQ(big.count_ones(), 512u);
  EXPECT_TRUE(big.value(1023));
  EXPECT_FALSE(big.value(511));
}

TEST(CompactOpsTest, ApplyBoolMatchesDenseProduct) {
  Rng rng(11);
  for (unsigned k = 1; k <= 6; ++k)
    for (int t = 0; t < 10; ++t) {
      const LogicMatrix l = random_tt(rng, k);
      for (bool v : {false, true}) {
        const IntMatrix dense = stp(l.to_dense(), BoolVec{v}.matrix());
        EXPECT_EQ(apply_bool(l, BoolVec{v}).to_dense(), dense);
      }
    }
  EXPECT_THROW(apply_bool(LogicMatrix::constant(true), kTrue), std::invalid_argument);
}

TEST(CompactOpsTest, ComposeMatchesDenseProduct) {
  Rng rng(12);
  for (unsigned k = 1; k <= 4; ++k)
    for (unsigned j = 0; j <= 3; ++j)
      for (unsigned pos = 0; pos < k; ++pos) {
        const LogicMatrix l = random_tt(rng, k);
        const LogicMatrix a = random_tt(rng, j);
        EXPECT_EQ(compose(l, pos, a).to_dense(), dense_apply(l, pos, a.to_dense()));
      }
}

TEST(CompactOpsTest, SwapReduceInsertMatchDenseProducts) {
  Rng rng(13);
  for (unsigned k = 1; k <= 6; ++k)
    for (int t = 0; t < 5; ++t) {
      const LogicMatrix l = random_tt(rng, k);
      for (unsigned pos = 0; pos + 1 < k; ++pos) {
        EXPECT_EQ(swap_vars(l, pos).to_dense(), dense_apply(l, pos, swap_matrix()));
        EXPECT_EQ(reduce_power(l, pos).to_dense(), dense_apply(l, pos, power_reducing_matrix()));
      }
      for (unsigned pos = 0; pos < k; ++pos)
        EXPECT_EQ(insert_dummy(l, pos).to_dense(), dense_apply(l, pos, dummy_matrix()));
    }
}

TEST(CompactOpsTest, HelperMatrixIdentities) {
  for (bool x : {false, true})
    for (bool y : {false, true}) {
      const IntMatrix vx = BoolVec{x}.matrix(), vy = BoolVec{y}.matrix();
      EXPECT_EQ(stp(stp(swap_matrix(), vx), vy), stp(vy, vx));
      EXPECT_EQ(stp(stp(dummy_matrix(), vx), vy), vy);
    }
  for (bool x : {false, true}) {
    const IntMatrix v = BoolVec{x}.matrix();
    EXPECT_EQ(stp(v, v), stp(power_reducing_matrix(), v));
  }
}

TEST(CompactOpsTest, InsertDummyIgnoresNewVariable) {
  Rng rng(14);
  for (unsigned k = 0; k <= 5; ++k) {
    const LogicMatrix l = random_tt(rng, k);
    for (unsigned pos = 0; pos <= k; ++pos) {
      const LogicMatrix e = insert_dummy(l, pos);
      ASSERT_EQ(e.arity(), k + 1);
      for (uint64_t m = 0; m < e.num_columns(); ++m) {
        // Drop bit (k - pos) counted from the LSB side.
        const unsigned b = k - pos;
        const uint64_t hi = m >> (b + 1), lo = m & ((uint64_t{1} << b) - 1);
        EXPECT_EQ(e.value(m), l.value((hi << b) | lo));
      }
    }
  }
}

// Swapping adjacent factors is the only reordering primitive the symbolic
// canonical form needs; it must act as a transposition of variables.
TEST(CompactOpsTest, SwapIsTranspositionProperty) {
  Rng rng(15);
  for (int t = 0; t < 200; ++t) {
    const unsigned k = 2 + static_cast<unsigned>(rng() % 9);
    const unsigned pos = static_cast<unsigned>(rng() % (k - 1));
    const LogicMatrix l = random_tt(rng, k);
    const LogicMatrix s = swap_vars(l, pos);
    EXPECT_EQ(swap_vars(s, pos), l);
    const unsigned b1 = k - 1 - pos, b2 = k - 2 - pos;
    for (uint64_t m = 0; m < l.num_columns(); ++m) {
      const uint64_t x = ((m >> b1) ^ (m >> b2)) & 1;
      const uint64_t swapped = m ^ ((x << b1) | (x << b2));
      ASSERT_EQ(s.value(m), l.value(swapped));
    }
  }
}

TEST(CompactOpsTest, ExpandToMatchesRepeatedInsertion) {
  Rng rng(16);
  for (int t = 0; t < 100; ++t) {
    std::vector<uint32_t> target;
    for (uint32_t v = 0; v < 10; ++v)
      if (rng() & 1)
        target.push_back(v);
    std::vector<uint32_t> vars;
    for (uint32_t v : target)
      if (rng() & 1)
        vars.push_back(v);
    const LogicMatrix l = random_tt(rng, static_cast<unsigned>(vars.size()));
    LogicMatrix ref = l;
    std::size_t j = 0;
    for (unsigned pos = 0; pos < target.size(); ++pos) {
      if (j < vars.size() && vars[j] == target[pos])
        ++j;
      else
        ref = insert_dummy(ref, pos);
    }
    EXPECT_EQ(expand_to(l, vars, target), ref);
  }
}

TEST(ComposeTermsTest, MatchesPointwiseEvaluation) {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    const unsigned k = 1 + static_cast<unsigned>(rng() % 4);
    const LogicMatrix f = random_tt(rng, k);
    std::vector<LogicTerm> children;
    for (unsigned i = 0; i < k; ++i) {
      LogicTerm c;
      for (uint32_t v = 0; v < 8; ++v)
        if (rng() % 3 == 0)
          c.vars.push_back(v * 3);
      c.matrix = random_tt(rng, static_cast<unsigned>(c.vars.size()));
      children.push_back(std::move(c));
    }
    const LogicTerm r = compose_terms(f, children);
    ASSERT_TRUE(std::is_sorted(r.vars.begin(), r.vars.end()));
    const auto n = static_cast<unsigned>(r.vars.size());
    for (uint64_t m = 0; m < (uint64_t{1} << n); ++m) {
      auto var_value = [&](uint32_t var) {
        const auto idx = std::find(r.vars.begin(), r.vars.end(), var) - r.vars.begin();
        return (m >> (n - 1 - idx)) & 1;
      };
      uint64_t fm = 0;
      for (const LogicTerm &c : children) {
        uint64_t cm = 0;
        for (uint32_t v : c.vars)
          cm = (cm << 1) | var_value(v);
        fm = (fm << 1) | c.matrix.value(cm);
      }
      ASSERT_EQ(r.matrix.value(m), f.value(fm));
    }
  }
}

TEST(ComposeTermsTest, RejectsBadInput) {
  const LogicTerm x{LogicMatrix::projection(1, 0), {0}};
  const LogicTerm children[] = {x};
  EXPECT_THROW(compose_terms(structural_matrix(LogicOp::And), children), std::invalid_argument);
  std::vector<LogicTerm> wide;
  for (uint32_t v = 0; v < 26; v += 2) {
    LogicTerm t{LogicMatrix::projection(2, 0), {v, v + 1}};
    wide.push_back(t);
  }
  LogicMatrix f(static_cast<unsigned>(wide.size()));
  EXPECT_THROW(compose_terms(f, wide), std::length_error);
}

TEST(LogicProgramTest, EvaluatesEveryColumn) {
  Rng rng(18);
  for (unsigned k = 0; k <= 10; ++k)
    for (int t = 0; t < 5; ++t) {
      const LogicMatrix f = random_tt(rng, k);
      const LogicProgram prog(f);
      EXPECT_EQ(prog.arity(), k);
      const std::size_t n_words = 40;
      std::vector<std::vector<uint64_t>> in(k, std::vector<uint64_t>(n_words));
      std::vector<const uint64_t *> ptrs;
      for (auto &row : in) {
        for (auto &w : row)
          w = rng();
        ptrs.push_back(row.data());
      }
      std::vector<uint64_t> out(n_words);
      prog.run(ptrs, out.data(), n_words);
      for (std::size_t w = 0; w < n_words; ++w)
        for (unsigned b = 0; b < 64; ++b) {
          uint64_t m = 0;
          for (unsigned i = 0; i < k; ++i)
            m = (m << 1) | ((in[i][w] >> b) & 1);
          ASSERT_EQ((out[w] >> b) & 1, f.value(m) ? 1u : 0u);
        }
    }
}

TEST(LogicProgramTest, SharesEqualSubfunctions) {
  // Parity over 8 inputs needs only two nodes per level.
  LogicMatrix parity(8);
  for (uint64_t m = 0; m < 256; ++m)
    parity.set_value(m, std::popcount(m) & 1);
  EXPECT_LE(LogicProgram(parity).num_ops(), 16u);
}

BoolExpr liar_puzzle() {
  using K = BoolExpr::Kind;
  const BoolExpr a = BoolExpr::variable(1), b = BoolExpr::variable(2), c = BoolExpr::variable(3);
  const BoolExpr e1 = BoolExpr::binary(K::Iff, a, BoolExpr::negate(b));
  const BoolExpr e2 = BoolExpr::binary(K::Iff, b, BoolExpr::negate(c));
  const BoolExpr e3 = BoolExpr::binary(
      K::Iff, c, BoolExpr::binary(K::And, BoolExpr::negate(a), BoolExpr::negate(b)));
  return BoolExpr::binary(K::And, BoolExpr::binary(K::And, e1, e2), e3);
}

TEST(CanonicalFormTest, LiarPuzzle) {
  const LogicMatrix m = canonical_form(liar_puzzle(), 3);
  EXPECT_EQ(m.to_string(), "00000100");
  EXPECT_EQ(apply_bool(m, kFalse).to_dense(), (IntMatrix{{0, 1, 0, 0}, {1, 0, 1, 1}}));
  EXPECT_EQ(fold_assignment(m, {kFalse, kTrue, kFalse}), kTrue);
  EXPECT_EQ(fold_assignment(m, {kTrue, kFalse, kTrue}), kFalse);
}

BoolExpr random_expr(Rng &rng, unsigned n, unsigned depth) {
  using K = BoolExpr::Kind;
  if (depth == 0 || rng() % 4 == 0) {
    if (rng() % 10 == 0)
      return BoolExpr::constant(rng() & 1);
    return BoolExpr::variable(1 + static_cast<unsigned>(rng() % n));
  }
  switch (rng() % 7) {
  case 0:
    return BoolExpr::negate(random_expr(rng, n, depth - 1));
  case 1:
    return BoolExpr::binary(K::And, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
  case 2:
    return BoolExpr::binary(K::Or, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
  case 3:
    return BoolExpr::binary(K::Xor, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
  case 4:
    return BoolExpr::binary(K::Implies, random_expr(rng, n, depth - 1),
                            random_expr(rng, n, depth - 1));
  case 5:
    return BoolExpr::binary(K::Iff, random_expr(rng, n, depth - 1), random_expr(rng, n, depth - 1));
  default: {
    const unsigned k = 1 + static_cast<unsigned>(rng() % 3);
    std::vector<BoolExpr> children;
    for (unsigned i = 0; i < k; ++i)
      children.push_back(random_expr(rng, n, depth - 1));
    return BoolExpr::lut(random_tt(rng, k), std::move(children));
  }
  }
}

TEST(CanonicalFormTest, SymbolicMatchesEnumerationProperty) {
  Rng rng(19);
  for (int t = 0; t < 300; ++t) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 5);
    const BoolExpr e = random_expr(rng, n, 4);
    const LogicMatrix sym = canonical_form(e, n);
    ASSERT_EQ(sym, canonical_form_enumerated(e, n));
    for (uint64_t m = 0; m < (uint64_t{1} << n); ++m)
      ASSERT_EQ(sym.value(m), evaluate(e, n, m));
  }
}

TEST(CanonicalFormTest, FoldingAgreesWithValues) {
  Rng rng(20);
  for (int t = 0; t < 100; ++t) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 5);
    const LogicMatrix m = random_tt(rng, n);
    const uint64_t a = rng() % m.num_columns();
    std::vector<BoolVec> values;
    for (unsigned i = 0; i < n; ++i)
      values.push_back(BoolVec{((a >> (n - 1 - i)) & 1) != 0});
    EXPECT_EQ(fold_assignment(m, values).value, m.value(a));
  }
}

TEST(CanonicalFormTest, RejectsOutOfRangeVariable) {
  EXPECT_THROW(canonical_form(BoolExpr::variable(4), 3), std::out_of_range);
}

TEST(CanonicalFormTest, IdentityCorpus) {
  const std::pair<const char *, const char *> identities[] = {
      {"a -> b", "~a | b"},
      {"~(a & b)", "~a | ~b"},
      {"~(a | b)", "~a & ~b"},
      {"a & (b | c)", "(a & b) | (a & c)"},
      {"a | (b & c)", "(a | b) & (a | c)"},
      {"a | (a & b)", "a"},
      {"a & (a | b)", "a"},
      {"a <-> b", "(a -> b) & (b -> a)"},
      {"a ^ b", "~(a <-> b)"},
      {"(a -> b) -> c", "(a & ~b) | c"},
      {"a -> (b -> c)", "(a & b) -> c"},
      {"a ^ a", "0"},
      {"a | ~a", "1"},
      {"(a ^ b) ^ c", "a ^ (b ^ c)"},
  };
  for (const auto &[lhs, rhs] : identities) {
    const auto p = parse_expressions({lhs, rhs});
    const auto n = static_cast<unsigned>(p.names.size());
    EXPECT_EQ(canonical_form(p.exprs[0], n), canonical_form(p.exprs[1], n)) << lhs << " = " << rhs;
  }
  const auto p = parse_expressions({"a & b", "a | b"});
  EXPECT_NE(canonical_form(p.exprs[0], 2), canonical_form(p.exprs[1], 2));
}

} // namespace
} // namespace stps
