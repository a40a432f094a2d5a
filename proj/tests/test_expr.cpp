// SPDX-License-Identifier: Apache-2.0

#include "stps/expr.hpp"

#include <gtest/gtest.h>

namespace stps {
namespace {

LogicMatrix form_of(const char *text) {
  const auto p = parse_expressions({text});
  return canonical_form(p.exprs[0], static_cast<unsigned>(p.names.size()));
}

TEST(ParserTest, PrecedenceAndAssociativity) {
  // ~ binds tightest, then &, ^, |, ->, <->.
  EXPECT_EQ(form_of("~a & b"), form_of("(~a) & b"));
  EXPECT_EQ(form_of("a | b & c"), form_of("a | (b & c)"));
  EXPECT_EQ(form_of("a ^ b & c"), form_of("a ^ (b & c)"));
  EXPECT_EQ(form_of("a | b ^ c"), form_of("a | (b ^ c)"));
  EXPECT_EQ(form_of("a -> b | c"), form_of("a -> (b | c)"));
  EXPECT_EQ(form_of("a -> b -> c"), form_of("a -> (b -> c)"));
  EXPECT_EQ(form_of("a <-> b -> c"), form_of("a <-> (b -> c)"));
  EXPECT_EQ(form_of("!a"), form_of("~a"));
}

TEST(ParserTest, VariablesAndConstants) {
  const auto p = parse_expressions({"x10 & x2", "b | x2 | 1"});
  EXPECT_EQ(p.names, (std::vector<std::string>{"b", "x2", "x10"}));
  EXPECT_EQ(p.exprs.size(), 2u);
  EXPECT_TRUE(form_of("a | 1").is_const1());
  EXPECT_TRUE(form_of("a & 0").is_const0());
  EXPECT_EQ(form_of("a & b").to_string(), "1000");
  EXPECT_EQ(form_of("a -> b").to_string(), "1011");
}

TEST(ParserTest, Errors) {
  for (const char *bad : {"", "a &", "(a | b", "a b", "a $ b", "ab"})
    EXPECT_THROW(parse_expressions({bad}), std::invalid_argument) << bad;
  EXPECT_EQ(parse_expressions({"x"}).names, std::vector<std::string>{"x"});
}

} // namespace
} // namespace stps
