// SPDX-License-Identifier: Apache-2.0
//
// Boolean expressions and their canonical logic-matrix form.

#pragma once

#include "stps/stp.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace stps {

/// Expression tree over variables x1..xn. Variables are 1-based.
struct BoolExpr {
  enum class Kind { Var, Const, Not, And, Or, Xor, Implies, Iff, Lut };

  Kind kind = Kind::Const;
  unsigned var = 0;       // Var
  bool value = false;     // Const
  LogicMatrix table;      // Lut, arity == children.size()
  std::vector<BoolExpr> children;

  static BoolExpr variable(unsigned index);
  static BoolExpr constant(bool v);
  static BoolExpr negate(BoolExpr a);
  static BoolExpr binary(Kind kind, BoolExpr a, BoolExpr b);
  static BoolExpr lut(LogicMatrix table, std::vector<BoolExpr> children);
};

/// Largest variable index used (0 for variable-free expressions).
unsigned max_variable(const BoolExpr &e);

/// Evaluates `e`; x_i is bit (n - i) of `assignment`, i.e. x1 is the most
/// significant of n bits.
bool evaluate(const BoolExpr &e, unsigned n, uint64_t assignment);

/// Canonical form M_Φ over x1..xn by symbolic STP composition: structural
/// matrices are multiplied in, variable products are reordered with swap
/// matrices and repeated variables collapsed with the power-reducing matrix.
/// Throws std::out_of_range if a variable index exceeds n.
LogicMatrix canonical_form(const BoolExpr &e, unsigned n);

/// Canonical form by enumerating all 2^n assignments.
LogicMatrix canonical_form_enumerated(const BoolExpr &e, unsigned n);

/// Folds the variable values into `m` one at a time with apply_bool, first
/// variable first, and returns the resulting Boolean vector.
BoolVec fold_assignment(const LogicMatrix &m, const std::vector<BoolVec> &values);

/// Result of parsing one or more expressions over a shared variable set.
struct ParsedExpressions {
  std::vector<BoolExpr> exprs;
  /// names[i] is the name of variable i + 1.
  std::vector<std::string> names;
};

/// Parses expressions written with `~ & ^ | -> <->` (tightest first) and
/// parentheses. Variables are single letters or `x<k>`; `0` and `1` are
/// constants. Variables are numbered in natural name order across all
/// inputs. Throws std::invalid_argument with a position on syntax errors.
ParsedExpressions parse_expressions(const std::vector<std::string_view> &texts);

} // namespace stps
