// SPDX-License-Identifier: Apache-2.0

#include "stps/expr.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

namespace stps {

BoolExpr BoolExpr::variable(unsigned index) {
  if (index == 0)
    throw std::invalid_argument("BoolExpr: variables are 1-based");
  BoolExpr e;
  e.kind = Kind::Var;
  e.var = index;
  return e;
}

BoolExpr BoolExpr::constant(bool v) {
  BoolExpr e;
  e.kind = Kind::Const;
  e.value = v;
  return e;
}

BoolExpr BoolExpr::negate(BoolExpr a) {
  BoolExpr e;
  e.kind = Kind::Not;
  e.children.push_back(std::move(a));
  return e;
}

BoolExpr BoolExpr::binary(Kind kind, BoolExpr a, BoolExpr b) {
  if (kind == Kind::Var || kind == Kind::Const || kind == Kind::Not || kind == Kind::Lut)
    throw std::invalid_argument("BoolExpr::binary: not a binary operator");
  BoolExpr e;
  e.kind = kind;
  e.children.push_back(std::move(a));
  e.children.push_back(std::move(b));
  return e;
}

BoolExpr BoolExpr::lut(LogicMatrix table, std::vector<BoolExpr> children) {
  if (table.arity() != children.size())
    throw std::invalid_argument("BoolExpr::lut: table arity does not match child count");
  BoolExpr e;
  e.kind = Kind::Lut;
  e.table = std::move(table);
  e.children = std::move(children);
  return e;
}

unsigned max_variable(const BoolExpr &e) {
  unsigned m = e.kind == BoolExpr::Kind::Var ? e.var : 0;
  for (const auto &c : e.children)
    m = std::max(m, max_variable(c));
  return m;
}

namespace {

LogicMatrix operator_matrix(const BoolExpr &e) {
  using K = BoolExpr::Kind;
  switch (e.kind) {
  case K::Not:
    return structural_matrix(LogicOp::Not);
  case K::And:
    return structural_matrix(LogicOp::And);
  case K::Or:
    return structural_matrix(LogicOp::Or);
  case K::Xor:
    return structural_matrix(LogicOp::Xor);
  case K::Implies:
    return structural_matrix(LogicOp::Implies);
  case K::Iff:
    return structural_matrix(LogicOp::Iff);
  case K::Lut:
    return e.table;
  case K::Var:
  case K::Const:
    break;
  }
  throw std::logic_error("operator_matrix: leaf expression");
}

} // namespace

bool evaluate(const BoolExpr &e, unsigned n, uint64_t assignment) {
  using K = BoolExpr::Kind;
  switch (e.kind) {
  case K::Var:
    if (e.var > n)
      throw std::out_of_range("evaluate: variable index out of range");
    return (assignment >> (n - e.var)) & 1;
  case K::Const:
    return e.value;
  default:
    break;
  }
  uint64_t m = 0;
  for (const auto &c : e.children)
    m = (m << 1) | (evaluate(c, n, assignment) ? 1 : 0);
  return operator_matrix(e).value(m);
}

namespace {

/// M ⋉ x_{vars[0]} ⋉ ... ⋉ x_{vars[k-1]}
struct Term {
  LogicMatrix matrix;
  std::vector<unsigned> vars;
};

/// Sorts vars[0, len) ascending with swap matrices and collapses repeats with
/// the power-reducing matrix. Returns the new length of the prefix.
std::size_t normalize_prefix(Term &t, std::size_t len) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < len; ++i) {
      if (t.vars[i] == t.vars[i + 1]) {
        t.matrix = reduce_power(t.matrix, static_cast<unsigned>(i));
        t.vars.erase(t.vars.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        --len;
        changed = true;
        break;
      }
      if (t.vars[i] > t.vars[i + 1]) {
        t.matrix = swap_vars(t.matrix, static_cast<unsigned>(i));
        std::swap(t.vars[i], t.vars[i + 1]);
        changed = true;
      }
    }
  }
  return len;
}

Term build_term(const BoolExpr &e) {
  using K = BoolExpr::Kind;
  if (e.kind == K::Var)
    return {LogicMatrix::identity(), {e.var}};
  if (e.kind == K::Const)
    return {LogicMatrix::constant(e.value), {}};

  // Placeholders follow the resolved prefix; each child's term replaces the
  // first one via compose at that position.
  Term t{operator_matrix(e), std::vector<unsigned>(e.children.size(), 0)};
  std::size_t resolved = 0;
  for (const auto &child : e.children) {
    Term c = build_term(child);
    t.matrix = compose(t.matrix, static_cast<unsigned>(resolved), c.matrix);
    t.vars.erase(t.vars.begin() + static_cast<std::ptrdiff_t>(resolved));
    t.vars.insert(t.vars.begin() + static_cast<std::ptrdiff_t>(resolved), c.vars.begin(),
                  c.vars.end());
    resolved = normalize_prefix(t, resolved + c.vars.size());
  }
  return t;
}

} // namespace

LogicMatrix canonical_form(const BoolExpr &e, unsigned n) {
  if (max_variable(e) > n)
    throw std::out_of_range("canonical_form: variable index exceeds variable count");
  Term t = build_term(e);
  for (unsigned v = 1; v <= n; ++v) {
    const unsigned pos = v - 1;
    if (pos >= t.vars.size() || t.vars[pos] != v) {
      t.matrix = insert_dummy(t.matrix, pos);
      t.vars.insert(t.vars.begin() + pos, v);
    }
  }
  return t.matrix;
}

LogicMatrix canonical_form_enumerated(const BoolExpr &e, unsigned n) {
  if (max_variable(e) > n)
    throw std::out_of_range("canonical_form_enumerated: variable index exceeds variable count");
  LogicMatrix m(n);
  for (uint64_t a = 0; a < m.num_columns(); ++a)
    if (evaluate(e, n, a))
      m.set_value(a, true);
  return m;
}

BoolVec fold_assignment(const LogicMatrix &m, const std::vector<BoolVec> &values) {
  if (values.size() != m.arity())
    throw std::invalid_argument("fold_assignment: value count does not match arity");
  LogicMatrix cur = m;
  for (BoolVec v : values)
    cur = apply_bool(cur, v);
  return BoolVec{cur.value(0)};
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct RawExpr {
  BoolExpr::Kind kind;
  std::string name;
  bool value = false;
  std::vector<RawExpr> children;
};

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  RawExpr parse() {
    RawExpr e = parse_iff();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw std::invalid_argument("expression parse error at column " + std::to_string(pos_ + 1) +
                                ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  static RawExpr node(BoolExpr::Kind k, RawExpr a, RawExpr b) {
    RawExpr e{k, {}, false, {}};
    e.children.push_back(std::move(a));
    e.children.push_back(std::move(b));
    return e;
  }

  RawExpr parse_iff() {
    RawExpr lhs = parse_implies();
    while (accept("<->"))
      lhs = node(BoolExpr::Kind::Iff, std::move(lhs), parse_implies());
    return lhs;
  }

  // right associative
  RawExpr parse_implies() {
    RawExpr lhs = parse_or();
    if (accept("->"))
      return node(BoolExpr::Kind::Implies, std::move(lhs), parse_implies());
    return lhs;
  }

  RawExpr parse_or() {
    RawExpr lhs = parse_xor();
    while (accept("|"))
      lhs = node(BoolExpr::Kind::Or, std::move(lhs), parse_xor());
    return lhs;
  }

  RawExpr parse_xor() {
    RawExpr lhs = parse_and();
    while (accept("^"))
      lhs = node(BoolExpr::Kind::Xor, std::move(lhs), parse_and());
    return lhs;
  }

  RawExpr parse_and() {
    RawExpr lhs = parse_unary();
    while (accept("&"))
      lhs = node(BoolExpr::Kind::And, std::move(lhs), parse_unary());
    return lhs;
  }

  RawExpr parse_unary() {
    if (accept("~") || accept("!")) {
      RawExpr e{BoolExpr::Kind::Not, {}, false, {}};
      e.children.push_back(parse_unary());
      return e;
    }
    return parse_atom();
  }

  RawExpr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size())
      fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RawExpr e = parse_iff();
      if (!accept(")"))
        fail("expected ')'");
      return e;
    }
    if (c == '0' || c == '1') {
      ++pos_;
      return RawExpr{BoolExpr::Kind::Const, {}, c == '1', {}};
    }
    if (c == 'x' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      std::size_t end = pos_ + 1;
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])))
        ++end;
      RawExpr e{BoolExpr::Kind::Var, std::string(text_.substr(pos_, end - pos_)), false, {}};
      pos_ = end;
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (pos_ + 1 < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))
        fail("variables are single letters or x<k>");
      ++pos_;
      return RawExpr{BoolExpr::Kind::Var, std::string(1, c), false, {}};
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect_names(const RawExpr &e, std::vector<std::string> &out) {
  if (e.kind == BoolExpr::Kind::Var)
    out.push_back(e.name);
  for (const auto &c : e.children)
    collect_names(c, out);
}

/// Single letters first (alphabetical), then x<k> by k.
bool name_less(const std::string &a, const std::string &b) {
  const bool ax = a.size() > 1;
  const bool bx = b.size() > 1;
  if (ax != bx)
    return !ax;
  if (!ax)
    return a < b;
  return std::stoull(a.substr(1)) < std::stoull(b.substr(1));
}

BoolExpr lower(const RawExpr &e, const std::map<std::string, unsigned> &index) {
  using K = BoolExpr::Kind;
  switch (e.kind) {
  case K::Var:
    return BoolExpr::variable(index.at(e.name));
  case K::Const:
    return BoolExpr::constant(e.value);
  case K::Not:
    return BoolExpr::negate(lower(e.children[0], index));
  default:
    return BoolExpr::binary(e.kind, lower(e.children[0], index), lower(e.children[1], index));
  }
}

} // namespace

ParsedExpressions parse_expressions(const std::vector<std::string_view> &texts) {
  std::vector<RawExpr> raw;
  std::vector<std::string> names;
  for (auto t : texts) {
    raw.push_back(Parser(t).parse());
    collect_names(raw.back(), names);
  }
  std::sort(names.begin(), names.end(), name_less);
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::map<std::string, unsigned> index;
  for (unsigned i = 0; i < names.size(); ++i)
    index[names[i]] = i + 1;

  ParsedExpressions out;
  out.names = names;
  for (const auto &r : raw)
    out.exprs.push_back(lower(r, index));
  return out;
}

} // namespace stps
