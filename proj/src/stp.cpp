// SPDX-License-Identifier: Apache-2.0

#include "stps/stp.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace stps {

// ---------------------------------------------------------------------------
// IntMatrix
// ---------------------------------------------------------------------------

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("IntMatrix: dimensions must be positive");
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<int64_t>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0)
    throw std::invalid_argument("IntMatrix: dimensions must be positive");
  data_.reserve(rows_ * cols_);
  for (const auto &row : rows) {
    if (row.size() != cols_)
      throw std::invalid_argument("IntMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    m(i, i) = 1;
  return m;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t r = 0; r < rows_; ++r) {
    os << (r ? "; " : "");
    for (std::size_t c = 0; c < cols_; ++c)
      os << (c ? " " : "") << (*this)(r, c);
  }
  os << ']';
  return os.str();
}

namespace {

#ifndef NDEBUG
bool is_binary(const IntMatrix &m) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m(r, c) != 0 && m(r, c) != 1)
        return false;
  return true;
}
#endif

} // namespace

IntMatrix multiply(const IntMatrix &a, const IntMatrix &b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("multiply: inner dimensions differ");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const int64_t aik = a(i, k);
      if (aik == 0)
        continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        out(i, j) += aik * b(k, j);
    }
  return out;
}

IntMatrix kronecker(const IntMatrix &a, const IntMatrix &b) {
  IntMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const int64_t aij = a(i, j);
      if (aij == 0)
        continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

IntMatrix stp(const IntMatrix &a, const IntMatrix &b) {
  const std::size_t t = std::lcm(a.cols(), b.rows());
  IntMatrix left = t == a.cols() ? a : kronecker(a, IntMatrix::identity(t / a.cols()));
  IntMatrix right = t == b.rows() ? b : kronecker(b, IntMatrix::identity(t / b.rows()));
  IntMatrix out = multiply(left, right);
  assert(is_binary(out) || !is_binary(a) || !is_binary(b));
  return out;
}

IntMatrix BoolVec::matrix() const {
  IntMatrix m(2, 1);
  m(value ? 0 : 1, 0) = 1;
  return m;
}

BoolVec to_bool_vec(const IntMatrix &m) {
  if (m.rows() != 2 || m.cols() != 1)
    throw std::invalid_argument("to_bool_vec: expected a 2x1 matrix");
  if (m(0, 0) == 1 && m(1, 0) == 0)
    return kTrue;
  if (m(0, 0) == 0 && m(1, 0) == 1)
    return kFalse;
  throw std::invalid_argument("to_bool_vec: not a Boolean vector");
}

// ---------------------------------------------------------------------------
// LogicMatrix
// ---------------------------------------------------------------------------

LogicMatrix::LogicMatrix(unsigned arity) : arity_(arity) {
  if (arity > kMaxArity)
    throw std::length_error("LogicMatrix: arity " + std::to_string(arity) +
                            " exceeds the cap of " + std::to_string(kMaxArity));
  words_.assign(tt_words(arity), 0);
}

LogicMatrix LogicMatrix::from_string(std::string_view top_row) {
  const std::size_t n = top_row.size();
  if (n == 0 || !std::has_single_bit(n))
    throw std::invalid_argument("LogicMatrix: row length must be a power of two");
  LogicMatrix m(static_cast<unsigned>(std::countr_zero(n)));
  for (std::size_t p = 0; p < n; ++p) {
    const char c = top_row[p];
    if (c != '0' && c != '1')
      throw std::invalid_argument("LogicMatrix: row must contain only 0 and 1");
    m.set_value(n - 1 - p, c == '1');
  }
  return m;
}

LogicMatrix LogicMatrix::from_bits(unsigned arity, uint64_t bits) {
  if (arity > 6)
    throw std::invalid_argument("LogicMatrix::from_bits: arity must be <= 6");
  LogicMatrix m(arity);
  m.words_[0] = bits & tt_mask(arity);
  return m;
}

LogicMatrix LogicMatrix::from_words(unsigned arity, std::vector<uint64_t> words) {
  LogicMatrix m(arity);
  if (words.size() != m.words_.size())
    throw std::invalid_argument("LogicMatrix::from_words: word count mismatch");
  m.words_ = std::move(words);
  m.words_[0] &= tt_mask(arity);
  return m;
}

LogicMatrix LogicMatrix::constant(bool value) { return from_bits(0, value ? 1 : 0); }

LogicMatrix LogicMatrix::identity() { return from_bits(1, 0b10); }

LogicMatrix LogicMatrix::projection(unsigned arity, unsigned var) {
  if (var >= arity)
    throw std::invalid_argument("LogicMatrix::projection: variable out of range");
  LogicMatrix m(arity);
  const unsigned bit = arity - 1 - var;
  if (bit >= 6) {
    const std::size_t block = std::size_t{1} << (bit - 6);
    for (std::size_t w = 0; w < m.words_.size(); ++w)
      m.words_[w] = (w / block) & 1 ? ~uint64_t{0} : 0;
  } else {
    static constexpr uint64_t kProj[6] = {0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull,
                                          0xF0F0F0F0F0F0F0F0ull, 0xFF00FF00FF00FF00ull,
                                          0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    for (auto &w : m.words_)
      w = kProj[bit];
    m.words_[0] &= tt_mask(arity);
  }
  return m;
}

LogicMatrix LogicMatrix::from_dense(const IntMatrix &d) {
  if (d.rows() != 2 || !std::has_single_bit(d.cols()))
    throw std::invalid_argument("LogicMatrix::from_dense: expected a 2 x 2^k matrix");
  LogicMatrix m(static_cast<unsigned>(std::countr_zero(d.cols())));
  for (std::size_t p = 0; p < d.cols(); ++p) {
    IntMatrix col(2, 1);
    col(0, 0) = d(0, p);
    col(1, 0) = d(1, p);
    m.set_value(d.cols() - 1 - p, to_bool_vec(col).value);
  }
  return m;
}

void LogicMatrix::set_value(uint64_t m, bool v) {
  const uint64_t mask = uint64_t{1} << (m & 63);
  if (v)
    words_[m >> 6] |= mask;
  else
    words_[m >> 6] &= ~mask;
}

bool LogicMatrix::is_const0() const {
  return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == 0; });
}

bool LogicMatrix::is_const1() const {
  if (arity_ < 6)
    return words_[0] == tt_mask(arity_);
  return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == ~uint64_t{0}; });
}

LogicMatrix LogicMatrix::complement() const {
  LogicMatrix out(*this);
  for (auto &w : out.words_)
    w = ~w;
  if (arity_ < 6)
    out.words_[0] &= tt_mask(arity_);
  return out;
}

uint64_t LogicMatrix::count_ones() const {
  uint64_t n = 0;
  for (uint64_t w : words_)
    n += static_cast<uint64_t>(std::popcount(w));
  return n;
}

std::string LogicMatrix::to_string() const {
  std::string s(num_columns(), '0');
  for (uint64_t p = 0; p < num_columns(); ++p)
    if (column_top(p))
      s[p] = '1';
  return s;
}

IntMatrix LogicMatrix::to_dense() const {
  IntMatrix d(2, num_columns());
  for (uint64_t p = 0; p < num_columns(); ++p)
    d(column_top(p) ? 0 : 1, p) = 1;
  return d;
}

std::size_t LogicMatrixHash::operator()(const LogicMatrix &m) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull ^ m.arity();
  for (uint64_t w : m.words())
    h = (h ^ w) * 0x100000001b3ull + (h >> 29);
  return h;
}

LogicMatrix structural_matrix(LogicOp op) {
  switch (op) {
  case LogicOp::Not:
    return LogicMatrix::from_bits(1, 0b01);
  case LogicOp::And:
    return LogicMatrix::from_bits(2, 0b1000);
  case LogicOp::Or:
    return LogicMatrix::from_bits(2, 0b1110);
  case LogicOp::Xor:
    return LogicMatrix::from_bits(2, 0b0110);
  case LogicOp::Implies:
    return LogicMatrix::from_bits(2, 0b1011);
  case LogicOp::Iff:
    return LogicMatrix::from_bits(2, 0b1001);
  case LogicOp::Nand:
    return LogicMatrix::from_bits(2, 0b0111);
  case LogicOp::Nor:
    return LogicMatrix::from_bits(2, 0b0001);
  }
  throw std::invalid_argument("structural_matrix: unknown operator");
}

LogicMatrix structural_matrix(std::string_view symbol) {
  if (symbol == "~" || symbol == "not")
    return structural_matrix(LogicOp::Not);
  if (symbol == "&" || symbol == "and")
    return structural_matrix(LogicOp::And);
  if (symbol == "|" || symbol == "or")
    return structural_matrix(LogicOp::Or);
  if (symbol == "^" || symbol == "xor")
    return structural_matrix(LogicOp::Xor);
  if (symbol == "->" || symbol == "implies")
    return structural_matrix(LogicOp::Implies);
  if (symbol == "<->" || symbol == "iff")
    return structural_matrix(LogicOp::Iff);
  if (symbol == "nand")
    return structural_matrix(LogicOp::Nand);
  if (symbol == "nor")
    return structural_matrix(LogicOp::Nor);
  throw std::invalid_argument("structural_matrix: unknown operator '" + std::string(symbol) + "'");
}

// ---------------------------------------------------------------------------
// Compact primitives
// ---------------------------------------------------------------------------

LogicMatrix apply_bool(const LogicMatrix &l, BoolVec v) {
  if (l.arity() == 0)
    throw std::invalid_argument("apply_bool: logic matrix has arity 0");
  const unsigned k = l.arity() - 1;
  LogicMatrix out(k);
  const uint64_t half = uint64_t{1} << k;
  const uint64_t base = v.value ? half : 0;
  if (k >= 6) {
    auto src = l.words().subspan(base >> 6, half >> 6);
    std::copy(src.begin(), src.end(), out.words().begin());
  } else {
    out.words()[0] = (l.words()[0] >> base) & tt_mask(k);
  }
  return out;
}

LogicMatrix compose(const LogicMatrix &l, unsigned pos, const LogicMatrix &a) {
  const unsigned k = l.arity();
  if (pos >= k)
    throw std::invalid_argument("compose: position out of range");
  const unsigned ma = a.arity();
  const unsigned after = k - pos - 1;
  LogicMatrix out(k - 1 + ma);
  const uint64_t after_mask = (uint64_t{1} << after) - 1;
  const uint64_t mid_mask = (uint64_t{1} << ma) - 1;
  for (uint64_t m = 0; m < out.num_columns(); ++m) {
    const uint64_t low = m & after_mask;
    const uint64_t mid = (m >> after) & mid_mask;
    const uint64_t high = m >> (after + ma);
    const uint64_t idx = (high << (after + 1)) | (uint64_t{a.value(mid)} << after) | low;
    if (l.value(idx))
      out.set_value(m, true);
  }
  return out;
}

LogicMatrix swap_vars(const LogicMatrix &l, unsigned pos) {
  const unsigned k = l.arity();
  if (pos + 1 >= k)
    throw std::invalid_argument("swap_vars: position out of range");
  // variable `pos` is minterm bit hi, `pos + 1` is bit hi - 1
  const unsigned hi = k - 1 - pos;
  const uint64_t bh = uint64_t{1} << hi;
  const uint64_t bl = bh >> 1;
  LogicMatrix out(k);
  for (uint64_t m = 0; m < out.num_columns(); ++m) {
    uint64_t src = m & ~(bh | bl);
    if (m & bh)
      src |= bl;
    if (m & bl)
      src |= bh;
    if (l.value(src))
      out.set_value(m, true);
  }
  return out;
}

LogicMatrix reduce_power(const LogicMatrix &l, unsigned pos) {
  const unsigned k = l.arity();
  if (pos + 1 >= k)
    throw std::invalid_argument("reduce_power: position out of range");
  const unsigned below = k - 2 - pos; // variables after the merged pair
  LogicMatrix out(k - 1);
  const uint64_t low_mask = (uint64_t{1} << below) - 1;
  for (uint64_t m = 0; m < out.num_columns(); ++m) {
    const uint64_t low = m & low_mask;
    const uint64_t x = (m >> below) & 1;
    const uint64_t high = m >> (below + 1);
    const uint64_t src = (high << (below + 2)) | (x << (below + 1)) | (x << below) | low;
    if (l.value(src))
      out.set_value(m, true);
  }
  return out;
}

namespace {

/// Doubles every block of 2^b bits of a 32-bit value into 64 bits.
uint64_t spread(uint32_t h, unsigned b) {
  static constexpr uint64_t kMasks[] = {0x5555555555555555ull, 0x3333333333333333ull,
                                        0x0F0F0F0F0F0F0F0Full, 0x00FF00FF00FF00FFull,
                                        0x0000FFFF0000FFFFull};
  uint64_t x = h;
  // Move block j to position 2j, halving the stride each round.
  for (unsigned t = 5; t-- > b;)
    x = (x | (x << (1u << t))) & kMasks[t];
  return x | (x << (1u << b));
}

} // namespace

LogicMatrix insert_dummy(const LogicMatrix &l, unsigned pos) {
  const unsigned k = l.arity();
  if (pos > k)
    throw std::invalid_argument("insert_dummy: position out of range");
  LogicMatrix out(k + 1);
  const unsigned b = k - pos; // minterm bit of the new variable
  auto src = l.words();
  auto dst = out.words();
  if (b >= 6) {
    const std::size_t block = std::size_t{1} << (b - 6);
    const std::size_t blocks = src.size() / block;
    for (std::size_t i = 0; i < blocks; ++i) {
      std::copy_n(src.begin() + i * block, block, dst.begin() + 2 * i * block);
      std::copy_n(src.begin() + i * block, block, dst.begin() + (2 * i + 1) * block);
    }
  } else if (k < 6) {
    dst[0] = spread(static_cast<uint32_t>(src[0]), b) & tt_mask(k + 1);
  } else {
    for (std::size_t w = 0; w < src.size(); ++w) {
      dst[2 * w] = spread(static_cast<uint32_t>(src[w]), b);
      dst[2 * w + 1] = spread(static_cast<uint32_t>(src[w] >> 32), b);
    }
  }
  return out;
}

LogicMatrix expand_to(const LogicMatrix &l, std::span<const uint32_t> vars,
                      std::span<const uint32_t> target) {
  if (vars.size() != l.arity())
    throw std::invalid_argument("expand_to: variable list does not match arity");
  LogicMatrix cur = l;
  std::size_t j = 0;
  for (unsigned i = 0; i < target.size(); ++i) {
    if (j < vars.size() && vars[j] == target[i]) {
      ++j;
      continue;
    }
    if (j < vars.size() && vars[j] < target[i])
      throw std::invalid_argument("expand_to: variables are not a subset of the target");
    cur = insert_dummy(cur, i);
  }
  if (j != vars.size())
    throw std::invalid_argument("expand_to: variables are not a subset of the target");
  return cur;
}

IntMatrix swap_matrix() {
  return IntMatrix{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
}

IntMatrix power_reducing_matrix() { return IntMatrix{{1, 0}, {0, 0}, {0, 0}, {0, 1}}; }

IntMatrix dummy_matrix() { return IntMatrix{{1, 0, 1, 0}, {0, 1, 0, 1}}; }

LogicTerm compose_terms(const LogicMatrix &f, std::span<const LogicTerm> children) {
  if (children.size() != f.arity())
    throw std::invalid_argument("compose_terms: child count does not match arity");
  std::vector<uint32_t> vars;
  for (const auto &c : children)
    vars.insert(vars.end(), c.vars.begin(), c.vars.end());
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  if (vars.size() > LogicMatrix::kMaxArity)
    throw std::length_error("compose_terms: too many variables");
  const unsigned n = static_cast<unsigned>(vars.size());

  if (n <= 6) {
    // One word: evaluate the columns directly.
    std::vector<unsigned> shift;
    for (const auto &c : children)
      for (uint32_t v : c.vars)
        shift.push_back(static_cast<unsigned>(
            n - 1 - (std::lower_bound(vars.begin(), vars.end(), v) - vars.begin())));
    uint64_t word = 0;
    for (uint64_t col = 0; col < (uint64_t{1} << n); ++col) {
      uint64_t fm = 0;
      std::size_t s = 0;
      for (const auto &c : children) {
        uint64_t cm = 0;
        for (std::size_t i = 0; i < c.vars.size(); ++i)
          cm = (cm << 1) | ((col >> shift[s++]) & 1);
        fm = (fm << 1) | (c.matrix.value(cm) ? 1 : 0);
      }
      word |= uint64_t{f.value(fm)} << col;
    }
    return LogicTerm{LogicMatrix::from_bits(n, word), std::move(vars)};
  }

  std::vector<LogicMatrix> expanded;
  expanded.reserve(children.size());
  std::vector<const uint64_t *> inputs;
  for (const auto &c : children) {
    expanded.push_back(expand_to(c.matrix, c.vars, vars));
    inputs.push_back(expanded.back().words().data());
  }
  std::vector<uint64_t> words(tt_words(n));
  LogicProgram(f).run(inputs, words.data(), words.size());
  return LogicTerm{LogicMatrix::from_words(n, std::move(words)), std::move(vars)};
}

LogicProgram::LogicProgram(const LogicMatrix &m) : arity_(m.arity()) {
  std::vector<uint32_t> level(m.num_columns());
  for (uint64_t i = 0; i < level.size(); ++i)
    level[i] = m.value(i) ? 1 : 0;
  std::vector<uint32_t> next;
  std::unordered_map<uint64_t, uint32_t> unique;
  ops_.reserve(std::min<std::size_t>(level.size(), 64));
  // The least significant minterm bit is the last variable; fold it first.
  // Equal (lo, hi) pairs can only meet within one level, so sharing is
  // looked up per level: linearly while the level is small.
  for (unsigned var = arity_; var-- > 0;) {
    next.resize(level.size() / 2);
    const std::size_t first_op = ops_.size();
    const bool small = next.size() <= 32;
    unique.clear();
    for (std::size_t i = 0; i < next.size(); ++i) {
      const uint32_t lo = level[2 * i];
      const uint32_t hi = level[2 * i + 1];
      if (lo == hi) {
        next[i] = lo;
        continue;
      }
      uint32_t slot = 0;
      if (small) {
        for (std::size_t j = first_op; j < ops_.size() && !slot; ++j)
          if (ops_[j].lo == lo && ops_[j].hi == hi)
            slot = static_cast<uint32_t>(j + 2);
      } else {
        const uint64_t key = (uint64_t{lo} << 32) | hi;
        if (auto it = unique.find(key); it != unique.end())
          slot = it->second;
        else
          unique.emplace(key, static_cast<uint32_t>(ops_.size() + 2));
      }
      if (!slot) {
        slot = static_cast<uint32_t>(ops_.size() + 2);
        ops_.push_back(Op{var, lo, hi});
      }
      next[i] = slot;
    }
    std::swap(level, next);
  }
  result_ = level[0];
}

void LogicProgram::run(std::span<const uint64_t *const> inputs, uint64_t *out,
                       std::size_t n_words) const {
  if (inputs.size() != arity_)
    throw std::invalid_argument("LogicProgram::run: input count does not match arity");
  if (ops_.empty()) {
    std::fill(out, out + n_words, result_ ? ~uint64_t{0} : 0);
    return;
  }
  constexpr std::size_t kBlock = 16;
  thread_local std::vector<uint64_t> buf;
  buf.resize((ops_.size() + 2) * kBlock);
  std::fill(buf.begin(), buf.begin() + kBlock, 0);
  std::fill(buf.begin() + kBlock, buf.begin() + 2 * kBlock, ~uint64_t{0});
  for (std::size_t w0 = 0; w0 < n_words; w0 += kBlock) {
    const std::size_t nb = std::min(kBlock, n_words - w0);
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const Op op = ops_[i];
      uint64_t *dst = buf.data() + (i + 2) * kBlock;
      const uint64_t *lo = buf.data() + op.lo * kBlock;
      const uint64_t *hi = buf.data() + op.hi * kBlock;
      const uint64_t *x = inputs[op.var] + w0;
      for (std::size_t t = 0; t < nb; ++t)
        dst[t] = (x[t] & hi[t]) | (~x[t] & lo[t]);
    }
    std::copy_n(buf.data() + result_ * kBlock, nb, out + w0);
  }
}

} // namespace stps
