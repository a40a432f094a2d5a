// SPDX-License-Identifier: Apache-2.0
//
// Semi-tensor product (STP) algebra over integer matrices, and the compact
// logic-matrix form used everywhere else in the library.
//
// Column-order convention: a logic matrix over variables x1..xk has 2^k
// columns. The leftmost column corresponds to the all-true assignment and the
// rightmost to the all-false assignment, i.e. a truth-table string such as
// "1110" (OR) is read right to left. Internally a LogicMatrix stores the
// function value of minterm m at bit m, where x1 is the most significant bit
// of m, so column position p maps to minterm 2^k - 1 - p.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stps {

/// Dense integer matrix. Entries in this library are always 0/1, but the
/// algebra itself is defined over integers.
class IntMatrix {
public:
  IntMatrix(std::size_t rows, std::size_t cols);
  IntMatrix(std::initializer_list<std::initializer_list<int64_t>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  int64_t &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  bool operator==(const IntMatrix &other) const = default;

  std::string to_string() const;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<int64_t> data_;
};

/// Ordinary matrix product. Throws std::invalid_argument on a dimension
/// mismatch.
IntMatrix multiply(const IntMatrix &a, const IntMatrix &b);

IntMatrix kronecker(const IntMatrix &a, const IntMatrix &b);

/// Semi-tensor product: (A ⊗ I_{t/n}) · (B ⊗ I_{t/p}) with t = lcm(n, p),
/// where n = A.cols() and p = B.rows(). Total over all dimensions.
IntMatrix stp(const IntMatrix &a, const IntMatrix &b);

/// Boolean value in vector form: True = (1,0)ᵀ, False = (0,1)ᵀ.
struct BoolVec {
  bool value = false;

  IntMatrix matrix() const;
  friend bool operator==(BoolVec, BoolVec) = default;
};

inline constexpr BoolVec kTrue{true};
inline constexpr BoolVec kFalse{false};

/// Reads a 2x1 Boolean column back. Throws if `m` is not a Boolean vector.
BoolVec to_bool_vec(const IntMatrix &m);

/// 2 x 2^k matrix whose columns are all Boolean vectors, stored as the top
/// row only.
class LogicMatrix {
public:
  static constexpr unsigned kMaxArity = 24;

  /// Constant-false function of arity 0.
  LogicMatrix() : LogicMatrix(0u) {}
  /// All-false function of the given arity.
  explicit LogicMatrix(unsigned arity);

  /// Parses a top row written leftmost = all-true column, e.g. "0111".
  static LogicMatrix from_string(std::string_view top_row);
  /// Builds from minterm-indexed bits (bit m = value at minterm m).
  static LogicMatrix from_bits(unsigned arity, uint64_t bits);
  static LogicMatrix from_words(unsigned arity, std::vector<uint64_t> words);
  static LogicMatrix constant(bool value);
  /// The identity logic matrix I_2 = "10", i.e. f(x) = x.
  static LogicMatrix identity();
  /// Projection onto variable `var` among `arity` variables.
  static LogicMatrix projection(unsigned arity, unsigned var);
  /// Converts a dense 2 x 2^k logic matrix. Throws if it is not one.
  static LogicMatrix from_dense(const IntMatrix &m);

  unsigned arity() const { return arity_; }
  uint64_t num_columns() const { return uint64_t{1} << arity_; }

  /// Function value at minterm `m` (x1 is the most significant bit).
  bool value(uint64_t m) const { return (words_[m >> 6] >> (m & 63)) & 1u; }
  void set_value(uint64_t m, bool v);
  /// Top entry of the column at position `p` (0 = leftmost).
  bool column_top(uint64_t p) const { return value(num_columns() - 1 - p); }

  std::span<const uint64_t> words() const { return words_; }
  std::span<uint64_t> words() { return words_; }
  /// Low 2^k bits for arity <= 6.
  uint64_t small_bits() const { return words_[0]; }

  bool is_const0() const;
  bool is_const1() const;
  LogicMatrix complement() const;
  /// Number of minterms evaluating to true.
  uint64_t count_ones() const;

  std::string to_string() const;
  IntMatrix to_dense() const;

  bool operator==(const LogicMatrix &other) const = default;

private:
  unsigned arity_;
  std::vector<uint64_t> words_;
};

struct LogicMatrixHash {
  std::size_t operator()(const LogicMatrix &m) const noexcept;
};

/// Number of 64-bit words needed for 2^arity bits.
inline std::size_t tt_words(unsigned arity) {
  return arity <= 6 ? 1 : std::size_t{1} << (arity - 6);
}

/// Mask of the valid bits in word 0 when arity < 6.
inline uint64_t tt_mask(unsigned arity) {
  return arity >= 6 ? ~uint64_t{0} : (uint64_t{1} << (uint64_t{1} << arity)) - 1;
}

enum class LogicOp { Not, And, Or, Xor, Implies, Iff, Nand, Nor };

/// Structural matrix of a built-in operator. Binary columns are ordered
/// ab = 11, 10, 01, 00 from left to right.
LogicMatrix structural_matrix(LogicOp op);
/// Looks an operator up by symbol ("~", "&", "|", "^", "->", "<->") or name
/// ("not", "and", ...). Throws std::invalid_argument for unknown symbols.
LogicMatrix structural_matrix(std::string_view symbol);

// ---------------------------------------------------------------------------
// Compact STP primitives. Each one equals an STP product of dense matrices;
// the dense counterparts below exist to check that.
// ---------------------------------------------------------------------------

/// L ⋉ v: fixes the first variable. True keeps the left half of the columns.
/// Throws std::invalid_argument when L has arity 0.
LogicMatrix apply_bool(const LogicMatrix &l, BoolVec v);

/// L ⋉ (I_{2^pos} ⊗ A): replaces variable `pos` of L by the function A. The
/// result has the variables of L before `pos`, then those of A, then the
/// rest of L.
LogicMatrix compose(const LogicMatrix &l, unsigned pos, const LogicMatrix &a);

/// L ⋉ (I_{2^pos} ⊗ W_[2,2]): exchanges variables `pos` and `pos + 1`.
LogicMatrix swap_vars(const LogicMatrix &l, unsigned pos);

/// L ⋉ (I_{2^pos} ⊗ M_r): identifies variables `pos` and `pos + 1`.
LogicMatrix reduce_power(const LogicMatrix &l, unsigned pos);

/// L ⋉ (I_{2^pos} ⊗ E_d): inserts an unused variable at position `pos`.
LogicMatrix insert_dummy(const LogicMatrix &l, unsigned pos);

/// Expands `l`, whose variables are `vars` (strictly increasing), onto the
/// strictly increasing superset `target`. Equivalent to one insert_dummy per
/// missing variable.
LogicMatrix expand_to(const LogicMatrix &l, std::span<const uint32_t> vars,
                      std::span<const uint32_t> target);

/// Swap matrix W_[2,2] (4x4): W ⋉ x ⋉ y = y ⋉ x.
IntMatrix swap_matrix();
/// Power-reducing matrix M_r (4x2): x ⋉ x = M_r ⋉ x.
IntMatrix power_reducing_matrix();
/// Dummy operator E_d (2x4): E_d ⋉ x ⋉ y = y.
IntMatrix dummy_matrix();

/// A logic matrix together with the ids of the variables it is applied to,
/// M ⋉ x_{vars[0]} ⋉ ... ⋉ x_{vars[k-1]}. `vars` is strictly increasing.
struct LogicTerm {
  LogicMatrix matrix;
  std::vector<uint32_t> vars;
};

/// F ⋉ (t_1 * ... * t_k) for terms t_i: every child is first expanded onto
/// the union of all child variables with dummy insertions, after which the
/// product collapses to a column-wise evaluation of F. Throws
/// std::invalid_argument if the child count differs from F's arity and
/// std::length_error if the union exceeds LogicMatrix::kMaxArity.
LogicTerm compose_terms(const LogicMatrix &f, std::span<const LogicTerm> children);

/// A logic matrix compiled into a reduced chain of 2:1 multiplexers so it
/// can be evaluated on 64 patterns per machine word.
class LogicProgram {
public:
  explicit LogicProgram(const LogicMatrix &m);

  unsigned arity() const { return arity_; }
  std::size_t num_ops() const { return ops_.size(); }

  /// out[w] = f(inputs[0][w], ..., inputs[k-1][w]) for w < n_words.
  void run(std::span<const uint64_t *const> inputs, uint64_t *out, std::size_t n_words) const;

private:
  struct Op {
    uint32_t var;
    uint32_t lo;
    uint32_t hi;
  };
  // Slot 0 is constant 0, slot 1 constant 1, slot 2 + i is op i.
  unsigned arity_;
  std::vector<Op> ops_;
  uint32_t result_ = 0;
};

} // namespace stps
