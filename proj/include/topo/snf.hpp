#pragma once

// Exact integer linear algebra: Smith normal form and finitely generated
// abelian groups.

#include "topo/bigint.hpp"
#include "topo/error.hpp"

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace topo {

class InvalidComplexError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class DimensionMismatchError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

/// Dense row-major matrix of arbitrary-precision integers.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  BigInt& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  IntMatrix transposed() const;
  bool is_zero() const;

  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> entries_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);

/// True iff a*b is the zero matrix. Skips zero entries, so it is cheap on
/// sparse boundary matrices.
bool product_is_zero(const IntMatrix& a, const IntMatrix& b);

/// Finitely generated abelian group Z^rank + Z/t1 + ... with t1 | t2 | ...
class FgAbelianGroup {
 public:
  FgAbelianGroup() = default;
  /// Accepts any list of cyclic orders; values 0 and 1 are rejected,
  /// negative orders are taken by absolute value. The list is normalized to
  /// invariant factors.
  FgAbelianGroup(std::size_t rank, std::vector<BigInt> cyclic_orders);

  static FgAbelianGroup zero() { return {}; }
  static FgAbelianGroup integers(std::size_t rank = 1) { return {rank, {}}; }
  static FgAbelianGroup cyclic(const BigInt& order);

  std::size_t rank() const noexcept { return rank_; }
  const std::vector<BigInt>& torsion() const noexcept { return torsion_; }
  bool is_trivial() const noexcept { return rank_ == 0 && torsion_.empty(); }
  bool is_finite() const noexcept { return rank_ == 0; }

  /// `0`, `Z`, `Z/5`, `Z^2 + Z/2 + Z/4`.
  std::string to_string() const;

  friend bool operator==(const FgAbelianGroup&, const FgAbelianGroup&) = default;

 private:
  std::size_t rank_ = 0;
  std::vector<BigInt> torsion_;
};

FgAbelianGroup direct_sum(const FgAbelianGroup& a, const FgAbelianGroup& b);
FgAbelianGroup tensor(const FgAbelianGroup& a, const FgAbelianGroup& b);
FgAbelianGroup tor(const FgAbelianGroup& a, const FgAbelianGroup& b);

/// Invariant factors d1 | d2 | ... | dr of `m`, all positive, r = rank(m).
/// Factors equal to 1 are kept.
std::vector<BigInt> snf(IntMatrix m);

/// Rank over the rationals (the number of invariant factors).
std::size_t rank(const IntMatrix& m);

/// H_k of a chain complex from the boundary maps around C_k.
/// `d_k` is C_k -> C_{k-1} (n_k columns), `d_k1` is C_{k+1} -> C_k (n_k rows).
FgAbelianGroup homology_from_boundaries(std::size_t n_k, const IntMatrix& d_k,
                                        const IntMatrix& d_k1);

}  // namespace topo
