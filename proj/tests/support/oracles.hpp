#pragma once

// Independent reference computations used to check the library. Nothing
// here calls into the code under test.

#include "topo/bigint.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using topo::BigInt;
using Matrix = std::vector<std::vector<BigInt>>;

inline BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

inline BigInt gcd_big(BigInt a, BigInt b) {
  a = abs_big(a);
  b = abs_big(b);
  while (b != 0) {
    BigInt r = a % b;
    a = b;
    b = r;
  }
  return a;
}

/// Bareiss fraction-free determinant of a square matrix.
inline BigInt determinant(Matrix m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  BigInt sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// Rank over the rationals by fraction-free Gaussian elimination.
inline std::size_t rank(Matrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[r], m[p]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      const BigInt a = m[r][c], b = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] = m[i][j] * a - m[r][j] * b;
      BigInt g = 0;
      for (std::size_t j = c; j < cols; ++j) g = gcd_big(g, m[i][j]);
      if (g > 1)
        for (std::size_t j = c; j < cols; ++j) m[i][j] /= g;
    }
    ++r;
  }
  return r;
}

inline void combinations(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  for (;;) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Invariant factors from determinantal divisors: d_k = gcd of all k x k
/// minors, s_k = d_k / d_{k-1}. Exponential; small matrices only.
inline std::vector<BigInt> invariant_factors(const Matrix& m) {
  std::vector<BigInt> out;
  if (m.empty() || m[0].empty()) return out;
  const std::size_t rows = m.size(), cols = m[0].size();
  BigInt prev = 1;
  for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    combinations(rows, k, rs);
    combinations(cols, k, cs);
    BigInt g = 0;
    for (const auto& r : rs)
      for (const auto& c : cs) {
        Matrix minor(k, std::vector<BigInt>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) minor[i][j] = m[r[i]][c[j]];
        g = gcd_big(g, determinant(minor));
      }
    if (g == 0) break;
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int lo,
                            int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  Matrix m(rows, std::vector<BigInt>(cols));
  for (auto& row : m)
    for (auto& v : row) v = d(rng);
  return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
  Matrix out(n, std::vector<BigInt>(p));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (a[i][j] != 0)
        for (std::size_t c = 0; c < p; ++c) out[i][c] += a[i][j] * b[j][c];
  return out;
}

/// A random product of elementary integer operations applied to I_n.
inline Matrix random_unimodular(std::mt19937_64& rng, std::size_t n, int steps) {
  Matrix u(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  if (n == 0) return u;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_int_distribution<int> coef(-3, 3), kind(0, 2);
  for (int s = 0; s < steps; ++s) {
    const std::size_t a = pick(rng), b = pick(rng);
    switch (kind(rng)) {
      case 0: {
        const int k = coef(rng);
        if (a != b)
          for (std::size_t j = 0; j < n; ++j) u[a][j] += k * u[b][j];
        break;
      }
      case 1:
        std::swap(u[a], u[b]);
        break;
      default:
        for (std::size_t j = 0; j < n; ++j) u[a][j] = -u[a][j];
        break;
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// Finite abelian groups by element enumeration.

/// Group Z/o1 x Z/o2 x ... given by its cyclic orders (all >= 2).
struct FiniteGroup {
  std::vector<std::int64_t> orders;

  std::int64_t size() const {
    std::int64_t s = 1;
    for (auto o : orders) s *= o;
    return s;
  }
};

/// Counts elements x with k*x = 0, for every k; two finite abelian groups
/// are isomorphic iff these counts agree for all k dividing the exponent.
inline std::vector<std::int64_t> torsion_profile(const std::vector<std::int64_t>& orders,
                                                 std::int64_t max_k) {
  std::vector<std::int64_t> counts;
  for (std::int64_t k = 1; k <= max_k; ++k) {
    std::int64_t c = 1;
    for (auto o : orders) c *= std::gcd(k, o);
    counts.push_back(c);
  }
  return counts;
}

/// Hom(Z/a, Z/b) and Tor(Z/a, Z/b) both have gcd(a,b) elements; the
/// element count of Tor(A,B) for finite A, B is the product over pairs.
inline std::int64_t tor_size(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::int64_t s = 1;
  for (auto x : a)
    for (auto y : b) s *= std::gcd(x, y);
  return s;
}

}  // namespace oracle
