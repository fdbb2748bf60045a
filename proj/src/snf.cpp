#include "topo/snf.hpp"

#include <boost/integer/common_factor.hpp>

#include <algorithm>
#include <utility>

namespace topo {

namespace mp = boost::multiprecision;

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long long>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatchError("ragged matrix literal");
    for (long long v : r) entries_.emplace_back(v);
  }
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool IntMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const BigInt& v) { return v.is_zero(); });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatchError("cannot multiply " + std::to_string(a.rows()) + "x" +
                                 std::to_string(a.cols()) + " by " +
                                 std::to_string(b.rows()) + "x" +
                                 std::to_string(b.cols()));
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const BigInt& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        if (!b(k, j).is_zero()) out(i, j) += aik * b(k, j);
    }
  return out;
}

bool product_is_zero(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatchError("product shape mismatch");
  std::vector<BigInt> column(a.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    std::fill(column.begin(), column.end(), BigInt(0));
    for (std::size_t k = 0; k < b.rows(); ++k) {
      const BigInt& bkj = b(k, j);
      if (bkj.is_zero()) continue;
      for (std::size_t i = 0; i < a.rows(); ++i)
        if (!a(i, k).is_zero()) column[i] += a(i, k) * bkj;
    }
    for (const auto& v : column)
      if (!v.is_zero()) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

bool is_unit(const BigInt& v) { return v == 1 || v == -1; }

class SmithReducer {
 public:
  explicit SmithReducer(IntMatrix m) : m_(std::move(m)) {}

  std::vector<BigInt> run() {
    std::vector<BigInt> factors;
    const std::size_t limit = std::min(m_.rows(), m_.cols());
    for (std::size_t t = 0; t < limit; ++t) {
      if (!reduce_at(t)) break;
      factors.push_back(mp::abs(m_(t, t)));
    }
    return factors;
  }

 private:
  // Smallest nonzero absolute value in the submatrix starting at (t, t).
  bool find_pivot(std::size_t t, std::size_t& pr, std::size_t& pc) const {
    bool found = false;
    BigInt best;
    for (std::size_t r = t; r < m_.rows(); ++r)
      for (std::size_t c = t; c < m_.cols(); ++c) {
        const BigInt& v = m_(r, c);
        if (v.is_zero()) continue;
        if (is_unit(v)) {
          pr = r;
          pc = c;
          return true;
        }
        if (!found || mp::abs(v) < best) {
          best = mp::abs(v);
          pr = r;
          pc = c;
          found = true;
        }
      }
    return found;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < m_.cols(); ++c) std::swap(m_(a, c), m_(b, c));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < m_.rows(); ++r) std::swap(m_(r, a), m_(r, b));
  }

  // row[dst] -= q * row[src], touching only columns >= t.
  void sub_row(std::size_t dst, std::size_t src, const BigInt& q,
               const std::vector<std::size_t>& src_support) {
    for (std::size_t c : src_support) m_(dst, c) -= q * m_(src, c);
  }
  void sub_col(std::size_t dst, std::size_t src, const BigInt& q,
               const std::vector<std::size_t>& src_support) {
    for (std::size_t r : src_support) m_(r, dst) -= q * m_(r, src);
  }

  // Clears row and column t and makes m(t,t) divide the rest of the
  // submatrix. Returns false if the submatrix is zero.
  bool reduce_at(std::size_t t) {
    std::vector<std::size_t> support;
    for (;;) {
      std::size_t pr = t, pc = t;
      if (!find_pivot(t, pr, pc)) return false;
      swap_rows(t, pr);
      swap_cols(t, pc);
      const BigInt pivot = m_(t, t);

      bool clean = true;
      support.clear();
      for (std::size_t c = t; c < m_.cols(); ++c)
        if (!m_(t, c).is_zero()) support.push_back(c);
      for (std::size_t r = t + 1; r < m_.rows(); ++r) {
        if (m_(r, t).is_zero()) continue;
        BigInt q = m_(r, t) / pivot;
        if (!q.is_zero()) sub_row(r, t, q, support);
        if (!m_(r, t).is_zero()) clean = false;
      }
      support.clear();
      for (std::size_t r = t; r < m_.rows(); ++r)
        if (!m_(r, t).is_zero()) support.push_back(r);
      for (std::size_t c = t + 1; c < m_.cols(); ++c) {
        if (m_(t, c).is_zero()) continue;
        BigInt q = m_(t, c) / pivot;
        if (!q.is_zero()) sub_col(c, t, q, support);
        if (!m_(t, c).is_zero()) clean = false;
      }
      if (!clean) continue;

      if (is_unit(pivot)) return true;
      bool divides_rest = true;
      for (std::size_t r = t + 1; r < m_.rows() && divides_rest; ++r)
        for (std::size_t c = t + 1; c < m_.cols(); ++c) {
          if (m_(r, c).is_zero() || BigInt(m_(r, c) % pivot).is_zero()) continue;
          for (std::size_t k = t; k < m_.cols(); ++k) m_(t, k) += m_(r, k);
          divides_rest = false;
          break;
        }
      if (divides_rest) return true;
    }
  }

  IntMatrix m_;
};

}  // namespace

std::vector<BigInt> snf(IntMatrix m) { return SmithReducer(std::move(m)).run(); }

std::size_t rank(const IntMatrix& m) { return snf(m).size(); }

FgAbelianGroup homology_from_boundaries(std::size_t n_k, const IntMatrix& d_k,
                                        const IntMatrix& d_k1) {
  if (d_k.cols() != n_k)
    throw DimensionMismatchError("outgoing boundary has " + std::to_string(d_k.cols()) +
                                 " columns, expected " + std::to_string(n_k));
  if (d_k1.rows() != n_k)
    throw DimensionMismatchError("incoming boundary has " + std::to_string(d_k1.rows()) +
                                 " rows, expected " + std::to_string(n_k));
  if (!product_is_zero(d_k, d_k1))
    throw InvalidComplexError("boundary of a boundary is not zero");
  const std::size_t out_rank = rank(d_k);
  const auto incoming = snf(d_k1);
  std::vector<BigInt> torsion;
  for (const auto& d : incoming)
    if (d > 1) torsion.push_back(d);
  return FgAbelianGroup(n_k - out_rank - incoming.size(), std::move(torsion));
}

// ---------------------------------------------------------------------------
// Finitely generated abelian groups

FgAbelianGroup::FgAbelianGroup(std::size_t rank, std::vector<BigInt> cyclic_orders)
    : rank_(rank) {
  for (auto& v : cyclic_orders) {
    v = mp::abs(v);
    if (v < 2) throw ComputationError("cyclic order must be at least 2, got " + v.str());
  }
  // Replace (a, b) by (gcd, lcm) pairwise; afterwards each entry divides all
  // later ones.
  for (std::size_t i = 0; i < cyclic_orders.size(); ++i)
    for (std::size_t j = i + 1; j < cyclic_orders.size(); ++j) {
      BigInt g = boost::integer::gcd(cyclic_orders[i], cyclic_orders[j]);
      BigInt l = cyclic_orders[i] / g * cyclic_orders[j];
      cyclic_orders[i] = std::move(g);
      cyclic_orders[j] = std::move(l);
    }
  for (auto& v : cyclic_orders)
    if (v > 1) torsion_.push_back(std::move(v));
}

FgAbelianGroup FgAbelianGroup::cyclic(const BigInt& order) {
  if (order == 0) return integers(1);
  if (mp::abs(order) == 1) return zero();
  return FgAbelianGroup(0, {order});
}

std::string FgAbelianGroup::to_string() const {
  if (is_trivial()) return "0";
  std::string out;
  if (rank_ == 1) out = "Z";
  else if (rank_ > 1) out = "Z^" + std::to_string(rank_);
  for (const auto& t : torsion_) {
    if (!out.empty()) out += " + ";
    out += "Z/" + t.str();
  }
  return out;
}

FgAbelianGroup direct_sum(const FgAbelianGroup& a, const FgAbelianGroup& b) {
  std::vector<BigInt> orders = a.torsion();
  orders.insert(orders.end(), b.torsion().begin(), b.torsion().end());
  return FgAbelianGroup(a.rank() + b.rank(), std::move(orders));
}

FgAbelianGroup tensor(const FgAbelianGroup& a, const FgAbelianGroup& b) {
  std::vector<BigInt> orders;
  for (std::size_t i = 0; i < a.rank(); ++i)
    orders.insert(orders.end(), b.torsion().begin(), b.torsion().end());
  for (std::size_t i = 0; i < b.rank(); ++i)
    orders.insert(orders.end(), a.torsion().begin(), a.torsion().end());
  for (const auto& m : a.torsion())
    for (const auto& n : b.torsion()) {
      BigInt g = boost::integer::gcd(m, n);
      if (g > 1) orders.push_back(std::move(g));
    }
  return FgAbelianGroup(a.rank() * b.rank(), std::move(orders));
}

FgAbelianGroup tor(const FgAbelianGroup& a, const FgAbelianGroup& b) {
  std::vector<BigInt> orders;
  for (const auto& m : a.torsion())
    for (const auto& n : b.torsion()) {
      BigInt g = boost::integer::gcd(m, n);
      if (g > 1) orders.push_back(std::move(g));
    }
  return FgAbelianGroup(0, std::move(orders));
}

}  // namespace topo
