#include "topo/grouphom.hpp"

#include <span>

namespace topo {

ChainComplex periodic_complex(const BigInt& m, int n) {
  if (m < 2)
    throw ComputationError("periodic resolution needs a group of order at least 2");
  if (n < 1) throw ComputationError("periodic complex truncation degree must be >= 1");
  const auto top = static_cast<std::size_t>(n) + 1;
  std::vector<std::size_t> sizes(top + 1, 1);
  std::vector<IntMatrix> boundaries;
  for (std::size_t k = 1; k <= top; ++k) {
    IntMatrix d(1, 1);
    if (k % 2 == 0) d(0, 0) = m;
    boundaries.push_back(std::move(d));
  }
  return ChainComplex(std::move(sizes), std::move(boundaries));
}

namespace {

std::vector<FgAbelianGroup> homology_upto(const GroupExpr& g, int n) {
  std::vector<FgAbelianGroup> out;
  if (auto* c = std::get_if<GroupExpr::Cyclic>(&g.node())) {
    if (c->order == 1) {
      out.push_back(FgAbelianGroup::integers());
      out.resize(static_cast<std::size_t>(n) + 1);
      return out;
    }
    const ChainComplex cx = periodic_complex(c->order, std::max(n, 1));
    for (int k = 0; k <= n; ++k) out.push_back(cx.homology(static_cast<std::size_t>(k)));
    return out;
  }
  const auto& factors = std::get<GroupExpr::DirectProduct>(g.node()).factors;
  out = homology_upto(factors.front(), n);
  for (std::size_t i = 1; i < factors.size(); ++i) {
    const auto rhs = homology_upto(factors[i], n);
    std::vector<FgAbelianGroup> combined;
    for (int k = 0; k <= n; ++k) combined.push_back(kunneth(out, rhs, k));
    out = std::move(combined);
  }
  return out;
}

}  // namespace

FgAbelianGroup kunneth(std::span<const FgAbelianGroup> lhs,
                       std::span<const FgAbelianGroup> rhs, int n) {
  FgAbelianGroup sum;
  for (int i = 0; i <= n; ++i) {
    const auto j = static_cast<std::size_t>(n - i);
    const auto ui = static_cast<std::size_t>(i);
    if (ui < lhs.size() && j < rhs.size()) sum = direct_sum(sum, tensor(lhs[ui], rhs[j]));
  }
  for (int i = 0; i <= n - 1; ++i) {
    const auto j = static_cast<std::size_t>(n - 1 - i);
    const auto ui = static_cast<std::size_t>(i);
    if (ui < lhs.size() && j < rhs.size()) sum = direct_sum(sum, tor(lhs[ui], rhs[j]));
  }
  return sum;
}

FgAbelianGroup group_homology(const GroupExpr& g, int n) {
  if (n < 0) throw UserError("homology degree must be non-negative");
  return homology_upto(g, n).back();
}

}  // namespace topo
