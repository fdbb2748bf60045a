#pragma once

// Integral homology of finite cyclic groups and their direct products.

#include "topo/chain.hpp"
#include "topo/expr.hpp"

#include <span>

namespace topo {

/// Z-coefficient complex of the periodic resolution of C_m, truncated at
/// degree n + 1: one generator per degree, d_k = 0 for odd k, m for even k.
ChainComplex periodic_complex(const BigInt& m, int n);

/// H_n(G; Z). Cyclic factors are computed from their periodic complex;
/// direct products by the Kunneth formula, folding factors from the left.
FgAbelianGroup group_homology(const GroupExpr& g, int n);

/// H_n of a product from the homology of its factors in degrees 0..n.
FgAbelianGroup kunneth(std::span<const FgAbelianGroup> lhs,
                       std::span<const FgAbelianGroup> rhs, int n);

}  // namespace topo
