#pragma once

#include "topo/snf.hpp"

#include <vector>

namespace topo {

/// Free chain complex C_0 <- C_1 <- ... <- C_d with explicit boundary
/// matrices. The constructor checks shapes and that every composite of
/// consecutive boundaries vanishes.
class ChainComplex {
 public:
  /// `boundaries[k-1]` is d_k : C_k -> C_{k-1}, with sizes[k-1] rows and
  /// sizes[k] columns.
  ChainComplex(std::vector<std::size_t> sizes, std::vector<IntMatrix> boundaries);

  std::size_t top_degree() const noexcept { return sizes_.size() - 1; }
  std::size_t size(std::size_t k) const { return k < sizes_.size() ? sizes_[k] : 0; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  /// d_k for any k >= 0; d_0 and degrees past the top are zero maps of the
  /// right shape.
  IntMatrix boundary(std::size_t k) const;

  FgAbelianGroup homology(std::size_t k) const;

  /// H_0..H_d, reducing each boundary matrix once.
  std::vector<FgAbelianGroup> homology_groups() const;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<IntMatrix> boundaries_;
};

}  // namespace topo
