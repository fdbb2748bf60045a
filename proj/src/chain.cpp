#include "topo/chain.hpp"

namespace topo {

ChainComplex::ChainComplex(std::vector<std::size_t> sizes, std::vector<IntMatrix> boundaries)
    : sizes_(std::move(sizes)), boundaries_(std::move(boundaries)) {
  if (sizes_.empty()) sizes_.push_back(0);
  if (boundaries_.size() + 1 != sizes_.size())
    throw DimensionMismatchError("chain complex needs one boundary per positive degree");
  for (std::size_t k = 1; k < sizes_.size(); ++k) {
    const IntMatrix& d = boundaries_[k - 1];
    if (d.rows() != sizes_[k - 1] || d.cols() != sizes_[k])
      throw DimensionMismatchError("boundary d_" + std::to_string(k) + " has shape " +
                                   std::to_string(d.rows()) + "x" +
                                   std::to_string(d.cols()));
  }
  for (std::size_t k = 1; k + 1 < sizes_.size(); ++k)
    if (!product_is_zero(boundaries_[k - 1], boundaries_[k]))
      throw InvalidComplexError("d_" + std::to_string(k) + " * d_" +
                                std::to_string(k + 1) + " is not zero");
}

IntMatrix ChainComplex::boundary(std::size_t k) const {
  if (k == 0) return IntMatrix(0, size(0));
  if (k < sizes_.size()) return boundaries_[k - 1];
  return IntMatrix(size(k - 1), 0);
}

FgAbelianGroup ChainComplex::homology(std::size_t k) const {
  if (k > top_degree()) return FgAbelianGroup::zero();
  return homology_from_boundaries(size(k), boundary(k), boundary(k + 1));
}

std::vector<FgAbelianGroup> ChainComplex::homology_groups() const {
  // factors[k] = invariant factors of d_k; d_0 and d_{top+1} are zero.
  std::vector<std::vector<BigInt>> factors(sizes_.size() + 1);
  for (std::size_t k = 1; k < sizes_.size(); ++k) factors[k] = snf(boundaries_[k - 1]);
  std::vector<FgAbelianGroup> out;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    std::vector<BigInt> torsion;
    for (const auto& d : factors[k + 1])
      if (d > 1) torsion.push_back(d);
    out.emplace_back(sizes_[k] - factors[k].size() - factors[k + 1].size(),
                     std::move(torsion));
  }
  return out;
}

}  // namespace topo
