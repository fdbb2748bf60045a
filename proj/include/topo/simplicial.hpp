#pragma once

// Finite simplicial complexes built from constructor expressions, and their
// integral homology.

#include "topo/chain.hpp"
#include "topo/error.hpp"
#include "topo/expr.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace topo {

class NotBuildableError : public UserError {
 public:
  using UserError::UserError;
};

using Face = std::vector<int>;  // strictly increasing vertex indices

class SimplicialComplex {
 public:
  SimplicialComplex() = default;
  /// Sorts each facet, drops duplicates and facets contained in others.
  SimplicialComplex(int vertex_count, std::vector<Face> facets);

  int vertex_count() const noexcept { return vertex_count_; }
  const std::vector<Face>& facets() const noexcept { return facets_; }
  int dimension() const;

  /// All simplices of each dimension, lexicographically ordered.
  std::vector<std::vector<Face>> simplices() const;
  std::vector<std::size_t> face_counts() const;

  /// Same complex with vertex v renamed to permutation[v].
  SimplicialComplex relabeled(std::span<const int> permutation) const;

 private:
  int vertex_count_ = 0;
  std::vector<Face> facets_;
};

SimplicialComplex build(const SpaceExpr& e);

/// Ordered (staircase) triangulation of the product.
SimplicialComplex product(const SimplicialComplex& x, const SimplicialComplex& y);

ChainComplex chain_complex(const SimplicialComplex& k);

FgAbelianGroup homology(const SpaceExpr& e, int k);

long long euler(const SimplicialComplex& k);

}  // namespace topo
