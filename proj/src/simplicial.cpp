#include "topo/simplicial.hpp"

#include "rp2_data.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

namespace topo {

namespace {

// Keeps complexes at desk scale; a 12-vertex facet already has 4095 faces.
constexpr std::size_t kMaxFacetSize = 14;
constexpr std::size_t kMaxFaces = 400000;

bool is_subset(const Face& small, const Face& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

SimplicialComplex::SimplicialComplex(int vertex_count, std::vector<Face> facets)
    : vertex_count_(vertex_count) {
  for (auto& f : facets) {
    std::sort(f.begin(), f.end());
    if (std::adjacent_find(f.begin(), f.end()) != f.end())
      throw InvalidComplexError("facet repeats a vertex");
    if (f.empty()) throw InvalidComplexError("empty facet");
    if (f.front() < 0 || f.back() >= vertex_count)
      throw InvalidComplexError("facet vertex out of range");
    if (f.size() > kMaxFacetSize)
      throw ComputationError("complex too large: facet of dimension " +
                             std::to_string(f.size() - 1));
  }
  std::sort(facets.begin(), facets.end(), [](const Face& a, const Face& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  facets.erase(std::unique(facets.begin(), facets.end()), facets.end());
  for (auto& f : facets) {
    bool contained = std::any_of(facets_.begin(), facets_.end(), [&f](const Face& g) {
      return g.size() > f.size() && is_subset(f, g);
    });
    if (!contained) facets_.push_back(std::move(f));
  }
  std::sort(facets_.begin(), facets_.end());
}

int SimplicialComplex::dimension() const {
  int d = -1;
  for (const auto& f : facets_) d = std::max(d, static_cast<int>(f.size()) - 1);
  return d;
}

std::vector<std::vector<Face>> SimplicialComplex::simplices() const {
  const int dim = dimension();
  std::vector<std::set<Face>> by_dim(static_cast<std::size_t>(std::max(dim + 1, 0)));
  std::size_t total = 0;
  for (const auto& f : facets_) {
    const std::size_t n = f.size();
    for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
      Face face;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1UL << i)) face.push_back(f[i]);
      if (by_dim[face.size() - 1].insert(std::move(face)).second && ++total > kMaxFaces)
        throw ComputationError("complex too large: more than " + std::to_string(kMaxFaces) +
                               " simplices");
    }
  }
  std::vector<std::vector<Face>> out;
  for (auto& s : by_dim) out.emplace_back(s.begin(), s.end());
  return out;
}

std::vector<std::size_t> SimplicialComplex::face_counts() const {
  std::vector<std::size_t> counts;
  for (const auto& s : simplices()) counts.push_back(s.size());
  return counts;
}

SimplicialComplex SimplicialComplex::relabeled(std::span<const int> permutation) const {
  if (permutation.size() != static_cast<std::size_t>(vertex_count_))
    throw InvalidComplexError("relabeling must cover every vertex");
  std::vector<Face> facets;
  for (const auto& f : facets_) {
    Face g;
    for (int v : f) g.push_back(permutation[static_cast<std::size_t>(v)]);
    facets.push_back(std::move(g));
  }
  return SimplicialComplex(vertex_count_, std::move(facets));
}

// ---------------------------------------------------------------------------

namespace {

SimplicialComplex sphere_complex(int n) {
  // Boundary of the (n+1)-simplex: every facet omits one of the n+2 vertices.
  std::vector<Face> facets;
  for (int omit = 0; omit < n + 2; ++omit) {
    Face f;
    for (int v = 0; v < n + 2; ++v)
      if (v != omit) f.push_back(v);
    facets.push_back(std::move(f));
  }
  return SimplicialComplex(n + 2, std::move(facets));
}

SimplicialComplex simplex_complex(int n) {
  Face f;
  for (int v = 0; v <= n; ++v) f.push_back(v);
  return SimplicialComplex(n + 1, {std::move(f)});
}

SimplicialComplex rp2_complex() {
  static const SimplicialComplex rp2 = [] {
    std::istringstream in(generated::kRp2Facets);
    std::string line;
    int vertices = -1;
    std::vector<Face> facets;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream fields(line);
      if (line.rfind("vertices", 0) == 0) {
        std::string word;
        fields >> word >> vertices;
        continue;
      }
      Face f;
      int v;
      while (fields >> v) f.push_back(v);
      facets.push_back(std::move(f));
    }
    return SimplicialComplex(vertices, std::move(facets));
  }();
  return rp2;
}

// Every monotone lattice path from (0,0) to (p,q) gives one top simplex of
// the product of a p-simplex and a q-simplex.
void staircase(const Face& a, const Face& b, int b_vertices, std::size_t i,
               std::size_t j, Face& path, std::vector<Face>& out) {
  path.push_back(a[i] * b_vertices + b[j]);
  if (i + 1 == a.size() && j + 1 == b.size()) {
    out.push_back(path);
  } else {
    if (i + 1 < a.size()) staircase(a, b, b_vertices, i + 1, j, path, out);
    if (j + 1 < b.size()) staircase(a, b, b_vertices, i, j + 1, path, out);
  }
  path.pop_back();
}

}  // namespace

SimplicialComplex product(const SimplicialComplex& x, const SimplicialComplex& y) {
  std::vector<Face> facets;
  Face path;
  for (const auto& a : x.facets())
    for (const auto& b : y.facets())
      staircase(a, b, y.vertex_count(), 0, 0, path, facets);
  return SimplicialComplex(x.vertex_count() * y.vertex_count(), std::move(facets));
}

SimplicialComplex build(const SpaceExpr& e) {
  return std::visit(
      [](const auto& n) -> SimplicialComplex {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpaceExpr::Sphere>) {
          return sphere_complex(n.dim);
        } else if constexpr (std::is_same_v<T, SpaceExpr::Simplex>) {
          return simplex_complex(n.dim);
        } else if constexpr (std::is_same_v<T, SpaceExpr::Rp2>) {
          return rp2_complex();
        } else if constexpr (std::is_same_v<T, SpaceExpr::Product>) {
          return product(build(*n.lhs), build(*n.rhs));
        } else {
          throw NotBuildableError(
              "Eilenberg-MacLane spaces have no finite triangulation here; "
              "ask the broker, which routes K(G,1) to group homology");
        }
      },
      e.node());
}

namespace {

// Dense BigInt boundary matrices beyond this size exhaust memory long before
// the elimination would finish.
constexpr std::size_t kMaxMatrixEntries = 6000000;

IntMatrix boundary_matrix(const std::vector<Face>& faces, const std::vector<Face>& cells) {
  if (!faces.empty() && cells.size() > kMaxMatrixEntries / faces.size())
    throw ComputationError("complex too large: boundary matrix would be " +
                           std::to_string(faces.size()) + "x" + std::to_string(cells.size()));
  IntMatrix m(faces.size(), cells.size());
  for (std::size_t col = 0; col < cells.size(); ++col) {
    const Face& s = cells[col];
    for (std::size_t i = 0; i < s.size(); ++i) {
      Face face;
      face.reserve(s.size() - 1);
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != i) face.push_back(s[j]);
      auto it = std::lower_bound(faces.begin(), faces.end(), face);
      if (it == faces.end() || *it != face)
        throw InvalidComplexError("face missing from simplex list");
      m(static_cast<std::size_t>(it - faces.begin()), col) = (i % 2 == 0) ? 1 : -1;
    }
  }
  return m;
}

}  // namespace

ChainComplex chain_complex(const SimplicialComplex& k) {
  const auto cells = k.simplices();
  std::vector<std::size_t> sizes;
  for (const auto& c : cells) sizes.push_back(c.size());
  std::vector<IntMatrix> boundaries;
  for (std::size_t d = 1; d < cells.size(); ++d)
    boundaries.push_back(boundary_matrix(cells[d - 1], cells[d]));
  return ChainComplex(std::move(sizes), std::move(boundaries));
}

FgAbelianGroup homology(const SpaceExpr& e, int k) {
  if (k < 0) throw UserError("homology degree must be non-negative");
  const auto cells = build(e).simplices();
  const auto d = static_cast<std::size_t>(k);
  if (d >= cells.size()) return FgAbelianGroup::zero();
  static const std::vector<Face> none;
  const auto& above = d + 1 < cells.size() ? cells[d + 1] : none;
  const IntMatrix outgoing =
      d == 0 ? IntMatrix(0, cells[0].size()) : boundary_matrix(cells[d - 1], cells[d]);
  return homology_from_boundaries(cells[d].size(), outgoing, boundary_matrix(cells[d], above));
}

long long euler(const SimplicialComplex& k) {
  long long chi = 0;
  long long sign = 1;
  for (std::size_t n : k.face_counts()) {
    chi += sign * static_cast<long long>(n);
    sign = -sign;
  }
  return chi;
}

}  // namespace topo
