#pragma once

// Constructor ASTs for the spaces and groups questions are asked about, and
// their OpenMath encodings.

#include "topo/bigint.hpp"
#include "topo/snf.hpp"
#include "topo/term.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace topo {

class GroupExpr {
 public:
  struct Cyclic {
    BigInt order;  // >= 1; order 1 is the trivial group
  };
  struct DirectProduct {
    std::vector<GroupExpr> factors;  // >= 2
  };
  using Node = std::variant<Cyclic, DirectProduct>;

  static GroupExpr cyclic(BigInt order);
  static GroupExpr direct_product(std::vector<GroupExpr> factors);

  const Node& node() const noexcept { return node_; }

  friend bool operator==(const GroupExpr& a, const GroupExpr& b);

 private:
  explicit GroupExpr(Node n) : node_(std::move(n)) {}
  Node node_;
};

class SpaceExpr {
 public:
  struct Sphere {
    int dim;  // >= 1
  };
  struct Simplex {
    int dim;  // >= 0
  };
  struct Rp2 {};
  struct Product {
    std::shared_ptr<const SpaceExpr> lhs;
    std::shared_ptr<const SpaceExpr> rhs;
  };
  struct EmSpace {
    GroupExpr group;
    int level;  // >= 1
  };
  using Node = std::variant<Sphere, Simplex, Rp2, Product, EmSpace>;

  static SpaceExpr sphere(int dim);
  static SpaceExpr simplex(int dim);
  static SpaceExpr rp2();
  static SpaceExpr product(SpaceExpr lhs, SpaceExpr rhs);
  static SpaceExpr em_space(GroupExpr group, int level);

  const Node& node() const noexcept { return node_; }

  friend bool operator==(const SpaceExpr& a, const SpaceExpr& b);

 private:
  explicit SpaceExpr(Node n) : node_(std::move(n)) {}
  Node node_;
};

/// Either kind of question subject.
using Subject = std::variant<SpaceExpr, GroupExpr>;

Term to_term(const GroupExpr& g);
Term to_term(const SpaceExpr& s);
Term to_term(const Subject& s);

/// These throw TermError for terms that are not well-formed constructors.
GroupExpr group_from_term(const Term& t);
SpaceExpr space_from_term(const Term& t);
Subject subject_from_term(const Term& t);
bool is_group_term(const Term& t);
bool is_space_term(const Term& t);

/// Abelian group underlying a cyclic/direct-product expression.
FgAbelianGroup abelian_group(const GroupExpr& g);

}  // namespace topo
