#include "topo/expr.hpp"

#include <limits>

namespace topo {

GroupExpr GroupExpr::cyclic(BigInt order) {
  if (order < 1) throw TermError("cyclic group order must be at least 1");
  return GroupExpr(Cyclic{std::move(order)});
}

GroupExpr GroupExpr::direct_product(std::vector<GroupExpr> factors) {
  if (factors.size() < 2) throw TermError("direct product needs at least two factors");
  return GroupExpr(DirectProduct{std::move(factors)});
}

bool operator==(const GroupExpr& a, const GroupExpr& b) {
  if (a.node_.index() != b.node_.index()) return false;
  if (auto* c = std::get_if<GroupExpr::Cyclic>(&a.node_))
    return c->order == std::get<GroupExpr::Cyclic>(b.node_).order;
  return std::get<GroupExpr::DirectProduct>(a.node_).factors ==
         std::get<GroupExpr::DirectProduct>(b.node_).factors;
}

SpaceExpr SpaceExpr::sphere(int dim) {
  if (dim < 1) throw TermError("sphere dimension must be at least 1");
  return SpaceExpr(Sphere{dim});
}

SpaceExpr SpaceExpr::simplex(int dim) {
  if (dim < 0) throw TermError("simplex dimension must be non-negative");
  return SpaceExpr(Simplex{dim});
}

SpaceExpr SpaceExpr::rp2() { return SpaceExpr(Rp2{}); }

SpaceExpr SpaceExpr::product(SpaceExpr lhs, SpaceExpr rhs) {
  return SpaceExpr(Product{std::make_shared<const SpaceExpr>(std::move(lhs)),
                           std::make_shared<const SpaceExpr>(std::move(rhs))});
}

SpaceExpr SpaceExpr::em_space(GroupExpr group, int level) {
  if (level < 1) throw TermError("Eilenberg-MacLane level must be at least 1");
  return SpaceExpr(EmSpace{std::move(group), level});
}

bool operator==(const SpaceExpr& a, const SpaceExpr& b) {
  if (a.node_.index() != b.node_.index()) return false;
  return std::visit(
      [&b](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node_);
        if constexpr (std::is_same_v<T, SpaceExpr::Sphere> ||
                      std::is_same_v<T, SpaceExpr::Simplex>) {
          return x.dim == y.dim;
        } else if constexpr (std::is_same_v<T, SpaceExpr::Rp2>) {
          return true;
        } else if constexpr (std::is_same_v<T, SpaceExpr::Product>) {
          return *x.lhs == *y.lhs && *x.rhs == *y.rhs;
        } else {
          return x.level == y.level && x.group == y.group;
        }
      },
      a.node_);
}

// ---------------------------------------------------------------------------

Term to_term(const GroupExpr& g) {
  if (auto* c = std::get_if<GroupExpr::Cyclic>(&g.node()))
    return apply("grp1", "cyclic_group", {integer(c->order)});
  std::vector<Term> args;
  for (const auto& f : std::get<GroupExpr::DirectProduct>(g.node()).factors)
    args.push_back(to_term(f));
  return apply("grp1", "direct_product", std::move(args));
}

Term to_term(const SpaceExpr& s) {
  return std::visit(
      [](const auto& n) -> Term {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpaceExpr::Sphere>) {
          return apply("algtop1", "sphere", {integer(n.dim)});
        } else if constexpr (std::is_same_v<T, SpaceExpr::Simplex>) {
          return apply("algtop1", "simplex", {integer(n.dim)});
        } else if constexpr (std::is_same_v<T, SpaceExpr::Rp2>) {
          return sym("algtop1", "rp2");
        } else if constexpr (std::is_same_v<T, SpaceExpr::Product>) {
          return apply("algtop1", "cartesian_product", {to_term(*n.lhs), to_term(*n.rhs)});
        } else {
          return apply("algtop1", "em_space", {to_term(n.group), integer(n.level)});
        }
      },
      s.node());
}

Term to_term(const Subject& s) {
  return std::visit([](const auto& x) { return to_term(x); }, s);
}

namespace {

const std::vector<Term>& args_of(const Term& t, std::size_t n, const char* what) {
  const auto& a = t.as<Apply>();
  if (a.args.size() != n)
    throw TermError(std::string("invalid constructor term: ") + what + " takes " +
                    std::to_string(n) + " argument(s)");
  return a.args;
}

int small_int(const Term& t, const char* what) {
  if (!t.is<Integer>())
    throw TermError(std::string("invalid constructor term: ") + what +
                    " expects an integer");
  const BigInt& v = t.as<Integer>().value;
  if (v < 0 || v > std::numeric_limits<int>::max())
    throw TermError(std::string("invalid constructor term: ") + what +
                    " argument out of range");
  return static_cast<int>(v);
}

}  // namespace

GroupExpr group_from_term(const Term& t) {
  if (t.is_apply_of("grp1", "cyclic_group")) {
    const auto& a = args_of(t, 1, "cyclic_group");
    if (!a[0].is<Integer>())
      throw TermError("invalid constructor term: cyclic_group expects an integer");
    return GroupExpr::cyclic(a[0].as<Integer>().value);
  }
  if (t.is_apply_of("grp1", "direct_product")) {
    std::vector<GroupExpr> factors;
    for (const auto& f : t.as<Apply>().args) factors.push_back(group_from_term(f));
    return GroupExpr::direct_product(std::move(factors));
  }
  throw TermError("invalid constructor term: not a group expression");
}

SpaceExpr space_from_term(const Term& t) {
  if (t.is_symbol("algtop1", "rp2")) return SpaceExpr::rp2();
  if (t.is_apply_of("algtop1", "sphere"))
    return SpaceExpr::sphere(small_int(args_of(t, 1, "sphere")[0], "sphere"));
  if (t.is_apply_of("algtop1", "simplex"))
    return SpaceExpr::simplex(small_int(args_of(t, 1, "simplex")[0], "simplex"));
  if (t.is_apply_of("algtop1", "cartesian_product")) {
    const auto& a = args_of(t, 2, "cartesian_product");
    return SpaceExpr::product(space_from_term(a[0]), space_from_term(a[1]));
  }
  if (t.is_apply_of("algtop1", "em_space")) {
    const auto& a = args_of(t, 2, "em_space");
    return SpaceExpr::em_space(group_from_term(a[0]), small_int(a[1], "em_space"));
  }
  throw TermError("invalid constructor term: not a space expression");
}

bool is_group_term(const Term& t) {
  return t.is_apply_of("grp1", "cyclic_group") || t.is_apply_of("grp1", "direct_product");
}

bool is_space_term(const Term& t) {
  return t.is_symbol("algtop1", "rp2") || t.is_apply_of("algtop1", "sphere") ||
         t.is_apply_of("algtop1", "simplex") ||
         t.is_apply_of("algtop1", "cartesian_product") ||
         t.is_apply_of("algtop1", "em_space");
}

Subject subject_from_term(const Term& t) {
  if (is_group_term(t)) return group_from_term(t);
  return space_from_term(t);
}

FgAbelianGroup abelian_group(const GroupExpr& g) {
  if (auto* c = std::get_if<GroupExpr::Cyclic>(&g.node()))
    return FgAbelianGroup::cyclic(c->order);
  FgAbelianGroup sum;
  for (const auto& f : std::get<GroupExpr::DirectProduct>(g.node()).factors)
    sum = direct_sum(sum, abelian_group(f));
  return sum;
}

}  // namespace topo
