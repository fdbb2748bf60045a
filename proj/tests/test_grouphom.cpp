#include "doctest.h"

#include "topo/compact.hpp"
#include "topo/grouphom.hpp"

#include <random>

using namespace topo;

TEST_CASE("periodic complex") {
  const auto c = periodic_complex(5, 5);
  CHECK(c.top_degree() == 6);
  for (std::size_t k = 0; k <= 6; ++k) CHECK(c.size(k) == 1);
  for (std::size_t k = 1; k <= 6; ++k) {
    IntMatrix expected(1, 1);
    expected(0, 0) = k % 2 ? 0 : 5;
    CHECK(c.boundary(k) == expected);
  }
  const auto small = periodic_complex(2, 1);
  CHECK(small.boundary(1) == IntMatrix{{0}});
  CHECK(small.boundary(2) == IntMatrix{{2}});
  CHECK_THROWS_AS(periodic_complex(1, 3), Error);
}

TEST_CASE("group homology examples") {
  CHECK(group_homology(GroupExpr::cyclic(5), 5) == FgAbelianGroup::cyclic(5));
  CHECK(group_homology(GroupExpr::cyclic(7), 0) == FgAbelianGroup::integers());
  CHECK(group_homology(GroupExpr::cyclic(3), 2).is_trivial());
  const auto c2 = GroupExpr::cyclic(2);
  CHECK(group_homology(GroupExpr::direct_product({c2, c2}), 1) == FgAbelianGroup(0, {2, 2}));
  CHECK(group_homology(GroupExpr::cyclic(1), 0) == FgAbelianGroup::integers());
  CHECK(group_homology(GroupExpr::cyclic(1), 3).is_trivial());
}

TEST_CASE("periodicity of cyclic groups") {
  for (int m = 2; m <= 12; ++m)
    for (int n = 0; n <= 9; ++n) {
      const auto h = group_homology(GroupExpr::cyclic(m), n);
      CAPTURE(m);
      CAPTURE(n);
      if (n == 0)
        CHECK(h == FgAbelianGroup::integers());
      else if (n % 2)
        CHECK(h == FgAbelianGroup::cyclic(m));
      else
        CHECK(h.is_trivial());
    }
}

TEST_CASE("known products") {
  // H_n(C2 x C2) has 2-rank floor(n/2)+1 for odd n, n/2 for even n > 0.
  const auto c2 = GroupExpr::cyclic(2);
  const auto v4 = GroupExpr::direct_product({c2, c2});
  CHECK(group_homology(v4, 2) == FgAbelianGroup::cyclic(2));
  CHECK(group_homology(v4, 3) == FgAbelianGroup(0, {2, 2, 2}));
  CHECK(group_homology(v4, 4) == FgAbelianGroup(0, {2, 2}));
  // Coprime orders: C2 x C3 = C6.
  const auto c6 = GroupExpr::direct_product({c2, GroupExpr::cyclic(3)});
  for (int n = 0; n <= 6; ++n) CHECK(group_homology(c6, n) == group_homology(GroupExpr::cyclic(6), n));
  // Three factors fold from the left.
  const auto e8 = GroupExpr::direct_product({c2, c2, c2});
  CHECK(group_homology(e8, 1) == FgAbelianGroup(0, {2, 2, 2}));
  CHECK(group_homology(e8, 2) == FgAbelianGroup(0, {2, 2, 2}));
}

TEST_CASE("kunneth symmetry") {
  std::mt19937_64 rng(17);
  auto small_group = [&rng]() {
    std::uniform_int_distribution<int> order(1, 9), count(1, 2);
    if (count(rng) == 1) return GroupExpr::cyclic(order(rng));
    return GroupExpr::direct_product({GroupExpr::cyclic(order(rng)), GroupExpr::cyclic(order(rng))});
  };
  for (int i = 0; i < 40; ++i) {
    const auto a = small_group(), b = small_group();
    for (int n = 0; n <= 5; ++n)
      CHECK(group_homology(GroupExpr::direct_product({a, b}), n) ==
            group_homology(GroupExpr::direct_product({b, a}), n));
  }
}
