#include "doctest.h"

#include "suites.hpp"

#include "topo/certifier.hpp"

using namespace topo;

namespace {

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (std::size_t pos = 0; (pos = text.find(what, pos)) != std::string::npos; pos += what.size()) ++n;
  return n;
}

/// One top-level form with balanced parentheses.
bool single_form(const std::string& text) {
  int depth = 0, forms = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')' && --depth == 0) ++forms;
    if (depth < 0) return false;
  }
  return depth == 0 && forms == 1;
}

}  // namespace

TEST_CASE("tables") {
  const auto t = parse_table("# C3\n0 1 2\n1 2 0\n2 0 1\n");
  CHECK(t.order() == 3);
  CHECK(t.identity() == 0);
  CHECK(t.rows() == MultiplicationTable::cyclic(3).rows());
  CHECK(parse_table("0 1; 1 0").rows() == MultiplicationTable::cyclic(2).rows());
  CHECK(parse_table("identity 1\n1 0\n0 1").identity() == 1);
  CHECK_THROWS_AS(parse_table("0 1\n1"), MalformedTableError);
  CHECK_THROWS_AS(parse_table(""), MalformedTableError);
  CHECK_THROWS_AS(parse_table("0 x\n1 0"), MalformedTableError);
  CHECK_THROWS_AS(MultiplicationTable({{0}}, 1), MalformedTableError);
  CHECK_THROWS_AS(MultiplicationTable({{0, 1}, {1}}, 0), MalformedTableError);
}

TEST_CASE("obligation documents") {
  const std::string c4 = obligations(MultiplicationTable::cyclic(4));
  CHECK(count(c4, "(defthm ") == 4);
  CHECK(count(c4, "(defun-sk ") == 1);
  CHECK(c4.rfind(";; Group axioms", 0) == 0);
  CHECK(single_form(c4));
  CHECK(c4 == obligations(MultiplicationTable::cyclic(4)));
  CHECK(c4 == support::read_file(std::string(TOPO_GOLDEN_DIR) + "/c4_obligations.txt"));

  const std::string trivial = obligations(MultiplicationTable({{0}}, 0));
  CHECK(count(trivial, "(defthm ") == 4);
  CHECK(trivial.find("(defun e () 0)") != std::string::npos);
}

TEST_CASE("check examples") {
  CHECK(check(MultiplicationTable::cyclic(4)).certified);
  CHECK(check(MultiplicationTable({{0}}, 0)).certified);

  auto t = MultiplicationTable::cyclic(4);
  REQUIRE(t.at(1, 1) == 2);
  t.set(1, 1, 3);
  const auto r = check(t);
  CHECK(!r.certified);
  CHECK(r.status() == "failed");
  REQUIRE(r.obligations.size() == 4);
  CHECK(r.obligations[0].axiom == "closure");
  CHECK(r.obligations[0].holds);
  CHECK(r.obligations[1].axiom == "associativity");
  CHECK(!r.obligations[1].holds);
  REQUIRE(r.obligations[1].counterexample);
  CHECK(support::violates(t, "associativity", *r.obligations[1].counterexample));

  auto open = MultiplicationTable::cyclic(3);
  open.set(2, 2, 7);
  const auto closure = check(open).obligations[0];
  CHECK(!closure.holds);
  CHECK(closure.counterexample == std::vector<long long>{2, 2});

  // A table with the wrong identity marked.
  const auto shifted = MultiplicationTable(MultiplicationTable::cyclic(3).rows(), 1);
  const auto id = check(shifted).obligations[2];
  CHECK(!id.holds);
  CHECK(id.counterexample == std::vector<long long>{0});
}

TEST_CASE("report terms round trip") {
  auto t = MultiplicationTable::cyclic(5);
  t.set(0, 3, 1);
  const auto r = check(t);
  CHECK(report_from_term(decode(encode(to_term(r)))) == r);
  const auto back = table_from_term(decode(encode(to_term(t))));
  CHECK(back.rows() == t.rows());
  CHECK(back.identity() == t.identity());
}

TEST_CASE("cyclic tables certify and mutations are judged correctly") {
  const auto r = support::certifier_suite(100, 2024);
  INFO(r.summary());
  CHECK(r.ok());
}
