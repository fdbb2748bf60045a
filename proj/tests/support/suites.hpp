#pragma once

// Property suites shared by the unit tests and the acceptance runner. Each
// returns the number of cases examined and a description of every failure.

#include "oracles.hpp"
#include "wire_session.hpp"

#include "topo/broker.hpp"
#include "topo/certifier.hpp"
#include "topo/cli.hpp"
#include "topo/compact.hpp"
#include "topo/expr.hpp"
#include "topo/grouphom.hpp"
#include "topo/hes.hpp"
#include "topo/simplicial.hpp"
#include "topo/snf.hpp"
#include "topo/wire.hpp"

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace support {

struct SuiteResult {
  std::size_t cases = 0;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what) {
    ++cases;
    if (!ok) failures.push_back(what);
  }
  bool ok() const { return failures.empty(); }
  std::string summary() const {
    std::ostringstream s;
    s << cases << " checks, " << failures.size() << " failed";
    if (!failures.empty()) s << "; first: " << failures.front();
    return s.str();
  }
};

inline topo::Term space(const std::string& compact) { return topo::to_term(topo::parse_compact(compact)); }

inline topo::IntMatrix to_int_matrix(const oracle::Matrix& m) {
  topo::IntMatrix out(m.size(), m.empty() ? 0 : m[0].size());
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[r].size(); ++c) out(r, c) = m[r][c];
  return out;
}

inline oracle::Matrix transpose(const oracle::Matrix& m) {
  if (m.empty()) return m;
  oracle::Matrix t(m[0].size(), std::vector<oracle::BigInt>(m.size()));
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < m[r].size(); ++c) t[c][r] = m[r][c];
  return t;
}

inline std::string describe(const std::vector<topo::BigInt>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
  return s + "]";
}

// ---------------------------------------------------------------------------
// Smith normal form

inline SuiteResult snf_suite(int count, std::uint64_t seed) {
  SuiteResult r;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  for (int i = 0; i < count; ++i) {
    const std::size_t rows = dim(rng);
    const std::size_t cols = (i % 3 == 0) ? rows : dim(rng);
    // Sparse matrices hit rank deficiency and larger torsion more often.
    oracle::Matrix m = oracle::random_matrix(rng, rows, cols, -10, 10);
    if (i % 4 == 1)
      for (auto& row : m)
        for (auto& v : row)
          if (rng() % 3) v = 0;
    const std::string tag = "matrix #" + std::to_string(i);
    const auto f = topo::snf(to_int_matrix(m));

    bool chain = true;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (f[k] <= 0) chain = false;
      if (k + 1 < f.size() && f[k + 1] % f[k] != 0) chain = false;
    }
    r.check(chain, tag + ": divisibility chain broken " + describe(f));
    r.check(f.size() == oracle::rank(m), tag + ": factor count differs from oracle rank");

    if (rows == cols) {
      const auto det = oracle::abs_big(oracle::determinant(m));
      if (det != 0) {
        topo::BigInt prod = 1;
        for (const auto& d : f) prod *= d;
        r.check(prod == det, tag + ": product of factors differs from |det|");
      }
    }
    if (std::max(rows, cols) <= 4)
      r.check(f == oracle::invariant_factors(m), tag + ": differs from determinantal divisors");

    r.check(topo::snf(to_int_matrix(transpose(m))) == f, tag + ": not transpose invariant");
    const auto u = oracle::random_unimodular(rng, rows, 12);
    const auto v = oracle::random_unimodular(rng, cols, 12);
    r.check(topo::snf(to_int_matrix(oracle::multiply(oracle::multiply(u, m), v))) == f,
            tag + ": not invariant under unimodular change of basis");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Simplicial homology

/// Tensor and Tor of two groups given as (rank, cyclic orders) by the
/// bilinear expansion over cyclic summands.
inline topo::FgAbelianGroup kunneth_formula(const std::vector<topo::FgAbelianGroup>& x,
                                            const std::vector<topo::FgAbelianGroup>& y, int n) {
  std::size_t rank = 0;
  std::vector<topo::BigInt> orders;
  auto at = [](const std::vector<topo::FgAbelianGroup>& h, int i) {
    return i < static_cast<int>(h.size()) ? h[static_cast<std::size_t>(i)] : topo::FgAbelianGroup{};
  };
  for (int i = 0; i <= n; ++i) {
    const auto a = at(x, i), b = at(y, n - i);
    rank += a.rank() * b.rank();
    for (const auto& d : b.torsion())
      for (std::size_t k = 0; k < a.rank(); ++k) orders.push_back(d);
    for (const auto& d : a.torsion())
      for (std::size_t k = 0; k < b.rank(); ++k) orders.push_back(d);
    for (const auto& d : a.torsion())
      for (const auto& e : b.torsion()) orders.push_back(oracle::gcd_big(d, e));
  }
  for (int i = 0; i <= n - 1; ++i) {
    const auto a = at(x, i), b = at(y, n - 1 - i);
    for (const auto& d : a.torsion())
      for (const auto& e : b.torsion()) orders.push_back(oracle::gcd_big(d, e));
  }
  std::vector<topo::BigInt> kept;
  for (const auto& d : orders)
    if (d > 1) kept.push_back(d);
  return topo::FgAbelianGroup(rank, kept);
}

inline std::vector<topo::FgAbelianGroup> homology_all(const topo::SimplicialComplex& k) {
  return topo::chain_complex(k).homology_groups();
}

inline topo::FgAbelianGroup degree(const std::vector<topo::FgAbelianGroup>& h, int k) {
  return k < static_cast<int>(h.size()) ? h[static_cast<std::size_t>(k)] : topo::FgAbelianGroup{};
}

inline SuiteResult homology_suite() {
  using namespace topo;
  SuiteResult r;
  const auto Z = FgAbelianGroup::integers();
  const FgAbelianGroup zero;

  for (int n = 1; n <= 6; ++n) {
    const auto h = homology_all(build(SpaceExpr::sphere(n)));
    for (int k = 0; k <= n + 2; ++k) {
      const auto expected = (k == 0 || k == n) ? Z : zero;
      r.check(degree(h, k) == expected, "H_" + std::to_string(k) + "(S^" + std::to_string(n) +
                                            ") = " + degree(h, k).to_string());
    }
  }
  r.check(homology(SpaceExpr::rp2(), 1) == FgAbelianGroup::cyclic(2), "H_1(RP2) != Z/2");
  r.check(homology(SpaceExpr::rp2(), 2) == zero, "H_2(RP2) != 0");
  r.check(homology(SpaceExpr::rp2(), 0) == Z, "H_0(RP2) != Z");

  // Euler-Poincare on every constructor up to dimension 6.
  std::vector<std::pair<std::string, SimplicialComplex>> complexes;
  for (int n = 1; n <= 6; ++n) complexes.emplace_back("S(" + std::to_string(n) + ")", build(SpaceExpr::sphere(n)));
  for (int n = 0; n <= 6; ++n) complexes.emplace_back("D(" + std::to_string(n) + ")", build(SpaceExpr::simplex(n)));
  complexes.emplace_back("RP2", build(SpaceExpr::rp2()));
  for (const char* p : {"S(1)*S(1)", "S(1)*S(2)", "S(2)*S(1)", "S(2)*S(2)", "D(1)*S(1)", "RP2*S(1)",
                        "S(1)*RP2", "RP2*RP2", "D(2)*D(3)", "S(3)*S(3)", "S(1)*S(1)*S(1)", "RP2*D(2)",
                        "S(4)*D(2)", "S(2)*S(4)"})
    complexes.emplace_back(p, build(std::get<SpaceExpr>(parse_compact(p))));
  for (const auto& [name, k] : complexes) {
    const auto h = homology_all(k);
    long long betti = 0;
    for (std::size_t i = 0; i < h.size(); ++i)
      betti += (i % 2 ? -1 : 1) * static_cast<long long>(h[i].rank());
    r.check(euler(k) == betti, name + ": Euler characteristic " + std::to_string(euler(k)) +
                                   " vs alternating Betti sum " + std::to_string(betti));
  }

  // Kunneth against the staircase triangulation.
  const std::vector<std::string> factors = {"S(1)", "S(2)", "D(2)", "RP2"};
  for (const auto& a : factors)
    for (const auto& b : factors) {
      const auto x = std::get<SpaceExpr>(parse_compact(a));
      const auto y = std::get<SpaceExpr>(parse_compact(b));
      const auto hx = homology_all(build(x)), hy = homology_all(build(y));
      const auto hp = homology_all(build(SpaceExpr::product(x, y)));
      for (int n = 0; n <= 4; ++n) {
        const auto expected = kunneth_formula(hx, hy, n);
        r.check(degree(hp, n) == expected, "H_" + std::to_string(n) + "(" + a + "*" + b + ") = " +
                                               degree(hp, n).to_string() + ", Kunneth gives " +
                                               expected.to_string());
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Broker-level suites

inline bool same_value(const topo::AnswerValue& a, const topo::AnswerValue& b) {
  return topo::canonical_key(topo::value_term(a)) == topo::canonical_key(topo::value_term(b));
}

inline topo::Question question(topo::QuestionKind kind, const std::string& subject, int degree) {
  topo::Question q;
  q.kind = kind;
  q.subject = kind == topo::QuestionKind::Certify ? topo::to_term(topo::parse_table(subject)) : space(subject);
  q.degree = degree;
  return q;
}

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

inline SuiteResult cooperation_suite() {
  using namespace topo;
  SuiteResult r;
  auto broker = make_default_broker();
  const auto Z = FgAbelianGroup::integers();
  const auto Z5 = FgAbelianGroup::cyclic(5);

  Answer a = broker->ask(question(QuestionKind::Homology, "C(5)", 5));
  r.check(same_value(a.value, Z5), "H_5(C_5) = " + value_text(a.value));
  r.check(contains(a.provenance, "grouphom"), "H_5(C_5) provenance lacks grouphom");

  a = broker->ask(question(QuestionKind::Homotopy, "D(4)*D(5)", 4));
  r.check(same_value(a.value, FgAbelianGroup{}), "pi_4(D4xD5) = " + value_text(a.value));
  r.check(a.provenance == std::vector<std::string>{"hes"}, "pi_4(D4xD5) provenance is not [hes]");
  bool no_subqueries = a.trace_id.has_value();
  if (a.trace_id) {
    const auto stored = broker->trace(*a.trace_id);
    for (const auto& s : stored->trace.steps) no_subqueries &= s.subquestions.empty();
  }
  r.check(no_subqueries, "pi_4(D4xD5) trace missing or has sub-questions");

  a = broker->ask(question(QuestionKind::Homology, "K(C(5),1)", 5));
  r.check(same_value(a.value, Z5), "H_5(K(C_5,1)) = " + value_text(a.value));
  r.check(contains(a.provenance, "grouphom"), "H_5(K(C_5,1)) not routed to group homology");

  a = broker->ask(question(QuestionKind::Homotopy, "S(4)", 4));
  r.check(same_value(a.value, Z), "pi_4(S4) = " + value_text(a.value));
  std::vector<hes::SubQuestion> subs;
  if (a.trace_id) {
    const auto stored = broker->trace(*a.trace_id);
    for (const auto& s : stored->trace.steps) subs.insert(subs.end(), s.subquestions.begin(), s.subquestions.end());
  }
  r.check(subs.size() == 1 && subs[0].degree == 4 && subs[0].subject == space("S(4)") &&
              subs[0].answer == Z,
          "pi_4(S4) trace does not hold exactly one sub-question H_4(S4) = Z");
  return r;
}

inline std::vector<topo::Question> memo_questions() {
  using topo::QuestionKind;
  return {
      question(QuestionKind::Homology, "C(5)", 5),
      question(QuestionKind::Homology, "K(C(5),1)", 5),
      question(QuestionKind::Homotopy, "D(4)*D(5)", 4),
      question(QuestionKind::Homotopy, "S(4)", 4),
      question(QuestionKind::Homology, "RP2", 1),
      question(QuestionKind::Homology, "RP2", 2),
      question(QuestionKind::Homology, "S(2)", 2),
      question(QuestionKind::Homology, "C(2)*C(3)", 3),
      question(QuestionKind::Homotopy, "S(4)", 2),
      question(QuestionKind::Homotopy, "S(4)", 5),
      question(QuestionKind::Homotopy, "K(C(5),3)", 3),
      question(QuestionKind::Homology, "S(1)*S(1)", 1),
      question(QuestionKind::Homology, "S(1)*S(1)", 2),
      question(QuestionKind::Homotopy, "S(2)*S(2)", 2),
      question(QuestionKind::Certify, "0 1 2 3; 1 2 3 0; 2 3 0 1; 3 0 1 2", 0),
      question(QuestionKind::Certify, "0 1 2 3; 1 3 3 0; 2 3 0 1; 3 0 1 2", 0),
      question(QuestionKind::Homology, "D(3)", 0),
      question(QuestionKind::Homology, "S(3)", 3),
      question(QuestionKind::Homology, "C(4)", 4),
      question(QuestionKind::Homotopy, "D(3)", 1),
  };
}

inline SuiteResult memo_suite() {
  using namespace topo;
  SuiteResult r;
  auto broker = make_default_broker();
  const auto questions = memo_questions();
  std::vector<Answer> first;
  for (const auto& q : questions) first.push_back(broker->ask(q));
  const Stats before = broker->stats();
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const Answer again = broker->ask(questions[i]);
    const std::string tag = questions[i].text();
    r.check(again.cached, tag + ": second answer not cached");
    r.check(same_value(again.value, first[i].value), tag + ": cached value differs");
    r.check(again.provenance == first[i].provenance, tag + ": cached provenance differs");
  }
  const Stats after = broker->stats();
  for (std::size_t k = 0; k < after.kernels.size(); ++k)
    r.check(after.kernels[k].invocations == before.kernels[k].invocations,
            "kernel " + after.kernels[k].name + " invoked during the cached round");
  r.check(after.hits == before.hits + questions.size(), "hit counter did not advance by 20");
  r.check(after.misses == before.misses, "miss counter changed during the cached round");
  return r;
}

// ---------------------------------------------------------------------------
// Homotopy expert system

inline topo::hes::HomologyOracle broker_oracle(topo::Broker& broker) {
  return [&broker](const topo::Term& subject, int n) -> std::optional<topo::FgAbelianGroup> {
    const auto a = broker.ask(topo::Question{topo::QuestionKind::Homology, subject, n});
    if (auto* g = std::get_if<topo::FgAbelianGroup>(&a.value)) return *g;
    return std::nullopt;
  };
}

struct HesCase {
  std::string subject;
  int degree;
  std::optional<std::string> expected;  // nullopt: must stay unknown
};

inline std::vector<HesCase> hes_cases() {
  return {
      {"D(4)*D(5)", 4, "0"}, {"S(4)", 4, "Z"},        {"S(4)", 2, "0"},
      {"S(4)", 5, std::nullopt}, {"S(2)*S(2)", 2, "Z^2"}, {"K(C(5),3)", 3, "Z/5"},
      {"K(C(5),3)", 2, "0"}, {"D(3)", 1, "0"},        {"S(3)*S(3)", 3, "Z^2"},
      {"S(2)", 3, std::nullopt}, {"RP2", 2, std::nullopt}, {"S(1)", 1, std::nullopt},
      {"S(5)*D(2)", 5, "Z"}, {"S(6)*S(6)", 3, "0"},
  };
}

inline SuiteResult hes_soundness_suite() {
  using namespace topo;
  SuiteResult r;
  auto broker = make_default_broker();
  const auto& rules = hes::RuleBase::builtin();
  for (const auto& c : hes_cases()) {
    const Term subject = space(c.subject);
    const std::string tag = "pi_" + std::to_string(c.degree) + "(" + c.subject + ")";
    const auto initial = hes::structural_facts(subject);
    const auto inf = hes::infer(rules, subject, c.degree, initial, broker_oracle(*broker));
    const std::string got = inf.value ? inf.value->to_string() : "unknown";
    r.check(got == c.expected.value_or("unknown"), tag + " = " + got);

    std::optional<hes::Fact> last;
    try {
      last = hes::replay(rules, initial, inf.trace);
    } catch (const Error& e) {
      r.check(false, tag + ": replay failed: " + e.what());
      continue;
    }
    if (inf.value) {
      const bool reproduces = last && last->property == hes::Property::Homotopy &&
                              last->subject() == subject &&
                              std::get<hes::Degree>(last->args[1]) == hes::Degree(c.degree) &&
                              last->value && std::get<FgAbelianGroup>(*last->value) == *inf.value;
      r.check(reproduces, tag + ": replay does not end in the answer fact");
    } else {
      r.check(true, tag + ": replayed");
    }

    const auto again = hes::infer(rules, subject, c.degree, initial, broker_oracle(*broker));
    r.check(again.value == inf.value && hes::explain(again.trace) == hes::explain(inf.trace),
            tag + ": inference is not deterministic");

    auto extended = initial;
    for (const auto& f : hes::structural_facts(space("S(7)*D(2)"))) extended.push_back(f);
    const auto wider = hes::infer(rules, subject, c.degree, extended, broker_oracle(*broker));
    r.check(wider.value == inf.value, tag + ": unrelated facts changed the answer");
  }
  return r;
}

/// Random constructor expressions of depth <= 5 and degrees <= 10 must halt
/// well inside the fuel budget.
inline SuiteResult hes_termination_suite(int count, std::uint64_t seed) {
  using namespace topo;
  SuiteResult r;
  std::mt19937_64 rng(seed);
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::function<SpaceExpr(int)> gen = [&](int depth) -> SpaceExpr {
    switch (depth <= 1 ? pick(0, 3) : pick(0, 5)) {
      case 0: return SpaceExpr::sphere(pick(1, 6));
      case 1: return SpaceExpr::simplex(pick(0, 6));
      case 2: return SpaceExpr::rp2();
      case 3: return SpaceExpr::em_space(GroupExpr::cyclic(pick(2, 7)), pick(1, 4));
      default: return SpaceExpr::product(gen(depth - 1), gen(depth - 1));
    }
  };
  // Spheres answer from the closed form; everything else stays unknown.
  hes::HomologyOracle oracle = [](const Term& s, int n) -> std::optional<FgAbelianGroup> {
    if (!s.is_apply_of("algtop1", "sphere")) return std::nullopt;
    const auto dim = std::get<SpaceExpr::Sphere>(space_from_term(s).node()).dim;
    return (n == 0 || n == dim) ? FgAbelianGroup::integers() : FgAbelianGroup{};
  };
  hes::InferenceOptions options;
  for (int i = 0; i < count; ++i) {
    const Term subject = to_term(gen(pick(1, 5)));
    const int n = pick(0, 10);
    try {
      const auto inf = hes::infer(hes::RuleBase::builtin(), subject, n, hes::structural_facts(subject),
                                  oracle, options);
      r.check(inf.firings < options.fuel, "fuel exhausted on " + to_compact(subject));
      hes::replay(hes::RuleBase::builtin(), hes::structural_facts(subject), inf.trace);
    } catch (const Error& e) {
      r.check(false, to_compact(subject) + " degree " + std::to_string(n) + ": " + e.what());
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Certifier

/// Direct evaluation of one axiom at one tuple.
inline bool violates(const topo::MultiplicationTable& t, const std::string& axiom,
                     const std::vector<long long>& x) {
  const auto n = static_cast<long long>(t.order());
  auto in = [n](long long v) { return v >= 0 && v < n; };
  auto op = [&t](long long a, long long b) { return t.at(std::size_t(a), std::size_t(b)); };
  for (auto v : x)
    if (!in(v)) return false;
  const long long e = t.identity();
  if (axiom == "closure") return x.size() == 2 && !in(op(x[0], x[1]));
  if (axiom == "associativity") {
    if (x.size() != 3) return false;
    const long long ab = op(x[0], x[1]), bc = op(x[1], x[2]);
    return in(ab) && in(bc) && op(ab, x[2]) != op(x[0], bc);
  }
  if (axiom == "identity") return x.size() == 1 && (op(e, x[0]) != x[0] || op(x[0], e) != x[0]);
  if (axiom == "inverse") {
    if (x.size() != 1) return false;
    for (long long y = 0; y < n; ++y)
      if (op(x[0], y) == e && op(y, x[0]) == e) return false;
    return true;
  }
  return false;
}

inline bool is_group(const topo::MultiplicationTable& t) {
  const auto n = static_cast<long long>(t.order());
  for (long long a = 0; a < n; ++a) {
    if (violates(t, "identity", {a}) || violates(t, "inverse", {a})) return false;
    for (long long b = 0; b < n; ++b) {
      if (violates(t, "closure", {a, b})) return false;
      for (long long c = 0; c < n; ++c)
        if (violates(t, "associativity", {a, b, c})) return false;
    }
  }
  return true;
}

inline SuiteResult certifier_suite(int mutations, std::uint64_t seed) {
  using namespace topo;
  SuiteResult r;
  for (int n = 1; n <= 12; ++n)
    r.check(check(MultiplicationTable::cyclic(n)).certified, "Z/" + std::to_string(n) + " does not certify");

  std::mt19937_64 rng(seed);
  int still_groups = 0;
  for (int i = 0; i < mutations; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 12)(rng);
    auto t = MultiplicationTable::cyclic(n);
    const auto a = std::uniform_int_distribution<std::size_t>(0, std::size_t(n) - 1)(rng);
    const auto b = std::uniform_int_distribution<std::size_t>(0, std::size_t(n) - 1)(rng);
    // Occasionally write an element outside the carrier.
    long long v = std::uniform_int_distribution<long long>(0, n)(rng);
    if (v == t.at(a, b)) v = (v + 1) % n;
    t.set(a, b, v);
    const std::string tag = "Z/" + std::to_string(n) + " with (" + std::to_string(a) + "," +
                            std::to_string(b) + ")=" + std::to_string(v);
    const auto report = check(t);
    if (report.certified) {
      ++still_groups;
      r.check(is_group(t), tag + ": certified but is not a group");
      continue;
    }
    r.check(!is_group(t), tag + ": rejected a group");
    for (const auto& o : report.obligations) {
      if (o.holds) continue;
      r.check(o.counterexample && violates(t, o.axiom, *o.counterexample),
              tag + ": counterexample does not violate " + o.axiom);
    }
  }
  r.check(still_groups < mutations, "no mutation was ever rejected");
  return r;
}

// ---------------------------------------------------------------------------
// Wire

inline std::string random_payload(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "a", "<", ">", "?", "\n", " ", "<?scscp", " start ?>", "end", "<OMOBJ>", "\xe2\x84\xa4", "\r"};
  std::string s;
  const int n = std::uniform_int_distribution<int>(0, 40)(rng);
  for (int i = 0; i < n; ++i)
    s += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(rng)];
  return s;
}

inline bool contains_delimiter(const std::string& s) {
  return s.find("<?scscp start ?>") != std::string::npos ||
         s.find("<?scscp end ?>") != std::string::npos;
}

inline SuiteResult wire_suite(int payloads, std::uint64_t seed, const std::string& golden_path) {
  using namespace topo::wire;
  SuiteResult r;
  std::mt19937_64 rng(seed);
  std::string stream_bytes;
  std::vector<std::string> sent;
  while (static_cast<int>(sent.size()) < payloads) {
    const std::string p = random_payload(rng);
    if (contains_delimiter(p)) continue;
    StringStream s(frame(p));
    Reader reader(s);
    const auto back = deframe(reader);
    r.check(back == p, "frame/deframe changed payload " + std::to_string(sent.size()));
    stream_bytes += frame(p);
    sent.push_back(p);
  }
  StringStream all(stream_bytes);
  Reader reader(all);
  bool stream_ok = true;
  for (const auto& p : sent) stream_ok &= deframe(reader) == p;
  r.check(stream_ok && !reader.next_frame(), "back-to-back frames did not deframe in order");

  const auto first = run_wire_session();
  const auto second = run_wire_session();
  r.check(first.transcript == second.transcript, "session transcript differs across runs");
  r.check(first.transcript == read_file(golden_path), "session transcript differs from the golden");
  r.check(first.replies.size() == 2 && first.replies[0].kind == Message::Kind::Completed,
          "call c1 was not completed");
  r.check(first.replies.size() == 2 && first.replies[1].kind == Message::Kind::Terminated &&
              first.replies[1].error_code == "unknown_procedure",
          "unknown procedure was not reported");

  auto [a, b] = socket_pair();
  bool server_refused = false;
  std::thread server([&server_refused, s = std::move(b)]() mutable {
    Connection conn(std::move(s));
    try {
      negotiate_server(conn);
    } catch (const ProtocolError&) {
      server_refused = true;
    }
  });
  Connection client(std::move(a));
  negotiate_client(client, "9.9");
  const auto quit = client.recv_line();
  const bool closed = !client.recv_line();
  server.join();
  r.check(server_refused && quit == std::optional<std::string>("<?scscp quit reason=\"unsupported version\" ?>") &&
              closed,
          "unsupported version was not refused with quit and close");
  return r;
}

// ---------------------------------------------------------------------------
// CLI

inline std::string run_cli(const std::vector<std::string>& args, int* code = nullptr) {
  std::ostringstream out, err;
  const int rc = topo::cli::run(args, out, err);
  if (code) *code = rc;
  return out.str() + err.str();
}

inline std::string demo_script_path() { return std::string(TOPO_DATA_DIR) + "/demo.script"; }
inline std::string demo_golden_path() { return std::string(TOPO_GOLDEN_DIR) + "/demo_transcript.txt"; }

}  // namespace support
