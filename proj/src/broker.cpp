#include "topo/broker.hpp"

#include "topo/compact.hpp"
#include "topo/expr.hpp"

#include <algorithm>

namespace topo {

std::string_view kind_name(QuestionKind k) {
  switch (k) {
    case QuestionKind::Homology: return "homology";
    case QuestionKind::Homotopy: return "homotopy";
    case QuestionKind::Certify: return "certify";
  }
  return "?";
}

QuestionKind parse_kind(std::string_view name) {
  if (name == "homology") return QuestionKind::Homology;
  if (name == "homotopy") return QuestionKind::Homotopy;
  if (name == "certify") return QuestionKind::Certify;
  throw UserError("unknown question kind '" + std::string(name) +
                  "' (expected homology, homotopy or certify)");
}

Term Question::to_term() const {
  switch (kind) {
    case QuestionKind::Homology: return apply("algtop1", "homology", {subject, integer(degree)});
    case QuestionKind::Homotopy:
      return apply("algtop1", "homotopy_group", {subject, integer(degree)});
    case QuestionKind::Certify: return apply("cert1", "certify", {subject});
  }
  throw UserError("bad question kind");
}

std::string Question::key() const { return canonical_key(to_term()); }

std::string Question::text() const {
  switch (kind) {
    case QuestionKind::Homology:
      return "H_" + std::to_string(degree) + "(" + to_compact(subject) + ")";
    case QuestionKind::Homotopy:
      return "pi_" + std::to_string(degree) + "(" + to_compact(subject) + ")";
    case QuestionKind::Certify: {
      const auto n = std::to_string(table_from_term(subject).order());
      return "certify(" + n + "x" + n + " table)";
    }
  }
  return "?";
}

namespace {

int degree_of(const Term& t) {
  if (!t.is<Integer>()) throw UserError("degree must be an integer");
  const BigInt& v = t.as<Integer>().value;
  if (v < 0) throw UserError("degree must be non-negative");
  if (v > 1000) throw UserError("degree " + v.str() + " is too large");
  return static_cast<int>(v);
}

}  // namespace

Question question_from_term(const Term& t) {
  Question q;
  if (t.is_apply_of("algtop1", "homology") || t.is_apply_of("algtop1", "homotopy_group")) {
    const auto& a = t.as<Apply>().args;
    q.kind = t.is_apply_of("algtop1", "homology") ? QuestionKind::Homology
                                                   : QuestionKind::Homotopy;
    q.subject = a[0];
    q.degree = degree_of(a[1]);
  } else if (t.is_apply_of("cert1", "certify")) {
    q.kind = QuestionKind::Certify;
    q.subject = t.as<Apply>().args[0];
  } else {
    throw UserError("not a question term");
  }
  validate(q);
  return q;
}

void validate(const Question& q) {
  if (q.degree < 0) throw UserError("degree must be non-negative");
  switch (q.kind) {
    case QuestionKind::Homology:
      subject_from_term(q.subject);
      break;
    case QuestionKind::Homotopy:
      if (is_group_term(q.subject))
        throw UserError("homotopy questions need a space, not a group");
      space_from_term(q.subject);
      break;
    case QuestionKind::Certify:
      table_from_term(q.subject);
      break;
  }
}

// ---------------------------------------------------------------------------

Term group_term(const FgAbelianGroup& g) {
  std::vector<Term> torsion;
  for (const auto& d : g.torsion()) torsion.push_back(integer(d));
  return apply("res1", "fg_abelian",
               {integer(static_cast<long long>(g.rank())), make_list(std::move(torsion))});
}

FgAbelianGroup group_from_result(const Term& t) {
  if (!t.is_apply_of("res1", "fg_abelian")) throw TermError("expected res1.fg_abelian");
  const auto& a = t.as<Apply>().args;
  if (!a[0].is<Integer>() || a[0].as<Integer>().value < 0 ||
      a[0].as<Integer>().value > 1000000)
    throw TermError("bad rank in res1.fg_abelian");
  std::vector<BigInt> torsion;
  for (const auto& d : list_items(a[1])) {
    if (!d.is<Integer>() || d.as<Integer>().value < 2)
      throw TermError("torsion coefficients must be integers >= 2");
    torsion.push_back(d.as<Integer>().value);
  }
  FgAbelianGroup g(static_cast<std::size_t>(a[0].as<Integer>().value), torsion);
  if (g.torsion() != torsion) throw TermError("torsion is not in invariant-factor form");
  return g;
}

Term value_term(const AnswerValue& v) {
  return std::visit(
      [](const auto& x) -> Term {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FgAbelianGroup>) return group_term(x);
        else if constexpr (std::is_same_v<T, Unknown>) return sym("res1", "unknown");
        else return to_term(x);
      },
      v);
}

AnswerValue value_from_term(const Term& t) {
  if (t.is_symbol("res1", "unknown")) return Unknown{};
  if (t.is_apply_of("cert1", "report")) return report_from_term(t);
  return group_from_result(t);
}

std::string value_text(const AnswerValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FgAbelianGroup>) return x.to_string();
        else if constexpr (std::is_same_v<T, Unknown>) return "unknown";
        else return x.status();
      },
      v);
}

// ---------------------------------------------------------------------------

std::string_view tri_name(Tri t) {
  switch (t) {
    case Tri::Yes: return "yes";
    case Tri::No: return "no";
    case Tri::Unknown: return "unknown";
  }
  return "?";
}

namespace {

Decoration decorate_space(const SpaceExpr& s) {
  Decoration d;
  std::visit(
      [&d](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpaceExpr::Sphere>) {
          d.contractible = Tri::No;
          d.connectivity = hes::Degree(n.dim - 1);
          d.dim_bound = n.dim;
        } else if constexpr (std::is_same_v<T, SpaceExpr::Simplex>) {
          d.contractible = Tri::Yes;
          d.connectivity = hes::Degree::infinity();
          d.dim_bound = n.dim;
        } else if constexpr (std::is_same_v<T, SpaceExpr::Rp2>) {
          d.contractible = Tri::No;
          d.connectivity = hes::Degree(0);
          d.dim_bound = 2;
        } else if constexpr (std::is_same_v<T, SpaceExpr::Product>) {
          Decoration l = decorate_space(*n.lhs), r = decorate_space(*n.rhs);
          if (l.contractible == Tri::Yes && r.contractible == Tri::Yes)
            d.contractible = Tri::Yes;
          else if (l.contractible == Tri::No || r.contractible == Tri::No)
            d.contractible = Tri::No;
          d.connectivity = *r.connectivity < *l.connectivity ? *r.connectivity : *l.connectivity;
          if (l.dim_bound && r.dim_bound) d.dim_bound = *l.dim_bound + *r.dim_bound;
        } else {
          if (abelian_group(n.group).is_trivial()) {
            d.contractible = Tri::Yes;
            d.connectivity = hes::Degree::infinity();
          } else {
            d.contractible = Tri::No;
            d.connectivity = hes::Degree(n.level - 1);
          }
        }
      },
      s.node());
  return d;
}

}  // namespace

Decoration decorate(const Term& expr) {
  if (is_group_term(expr)) {
    group_from_term(expr);
    Decoration d;
    d.object_kind = Decoration::Kind::Group;
    return d;
  }
  return decorate_space(space_from_term(expr));
}

// ---------------------------------------------------------------------------

void Broker::register_kernel(std::shared_ptr<Kernel> kernel) {
  const std::string name = kernel->name();
  for (const auto& k : kernels_)
    if (k.kernel->name() == name)
      throw RegistrationError("kernel '" + name + "' is already registered");
  kernels_.push_back({std::move(kernel), std::make_unique<std::atomic<std::uint64_t>>(0)});
}

const Broker::Registered& Broker::route_entry(const Question& q) const {
  for (const auto& k : kernels_)
    if (k.kernel->accepts(q)) return k;
  throw UnroutableError("no kernel answers " + std::string(kind_name(q.kind)) +
                        " questions about " + to_compact(q.subject));
}

std::string Broker::route(const Question& q) const {
  validate(q);
  return route_entry(q).kernel->name();
}

Answer Broker::ask(const Question& q) {
  validate(q);
  std::vector<std::string> stack;
  return ask_within(q, stack);
}

Answer Broker::ask_within(const Question& q, std::vector<std::string>& stack) {
  const std::string key = q.key();
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++*it->second.hits;
      ++hits_;
      Answer a = it->second.answer;
      a.cached = true;
      return a;
    }
  }
  if (std::find(stack.begin(), stack.end(), key) != stack.end())
    throw CycleError("sub-question cycle: " + q.text() + " depends on itself");
  if (stack.size() >= kMaxDepth)
    throw CycleError("sub-question depth exceeds " + std::to_string(kMaxDepth) + " at " +
                     q.text());

  const Registered& entry = route_entry(q);
  Kernel& kernel = *entry.kernel;
  ++*entry.invocations;
  ++misses_;

  std::vector<std::string> provenance{kernel.name()};
  SubAsk sub = [&](const Question& sq) {
    validate(sq);
    Answer a = ask_within(sq, stack);
    for (const auto& p : a.provenance)
      if (std::find(provenance.begin(), provenance.end(), p) == provenance.end())
        provenance.push_back(p);
    return a;
  };

  stack.push_back(key);
  KernelResult result;
  try {
    result = kernel.solve(q, sub);
  } catch (const CycleError&) {
    stack.pop_back();
    throw;
  } catch (const KernelError&) {
    stack.pop_back();
    throw;
  } catch (const ComputationError& e) {
    stack.pop_back();
    throw KernelError(kernel.name(), e.what());
  } catch (...) {
    stack.pop_back();
    throw;
  }
  stack.pop_back();

  Answer answer{std::move(result.value), std::move(provenance), std::nullopt, false};
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second.answer;
  if (result.trace) {
    const std::string id = "t" + std::to_string(next_trace_++);
    traces_.emplace(id, StoredTrace{id, q.text(), std::move(*result.trace)});
    answer.trace_id = id;
  }
  cache_.emplace(key, CacheEntry{q.text(), answer, std::make_unique<std::atomic<std::uint64_t>>(0)});
  cache_order_.push_back(key);
  return answer;
}

ObjectRecord Broker::new_object(const Term& expr) {
  validate(expr);
  Decoration d = decorate(expr);
  std::lock_guard lock(mutex_);
  ObjectRecord rec{"o" + std::to_string(next_object_++), expr, d};
  objects_.emplace(rec.id, rec);
  return rec;
}

std::optional<ObjectRecord> Broker::object(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = objects_.find(id);
  if (it == objects_.end()) return std::nullopt;
  return it->second;
}

std::optional<StoredTrace> Broker::trace(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = traces_.find(id);
  if (it == traces_.end()) return std::nullopt;
  return it->second;
}

Stats Broker::stats() const {
  Stats s;
  for (const auto& k : kernels_)
    s.kernels.push_back({k.kernel->name(), k.kernel->transport(), k.invocations->load()});
  std::lock_guard lock(mutex_);
  s.cache_size = cache_.size();
  s.hits = hits_;
  s.misses = misses_;
  for (const auto& key : cache_order_) {
    const auto& e = cache_.at(key);
    s.entries.push_back({e.question, e.hits->load()});
  }
  return s;
}

}  // namespace topo
