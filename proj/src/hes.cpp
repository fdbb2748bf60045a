#include "topo/hes.hpp"

#include "topo/compact.hpp"
#include "topo/expr.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <unordered_map>

namespace topo::hes {

std::string Degree::to_string() const {
  return infinite_ ? "inf" : std::to_string(value_);
}

std::string to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Degree>) return x.to_string();
        else if constexpr (std::is_same_v<T, FgAbelianGroup>) return x.to_string();
        else return to_compact(x);
      },
      v);
}

namespace {

std::string value_key(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Degree>) return "d" + x.to_string();
        else if constexpr (std::is_same_v<T, FgAbelianGroup>) return "g" + x.to_string();
        else return "t" + canonical_key(x);
      },
      v);
}

bool value_equal(const Value& a, const Value& b) { return value_key(a) == value_key(b); }

}  // namespace

std::string_view property_name(Property p) {
  switch (p) {
    case Property::Contractible: return "contractible";
    case Property::Connectivity: return "connectivity";
    case Property::Homotopy: return "homotopy";
    case Property::Homology: return "homology";
    case Property::IsSphere: return "is_sphere";
    case Property::IsSimplex: return "is_simplex";
    case Property::IsProduct: return "is_product";
    case Property::IsEmSpace: return "is_em_space";
  }
  return "?";
}

std::string Fact::instance_key() const {
  std::string key(property_name(property));
  for (const auto& a : args) key += '|' + value_key(a);
  return key;
}

std::string Fact::to_string() const {
  const std::string s = hes::to_string(args.front());
  switch (property) {
    case Property::Contractible:
      return "contractible(" + s + ")";
    case Property::Connectivity:
      return "connectivity(" + s + ") >= " + hes::to_string(*value);
    case Property::Homotopy:
      return "pi_" + hes::to_string(args[1]) + "(" + s + ") = " + hes::to_string(*value);
    case Property::Homology:
      return "H_" + hes::to_string(args[1]) + "(" + s + ") = " + hes::to_string(*value);
    default: {
      std::string out = std::string(property_name(property)) + "(" + s;
      for (std::size_t i = 1; i < args.size(); ++i) out += ", " + hes::to_string(args[i]);
      return out + ")";
    }
  }
}

bool operator==(const Fact& a, const Fact& b) {
  if (a.instance_key() != b.instance_key()) return false;
  if (a.value.has_value() != b.value.has_value()) return false;
  return !a.value || value_equal(*a.value, *b.value);
}

std::vector<Fact> structural_facts(const Term& subject) {
  std::vector<Fact> out;
  auto visit = [&out](const Term& t, const auto& self) -> void {
    const SpaceExpr s = space_from_term(t);
    if (auto* sp = std::get_if<SpaceExpr::Sphere>(&s.node())) {
      out.push_back({Property::IsSphere, {t, Degree(sp->dim)}, std::nullopt});
    } else if (auto* sx = std::get_if<SpaceExpr::Simplex>(&s.node())) {
      out.push_back({Property::IsSimplex, {t, Degree(sx->dim)}, std::nullopt});
    } else if (std::holds_alternative<SpaceExpr::Product>(s.node())) {
      const auto& args = t.as<Apply>().args;
      out.push_back({Property::IsProduct, {t, args[0], args[1]}, std::nullopt});
      self(args[0], self);
      self(args[1], self);
    } else if (auto* em = std::get_if<SpaceExpr::EmSpace>(&s.node())) {
      out.push_back(
          {Property::IsEmSpace, {t, to_term(em->group), Degree(em->level)}, std::nullopt});
    }
  };
  visit(subject, visit);
  return out;
}

namespace {

std::vector<std::string> subexpression_keys(const Term& subject) {
  std::vector<std::string> keys;
  auto visit = [&keys](const Term& t, const auto& self) -> void {
    keys.push_back(canonical_key(t));
    if (t.is_apply_of("algtop1", "cartesian_product"))
      for (const auto& a : t.as<Apply>().args) self(a, self);
  };
  visit(subject, visit);
  return keys;
}

// ---------------------------------------------------------------------------
// Expression evaluation

[[noreturn]] void type_error(const std::string& what) {
  throw ComputationError("rule evaluation: " + what);
}

Value evaluate(const Expr& e, const Bindings& b) {
  switch (e.kind) {
    case Expr::Kind::Var: {
      auto it = b.find(e.var);
      if (it == b.end()) type_error("unbound variable ?" + e.var);
      return it->second;
    }
    case Expr::Kind::Int:
      return Degree(e.number);
    case Expr::Kind::Inf:
      return Degree::infinity();
    case Expr::Kind::Add: {
      Value l = evaluate(e.operands[0], b), r = evaluate(e.operands[1], b);
      if (auto* dl = std::get_if<Degree>(&l)) {
        auto* dr = std::get_if<Degree>(&r);
        if (!dr) type_error("'+' mixes a degree and a group");
        if (dl->infinite() || dr->infinite()) return Degree::infinity();
        return Degree(dl->value() + dr->value());
      }
      auto* gl = std::get_if<FgAbelianGroup>(&l);
      auto* gr = std::get_if<FgAbelianGroup>(&r);
      if (!gl || !gr) type_error("'+' needs two degrees or two groups");
      return direct_sum(*gl, *gr);
    }
    case Expr::Kind::Sub: {
      Value l = evaluate(e.operands[0], b), r = evaluate(e.operands[1], b);
      auto* dl = std::get_if<Degree>(&l);
      auto* dr = std::get_if<Degree>(&r);
      if (!dl || !dr || dr->infinite()) type_error("'-' needs a degree and a finite degree");
      if (dl->infinite()) return Degree::infinity();
      return Degree(dl->value() - dr->value());
    }
    case Expr::Kind::Min: {
      Value l = evaluate(e.operands[0], b), r = evaluate(e.operands[1], b);
      auto* dl = std::get_if<Degree>(&l);
      auto* dr = std::get_if<Degree>(&r);
      if (!dl || !dr) type_error("min needs two degrees");
      return *dr < *dl ? *dr : *dl;
    }
  }
  type_error("bad expression");
}

FgAbelianGroup as_group(const Value& v) {
  if (auto* g = std::get_if<FgAbelianGroup>(&v)) return *g;
  if (auto* d = std::get_if<Degree>(&v)) {
    if (!d->infinite() && d->value() == 0) return FgAbelianGroup::zero();
    type_error("degree " + d->to_string() + " used as a group");
  }
  const Term& t = std::get<Term>(v);
  if (!is_group_term(t)) type_error("space used as a group");
  return abelian_group(group_from_term(t));
}

Degree as_degree(const Value& v) {
  if (auto* d = std::get_if<Degree>(&v)) return *d;
  type_error("expected a degree");
}

bool holds(const Guard& g, const Bindings& b) {
  const Degree l = as_degree(evaluate(g.lhs, b));
  const Degree r = as_degree(evaluate(g.rhs, b));
  switch (g.op) {
    case Guard::Op::Ge: return !(l < r);
    case Guard::Op::Gt: return r < l;
    case Guard::Op::Le: return !(r < l);
    case Guard::Op::Lt: return l < r;
    case Guard::Op::Eq: return l == r;
    case Guard::Op::Ne: return !(l == r);
  }
  return false;
}

/// Consequent fact for the given bindings, with property-specific value
/// coercions applied.
Fact instantiate(const Pattern& p, const Bindings& b) {
  Fact f{p.property, {}, std::nullopt};
  for (std::size_t i = 0; i < p.args.size(); ++i) {
    Value v = evaluate(p.args[i], b);
    if (i == 0 && !std::holds_alternative<Term>(v)) type_error("fact subject must be a space");
    f.args.push_back(std::move(v));
  }
  if (p.value) {
    Value v = evaluate(*p.value, b);
    if (p.property == Property::Homotopy || p.property == Property::Homology)
      f.value = as_group(v);
    else if (p.property == Property::Connectivity)
      f.value = as_degree(v);
    else
      f.value = std::move(v);
  }
  return f;
}

bool is_subqueryable(const Rule& r, const Pattern& p) {
  return r.may_subquery && p.property == Property::Homology && p.value &&
         p.value->kind == Expr::Kind::Var;
}

// ---------------------------------------------------------------------------

class WorkingMemory {
 public:
  explicit WorkingMemory(std::vector<std::string> subjects)
      : subjects_(std::move(subjects)) {}

  bool in_scope(const Fact& f) const {
    const std::string key = canonical_key(f.subject());
    return std::find(subjects_.begin(), subjects_.end(), key) != subjects_.end();
  }

  /// Returns the fact's timestamp. A fact whose instance is already known
  /// keeps its existing timestamp.
  std::size_t add(Fact f, int producer) {
    const std::string key = f.instance_key();
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const std::size_t id = facts_.size();
    by_property_[static_cast<std::size_t>(f.property)].push_back(id);
    index_.emplace(key, id);
    facts_.push_back(std::move(f));
    producers_.push_back(producer);
    return id;
  }

  const Fact* lookup(const std::string& instance_key, std::size_t* id = nullptr) const {
    auto it = index_.find(instance_key);
    if (it == index_.end()) return nullptr;
    if (id) *id = it->second;
    return &facts_[it->second];
  }

  bool contains(const std::string& instance_key) const { return index_.count(instance_key); }

  const std::vector<std::size_t>& with_property(Property p) const {
    return by_property_[static_cast<std::size_t>(p)];
  }
  const Fact& at(std::size_t id) const { return facts_[id]; }
  int producer(std::size_t id) const { return producers_[id]; }

 private:
  std::vector<std::string> subjects_;
  std::vector<Fact> facts_;
  std::vector<int> producers_;  // step index, or -1 for initial facts
  std::unordered_map<std::string, std::size_t> index_;
  std::array<std::vector<std::size_t>, 8> by_property_;
};

struct PendingQuery {
  std::size_t antecedent;
  Term subject;
  int degree;
  std::string var;
};

struct Activation {
  std::size_t rule = 0;
  Bindings bindings;
  std::vector<std::optional<std::size_t>> consumed;  // nullopt: pending query
  std::optional<PendingQuery> query;
  std::vector<std::size_t> recency;  // consumed ids, descending
  std::string identity;
};

// True if fact value `v` is compatible with antecedent slot `e`; binds
// variables as a side effect.
bool unify(const Expr& e, const Value& v, Bindings& b) {
  switch (e.kind) {
    case Expr::Kind::Var: {
      auto it = b.find(e.var);
      if (it == b.end()) {
        b.emplace(e.var, v);
        return true;
      }
      return value_equal(it->second, v);
    }
    case Expr::Kind::Int:
      return value_equal(Degree(e.number), v);
    case Expr::Kind::Inf:
      return value_equal(Degree::infinity(), v);
    default:
      return false;
  }
}

bool match_fact(const Pattern& p, const Fact& f, Bindings& b) {
  if (f.property != p.property) return false;
  for (std::size_t i = 0; i < p.args.size(); ++i)
    if (!unify(p.args[i], f.args[i], b)) return false;
  if (p.value) return f.value && unify(*p.value, *f.value, b);
  return true;
}

// Instance key of pattern `p` if all of its arguments are bound.
std::optional<std::string> bound_instance(const Pattern& p, const Bindings& b) {
  std::string key(property_name(p.property));
  for (const auto& a : p.args) {
    if (a.kind == Expr::Kind::Var && !b.count(a.var)) return std::nullopt;
    key += '|' + value_key(evaluate(a, b));
  }
  return key;
}

std::string activation_identity(const Rule& r, const Bindings& b) {
  std::string id = r.id;
  for (const auto& [k, v] : b) id += ";" + k + "=" + value_key(v);
  return id;
}

class Engine {
 public:
  Engine(const RuleBase& rules, const Term& subject, int degree,
         const HomologyOracle& oracle, InferenceOptions options)
      : rules_(rules),
        subject_(subject),
        degree_(degree),
        oracle_(oracle),
        options_(options),
        memory_(subexpression_keys(subject)) {}

  Inference run(const std::vector<Fact>& initial) {
    for (const auto& f : initial)
      if (memory_.in_scope(f)) memory_.add(f, -1);

    Inference result;
    while (auto act = select()) {
      if (++result.firings > options_.fuel)
        throw InferenceError("inference fuel exhausted", Trace{steps_});
      fire(std::move(*act));
    }

    Fact goal{Property::Homotopy, {subject_, Degree(degree_)}, std::nullopt};
    std::size_t goal_id = 0;
    if (const Fact* f = memory_.lookup(goal.instance_key(), &goal_id)) {
      result.value = std::get<FgAbelianGroup>(*f->value);
      result.trace = support_of(goal_id);
    } else {
      result.trace = Trace{steps_};
    }
    return result;
  }

 private:
  std::optional<Activation> select() {
    for (std::size_t r = 0; r < rules_.rules().size(); ++r) {
      std::vector<Activation> found;
      collect(r, found);
      if (found.empty()) continue;
      auto best = found.begin();
      for (auto it = found.begin() + 1; it != found.end(); ++it)
        if (it->recency > best->recency) best = it;
      return std::move(*best);
    }
    return std::nullopt;
  }

  void collect(std::size_t r, std::vector<Activation>& out) {
    const Rule& rule = rules_.rules()[r];
    Bindings b;
    enumerate_degrees(rule, r, 0, b, out);
  }

  void enumerate_degrees(const Rule& rule, std::size_t r, std::size_t i, Bindings& b,
                         std::vector<Activation>& out) {
    if (i == rule.degree_vars.size()) {
      Activation act;
      act.rule = r;
      act.consumed.assign(rule.antecedents.size(), std::nullopt);
      join(rule, 0, b, act, out);
      return;
    }
    for (int n = 0; n <= degree_ + 1; ++n) {
      b[rule.degree_vars[i]] = Degree(n);
      enumerate_degrees(rule, r, i + 1, b, out);
    }
    b.erase(rule.degree_vars[i]);
  }

  bool guards_hold_when_bound(const Rule& rule, const Bindings& b) const {
    for (const auto& g : rule.guards) {
      std::set<std::string> vars;
      auto collect_vars = [&vars](const Expr& e, const auto& self) -> void {
        if (e.kind == Expr::Kind::Var) vars.insert(e.var);
        for (const auto& o : e.operands) self(o, self);
      };
      collect_vars(g.lhs, collect_vars);
      collect_vars(g.rhs, collect_vars);
      bool bound = std::all_of(vars.begin(), vars.end(),
                               [&b](const std::string& v) { return b.count(v) > 0; });
      if (bound && !holds(g, b)) return false;
    }
    return true;
  }

  void join(const Rule& rule, std::size_t i, const Bindings& b, Activation& act,
            std::vector<Activation>& out) {
    if (!guards_hold_when_bound(rule, b)) return;
    if (i == rule.antecedents.size()) {
      finish(rule, b, act, out);
      return;
    }
    const Pattern& p = rule.antecedents[i];
    if (auto key = bound_instance(p, b)) {
      std::size_t id = 0;
      if (const Fact* f = memory_.lookup(*key, &id)) {
        Bindings next = b;
        if (match_fact(p, *f, next)) {
          act.consumed[i] = id;
          join(rule, i + 1, next, act, out);
          act.consumed[i].reset();
        }
        return;
      }
      if (is_subqueryable(rule, p) && !act.query && !b.count(p.value->var)) {
        const Degree n = as_degree(evaluate(p.args[1], b));
        if (n.infinite()) return;
        act.query = PendingQuery{i, std::get<Term>(evaluate(p.args[0], b)),
                                 static_cast<int>(n.value()), p.value->var};
        join(rule, i + 1, b, act, out);
        act.query.reset();
      }
      return;
    }
    for (std::size_t id : memory_.with_property(p.property)) {
      Bindings next = b;
      if (!match_fact(p, memory_.at(id), next)) continue;
      act.consumed[i] = id;
      join(rule, i + 1, next, act, out);
      act.consumed[i].reset();
    }
  }

  void finish(const Rule& rule, const Bindings& b, const Activation& act,
              std::vector<Activation>& out) {
    for (const auto& g : rule.guards)
      if (!holds(g, b)) return;
    // Refraction: never re-derive a known instance.
    if (auto key = bound_instance(rule.consequent, b); key && memory_.contains(*key)) return;
    std::string identity = activation_identity(rule, b);
    if (exhausted_.count(identity)) return;
    Activation a = act;
    a.bindings = b;
    a.identity = std::move(identity);
    for (const auto& c : a.consumed)
      if (c) a.recency.push_back(*c);
    std::sort(a.recency.rbegin(), a.recency.rend());
    out.push_back(std::move(a));
  }

  void fire(Activation act) {
    const Rule& rule = rules_.rules()[act.rule];
    TraceStep step{rule.id, rule.cite, {}, {}, {}, {}};
    const int step_index = static_cast<int>(steps_.size());
    if (act.query) {
      std::optional<FgAbelianGroup> answer;
      try {
        answer = oracle_(act.query->subject, act.query->degree);
      } catch (const std::exception& e) {
        throw InferenceError(std::string("sub-question failed: ") + e.what(),
                             Trace{steps_});
      }
      if (!answer) {
        exhausted_.insert(act.identity);
        unanswered_.push_back({act.query->subject, act.query->degree, std::nullopt});
        return;
      }
      step.subquestions.push_back({act.query->subject, act.query->degree, answer});
      Fact h{Property::Homology, {act.query->subject, Degree(act.query->degree)}, *answer};
      act.consumed[act.query->antecedent] = memory_.add(std::move(h), step_index);
      act.bindings[act.query->var] = *answer;
    }
    for (const auto& c : act.consumed) step.consumed.push_back(memory_.at(*c));
    step.bindings = act.bindings;
    step.produced = instantiate(rule.consequent, act.bindings);
    consumed_ids_.push_back({});
    for (const auto& c : act.consumed) consumed_ids_.back().push_back(*c);
    memory_.add(step.produced, step_index);
    steps_.push_back(std::move(step));
  }

  Trace support_of(std::size_t fact_id) const {
    std::set<int> needed;
    std::vector<std::size_t> work{fact_id};
    while (!work.empty()) {
      const int producer = memory_.producer(work.back());
      work.pop_back();
      if (producer < 0 || !needed.insert(producer).second) continue;
      for (std::size_t c : consumed_ids_[static_cast<std::size_t>(producer)])
        if (memory_.producer(c) != producer) work.push_back(c);
    }
    Trace t;
    for (int s : needed) t.steps.push_back(steps_[static_cast<std::size_t>(s)]);
    return t;
  }

  const RuleBase& rules_;
  Term subject_;
  int degree_;
  const HomologyOracle& oracle_;
  InferenceOptions options_;
  WorkingMemory memory_;
  std::vector<TraceStep> steps_;
  std::vector<std::vector<std::size_t>> consumed_ids_;
  std::set<std::string> exhausted_;
  std::vector<SubQuestion> unanswered_;
};

}  // namespace

Inference infer(const RuleBase& rules, const Term& subject, int degree,
                const std::vector<Fact>& initial, const HomologyOracle& oracle,
                InferenceOptions options) {
  if (degree < 0) throw UserError("homotopy degree must be non-negative");
  space_from_term(subject);
  return Engine(rules, subject, degree, oracle, options).run(initial);
}

// ---------------------------------------------------------------------------

std::optional<Fact> replay(const RuleBase& rules, const std::vector<Fact>& initial,
                           const Trace& trace) {
  std::unordered_map<std::string, Fact> memory;
  for (const auto& f : initial) memory.emplace(f.instance_key(), f);
  std::optional<Fact> last;
  for (std::size_t s = 0; s < trace.steps.size(); ++s) {
    const TraceStep& step = trace.steps[s];
    auto fail = [s](const std::string& why) {
      throw ComputationError("replay failed at step " + std::to_string(s + 1) + ": " + why);
    };
    const Rule* rule = rules.find(step.rule_id);
    if (!rule) fail("unknown rule " + step.rule_id);
    for (const auto& q : step.subquestions) {
      if (!q.answer) fail("sub-question without an answer");
      Fact h{Property::Homology, {q.subject, Degree(q.degree)}, *q.answer};
      memory.emplace(h.instance_key(), h);
    }
    if (step.consumed.size() != rule->antecedents.size())
      fail("consumed facts do not line up with the antecedents of " + rule->id);
    for (std::size_t i = 0; i < step.consumed.size(); ++i) {
      const Fact& c = step.consumed[i];
      auto it = memory.find(c.instance_key());
      if (it == memory.end() || !(it->second == c))
        fail(c.to_string() + " is not in working memory");
      if (!(instantiate(rule->antecedents[i], step.bindings) == c))
        fail(c.to_string() + " does not match antecedent " + std::to_string(i + 1));
    }
    for (const auto& g : rule->guards)
      if (!holds(g, step.bindings)) fail("a guard of " + rule->id + " does not hold");
    Fact produced = instantiate(rule->consequent, step.bindings);
    if (!(produced == step.produced))
      fail("rule " + rule->id + " yields " + produced.to_string() + ", trace says " +
           step.produced.to_string());
    memory.emplace(produced.instance_key(), produced);
    last = std::move(produced);
  }
  return last;
}

std::string render_bindings(const Bindings& b) {
  std::string out;
  for (const auto& [k, v] : b) {
    if (!out.empty()) out += ", ";
    out += k + " = " + to_string(v);
  }
  return out;
}

std::vector<std::string> explain(const Trace& trace) {
  if (trace.empty()) return {"no applicable rules"};
  std::vector<std::string> lines;
  for (const auto& step : trace.steps) {
    std::string line = step.rule_id + ": " + step.cite + " {" + render_bindings(step.bindings) + "}";
    for (const auto& q : step.subquestions)
      line += " [asked H_" + std::to_string(q.degree) + "(" + to_compact(q.subject) +
              ") = " + (q.answer ? q.answer->to_string() : "unknown") + "]";
    line += " => " + step.produced.to_string();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace topo::hes
