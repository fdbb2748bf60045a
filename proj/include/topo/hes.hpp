#pragma once

// Homotopy expert system: a working memory of facts about spaces, a
// declarative rule base, a forward-chaining engine that may ask the broker
// for homology groups, and replayable explanation traces.

#include "topo/error.hpp"
#include "topo/snf.hpp"
#include "topo/term.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace topo::hes {

/// Integer or +infinity; used for degrees and connectivity bounds.
class Degree {
 public:
  constexpr Degree(long long v = 0) : value_(v), infinite_(false) {}
  static constexpr Degree infinity() {
    Degree d;
    d.infinite_ = true;
    return d;
  }

  bool infinite() const noexcept { return infinite_; }
  long long value() const noexcept { return value_; }
  std::string to_string() const;

  friend bool operator==(const Degree& a, const Degree& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend bool operator<(const Degree& a, const Degree& b) {
    if (a.infinite_) return false;
    return b.infinite_ || a.value_ < b.value_;
  }

 private:
  long long value_;
  bool infinite_;
};

/// Spaces and group expressions are carried as terms.
using Value = std::variant<Degree, FgAbelianGroup, Term>;

std::string to_string(const Value& v);

enum class Property {
  Contractible,
  Connectivity,
  Homotopy,
  Homology,
  IsSphere,
  IsSimplex,
  IsProduct,
  IsEmSpace,
};

std::string_view property_name(Property p);

/// `args[0]` is always the subject space. Homotopy/Homology carry the
/// degree as args[1]; structural facts carry their constructor arguments.
struct Fact {
  Property property;
  std::vector<Value> args;
  std::optional<Value> value;

  const Term& subject() const { return std::get<Term>(args.front()); }
  /// Identifies the (subject, property instance); one value per instance.
  std::string instance_key() const;
  std::string to_string() const;

  friend bool operator==(const Fact& a, const Fact& b);
};

/// Constructor facts (is_sphere, is_product, ...) for every space
/// sub-expression of `subject`, in pre-order.
std::vector<Fact> structural_facts(const Term& subject);

// ---------------------------------------------------------------------------
// Rules

class RuleError : public UserError {
 public:
  RuleError(const std::string& what, int line)
      : UserError("rule file line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Arithmetic over degrees and groups inside rule patterns.
struct Expr {
  enum class Kind { Var, Int, Inf, Add, Sub, Min };
  Kind kind = Kind::Int;
  std::string var;
  long long number = 0;
  std::vector<Expr> operands;
};

struct Pattern {
  Property property;
  std::vector<Expr> args;
  std::optional<Expr> value;
};

struct Guard {
  enum class Op { Ge, Gt, Le, Lt, Eq, Ne };
  Expr lhs;
  Op op;
  Expr rhs;
};

struct Rule {
  std::string id;
  std::string cite;
  std::vector<Pattern> antecedents;
  std::vector<Guard> guards;
  Pattern consequent;
  bool may_subquery = false;
  /// Variables bound by enumeration over the degree window rather than by
  /// matching facts.
  std::vector<std::string> degree_vars;
  int line = 0;
};

class RuleBase {
 public:
  /// Parses the XML rule dialect. Throws RuleError with a line number.
  static RuleBase parse(std::string_view text);
  static RuleBase load_file(const std::string& path);
  /// The rule base compiled into the binary.
  static const RuleBase& builtin();

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  const Rule* find(std::string_view id) const;

 private:
  std::vector<Rule> rules_;
};

// ---------------------------------------------------------------------------
// Inference

using Bindings = std::map<std::string, Value>;

struct SubQuestion {
  Term subject;
  int degree;
  std::optional<FgAbelianGroup> answer;  // nullopt: the broker said unknown
};

struct TraceStep {
  std::string rule_id;
  std::string cite;
  Bindings bindings;
  std::vector<Fact> consumed;  // one per antecedent, in rule order
  Fact produced;
  std::vector<SubQuestion> subquestions;
};

struct Trace {
  std::vector<TraceStep> steps;
  bool empty() const noexcept { return steps.empty(); }
};

/// Answers Homology(subject, degree) on behalf of a may_subquery rule.
using HomologyOracle =
    std::function<std::optional<FgAbelianGroup>(const Term& subject, int degree)>;

struct Inference {
  std::optional<FgAbelianGroup> value;  // nullopt: unknown
  Trace trace;
  std::size_t firings = 0;
};

class InferenceError : public ComputationError {
 public:
  InferenceError(const std::string& what, Trace partial)
      : ComputationError(what), partial_(std::move(partial)) {}
  const Trace& partial_trace() const noexcept { return partial_; }

 private:
  Trace partial_;
};

struct InferenceOptions {
  std::size_t fuel = 100000;
};

/// Forward chaining to fixpoint for pi_degree(subject). Matching only sees
/// facts about sub-expressions of `subject`, and degree variables range over
/// 0..degree+1. When the goal is derived the trace is restricted to the
/// steps it depends on; otherwise it holds every firing.
Inference infer(const RuleBase& rules, const Term& subject, int degree,
                const std::vector<Fact>& initial, const HomologyOracle& oracle,
                InferenceOptions options = {});

/// Re-fires every step of `trace` from `initial` and returns the last fact
/// produced. Throws ComputationError when a step does not follow from the
/// facts available before it.
std::optional<Fact> replay(const RuleBase& rules, const std::vector<Fact>& initial,
                           const Trace& trace);

/// One line per step; "no applicable rules" for an empty trace.
std::vector<std::string> explain(const Trace& trace);

std::string render_bindings(const Bindings& b);

}  // namespace topo::hes
