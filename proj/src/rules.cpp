#include "topo/hes.hpp"

#include "default_rules.hpp"
#include "topo/xml.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace topo::hes {

namespace {

struct Signature {
  std::string_view name;
  Property property;
  std::size_t arity;
  bool has_value;
};

constexpr Signature kSignatures[] = {
    {"contractible", Property::Contractible, 1, false},
    {"connectivity", Property::Connectivity, 1, true},
    {"homotopy", Property::Homotopy, 2, true},
    {"homology", Property::Homology, 2, true},
    {"is_sphere", Property::IsSphere, 2, false},
    {"is_simplex", Property::IsSimplex, 2, false},
    {"is_product", Property::IsProduct, 3, false},
    {"is_em_space", Property::IsEmSpace, 3, false},
};

const Signature* signature_of(std::string_view name) {
  for (const auto& s : kSignatures)
    if (s.name == name) return &s;
  return nullptr;
}

// Tokenizer + recursive descent for pattern and guard text.
class TextParser {
 public:
  TextParser(std::string_view text, int line) : text_(text), line_(line) {}

  Pattern pattern() {
    std::string name = identifier();
    const Signature* sig = signature_of(name);
    if (!sig) fail("unknown property '" + name + "'");
    Pattern p{sig->property, {}, std::nullopt};
    expect("(");
    p.args.push_back(expr());
    while (accept(",")) p.args.push_back(expr());
    expect(")");
    if (p.args.size() != sig->arity)
      fail(name + " takes " + std::to_string(sig->arity) + " argument(s)");
    if (accept("=")) {
      if (!sig->has_value) fail(name + " has no value");
      p.value = expr();
    } else if (sig->has_value) {
      fail(name + " needs '= value'");
    }
    end();
    return p;
  }

  Guard guard() {
    Guard g{expr(), Guard::Op::Eq, {}};
    skip_ws();
    static const std::pair<std::string_view, Guard::Op> ops[] = {
        {">=", Guard::Op::Ge}, {"<=", Guard::Op::Le}, {"==", Guard::Op::Eq},
        {"!=", Guard::Op::Ne}, {">", Guard::Op::Gt},  {"<", Guard::Op::Lt}};
    bool found = false;
    for (const auto& [tok, op] : ops)
      if (accept(tok)) {
        g.op = op;
        found = true;
        break;
      }
    if (!found) fail("expected a comparison operator");
    g.rhs = expr();
    end();
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw RuleError(what + " in '" + std::string(text_) + "'", line_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  void end() {
    skip_ws();
    if (pos_ != text_.size()) fail("trailing text");
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected an identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr expr() {
    Expr lhs = primary();
    for (;;) {
      if (accept("+")) {
        lhs = Expr{Expr::Kind::Add, {}, 0, {std::move(lhs), primary()}};
      } else if (accept("-")) {
        lhs = Expr{Expr::Kind::Sub, {}, 0, {std::move(lhs), primary()}};
      } else {
        return lhs;
      }
    }
  }

  Expr primary() {
    skip_ws();
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (accept("?")) return Expr{Expr::Kind::Var, identifier(), 0, {}};
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      return Expr{Expr::Kind::Int, {}, std::stoll(std::string(text_.substr(start, pos_ - start))),
                  {}};
    }
    std::string word = identifier();
    if (word == "inf") return Expr{Expr::Kind::Inf, {}, 0, {}};
    if (word == "min") {
      expect("(");
      Expr a = expr();
      expect(",");
      Expr b = expr();
      expect(")");
      return Expr{Expr::Kind::Min, {}, 0, {std::move(a), std::move(b)}};
    }
    fail("unexpected '" + word + "'");
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

void collect_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Var) out.insert(e.var);
  for (const auto& o : e.operands) collect_vars(o, out);
}

bool is_simple(const Expr& e) {
  return e.kind == Expr::Kind::Var || e.kind == Expr::Kind::Int ||
         e.kind == Expr::Kind::Inf;
}

std::string trimmed(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

Rule parse_rule(const xml::Element& el) {
  Rule rule;
  rule.line = el.line;
  auto id = el.attribute("id");
  if (!id || id->empty()) throw RuleError("rule without id", el.line);
  rule.id = *id;
  if (auto sq = el.attribute("subquery")) {
    if (*sq != "true" && *sq != "false")
      throw RuleError("subquery must be true or false", el.line);
    rule.may_subquery = *sq == "true";
  }
  std::optional<Pattern> consequent;
  int consequent_line = el.line;
  for (const auto& child : el.children) {
    const std::string text = trimmed(child.text);
    if (child.name == "ante") {
      Pattern p = TextParser(text, child.line).pattern();
      for (const auto& a : p.args)
        if (!is_simple(a))
          throw RuleError("antecedent arguments must be variables or literals", child.line);
      if (p.value && !is_simple(*p.value))
        throw RuleError("antecedent values must be variables or literals", child.line);
      if (p.args.front().kind != Expr::Kind::Var)
        throw RuleError("pattern subject must be a variable", child.line);
      rule.antecedents.push_back(std::move(p));
    } else if (child.name == "guard") {
      rule.guards.push_back(TextParser(text, child.line).guard());
    } else if (child.name == "cons") {
      if (consequent) throw RuleError("rule " + rule.id + " has two consequents", child.line);
      consequent = TextParser(text, child.line).pattern();
      consequent_line = child.line;
      if (consequent->args.front().kind != Expr::Kind::Var)
        throw RuleError("pattern subject must be a variable", child.line);
    } else if (child.name == "cite") {
      rule.cite = text;
    } else {
      throw RuleError("unknown element <" + child.name + ">", child.line);
    }
  }
  if (!consequent) throw RuleError("rule " + rule.id + " has no consequent", el.line);
  if (rule.antecedents.empty())
    throw RuleError("rule " + rule.id + " has no antecedents", el.line);
  if (rule.cite.empty()) throw RuleError("rule " + rule.id + " has no citation", el.line);
  rule.consequent = std::move(*consequent);

  std::set<std::string> bound, guarded, needed;
  for (const auto& a : rule.antecedents) {
    // The degree of a homology antecedent that may be asked for is
    // enumerated, not matched.
    const bool asked = rule.may_subquery && a.property == Property::Homology;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      collect_vars(a.args[i], asked && i == 1 ? guarded : bound);
    if (a.value) collect_vars(*a.value, bound);
  }
  for (const auto& g : rule.guards) {
    collect_vars(g.lhs, guarded);
    collect_vars(g.rhs, guarded);
  }
  for (const auto& e : rule.consequent.args) collect_vars(e, needed);
  if (rule.consequent.value) collect_vars(*rule.consequent.value, needed);
  for (const auto& v : needed)
    if (!bound.count(v) && !guarded.count(v))
      throw RuleError("rule " + rule.id + ": consequent variable ?" + v + " is unbound",
                      consequent_line);
  for (const auto& v : guarded)
    if (!bound.count(v)) rule.degree_vars.push_back(v);
  return rule;
}

}  // namespace

RuleBase RuleBase::parse(std::string_view text) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const xml::ParseError& e) {
    throw RuleError(e.what(), e.line());
  }
  if (root.name != "rulebase") throw RuleError("root element must be <rulebase>", root.line);
  RuleBase base;
  std::set<std::string> ids;
  for (const auto& el : root.children) {
    if (el.name != "rule") throw RuleError("unknown element <" + el.name + ">", el.line);
    Rule r = parse_rule(el);
    if (!ids.insert(r.id).second) throw RuleError("duplicate rule id " + r.id, el.line);
    base.rules_.push_back(std::move(r));
  }
  return base;
}

RuleBase RuleBase::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open rule file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const RuleBase& RuleBase::builtin() {
  static const RuleBase base = parse(generated::kDefaultRules);
  return base;
}

const Rule* RuleBase::find(std::string_view id) const {
  auto it = std::find_if(rules_.begin(), rules_.end(),
                         [id](const Rule& r) { return r.id == id; });
  return it == rules_.end() ? nullptr : &*it;
}

}  // namespace topo::hes
