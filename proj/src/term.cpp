#include "topo/term.hpp"

#include "topo/xml.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace topo {

const Symbol* Term::head() const noexcept {
  if (auto* s = std::get_if<Symbol>(&node_)) return s;
  if (auto* a = std::get_if<Apply>(&node_)) return &a->head;
  return nullptr;
}

bool Term::is_apply_of(std::string_view cd, std::string_view name) const noexcept {
  auto* a = std::get_if<Apply>(&node_);
  return a && a->head.cd == cd && a->head.name == name;
}

bool Term::is_symbol(std::string_view cd, std::string_view name) const noexcept {
  auto* s = std::get_if<Symbol>(&node_);
  return s && s->cd == cd && s->name == name;
}

bool operator==(const Apply& a, const Apply& b) {
  return a.head == b.head && a.args == b.args;
}

bool operator==(const Term& a, const Term& b) { return a.node_ == b.node_; }

Term sym(std::string cd, std::string name) {
  return Symbol{std::move(cd), std::move(name)};
}
Term integer(BigInt v) { return Integer{std::move(v)}; }
Term str(std::string v) { return Str{std::move(v)}; }
Term apply(std::string cd, std::string name, std::vector<Term> args) {
  return Apply{Symbol{std::move(cd), std::move(name)}, std::move(args)};
}

// ---------------------------------------------------------------------------
// Registry

DictionaryRegistry::DictionaryRegistry() {
  auto exact = [](std::size_t n) { return Arity{n, n}; };
  auto at_least = [](std::size_t n) { return Arity{n, std::nullopt}; };
  entries_ = {
      {"algtop1", "sphere", exact(1)},
      {"algtop1", "simplex", exact(1)},
      {"algtop1", "cartesian_product", exact(2)},
      {"algtop1", "em_space", exact(2)},
      {"algtop1", "rp2", exact(0)},
      {"algtop1", "homology", exact(2)},
      {"algtop1", "homotopy_group", exact(2)},
      {"grp1", "cyclic_group", exact(1)},
      {"grp1", "direct_product", at_least(2)},
      {"grp1", "group_homology", exact(2)},
      {"res1", "fg_abelian", exact(2)},
      {"res1", "unknown", exact(0)},
      {"proto1", "procedure_call", at_least(2)},
      {"proto1", "procedure_completed", exact(2)},
      {"proto1", "procedure_terminated", exact(2)},
      {"proto1", "call_id", exact(1)},
      {"proto1", "error", exact(2)},
      {"list1", "list", at_least(1)},
      {"list1", "nil", exact(0)},
      {"cert1", "mult_table", exact(2)},
      {"cert1", "certify", exact(1)},
      {"cert1", "report", exact(2)},
      {"cert1", "obligation", exact(4)},
      {"cert1", "true", exact(0)},
      {"cert1", "false", exact(0)},
  };
}

const DictionaryRegistry& DictionaryRegistry::builtin() {
  static const DictionaryRegistry registry;
  return registry;
}

std::optional<Arity> DictionaryRegistry::lookup(const Symbol& s) const {
  for (const auto& e : entries_)
    if (e.cd == s.cd && e.name == s.name) return e.arity;
  return std::nullopt;
}

std::vector<std::string> DictionaryRegistry::dictionaries() const {
  std::vector<std::string> out;
  for (const auto& e : entries_)
    if (std::find(out.begin(), out.end(), e.cd) == out.end()) out.push_back(e.cd);
  return out;
}

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

void check_symbol(const Symbol& s) {
  if (!is_identifier(s.cd) || !is_identifier(s.name))
    throw TermError("malformed symbol '" + s.cd + "." + s.name + "'");
  if (!DictionaryRegistry::builtin().lookup(s))
    throw TermError("unknown symbol " + s.qualified());
}

}  // namespace

void validate(const Term& t) {
  std::visit(
      [](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Symbol>) {
          check_symbol(n);
        } else if constexpr (std::is_same_v<T, Var>) {
          if (!is_identifier(n.name))
            throw TermError("malformed variable name '" + n.name + "'");
        } else if constexpr (std::is_same_v<T, Apply>) {
          check_symbol(n.head);
          if (n.args.empty())
            throw TermError("application of " + n.head.qualified() +
                            " has no arguments");
          auto arity = *DictionaryRegistry::builtin().lookup(n.head);
          if (!arity.admits(n.args.size()))
            throw TermError("wrong number of arguments (" +
                            std::to_string(n.args.size()) + ") for " +
                            n.head.qualified());
          for (const auto& a : n.args) validate(a);
        }
      },
      t.node());
}

// ---------------------------------------------------------------------------
// XML codec

namespace {

void encode_into(const Term& t, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Symbol>) {
          out += "<OMS cd=\"" + n.cd + "\" name=\"" + n.name + "\"/>";
        } else if constexpr (std::is_same_v<T, Integer>) {
          out += "<OMI>" + n.value.str() + "</OMI>";
        } else if constexpr (std::is_same_v<T, Str>) {
          out += "<OMSTR>" + xml::escape(n.value) + "</OMSTR>";
        } else if constexpr (std::is_same_v<T, Var>) {
          out += "<OMV name=\"" + n.name + "\"/>";
        } else {
          out += "<OMA><OMS cd=\"" + n.head.cd + "\" name=\"" + n.head.name + "\"/>";
          for (const auto& a : n.args) encode_into(a, out);
          out += "</OMA>";
        }
      },
      t.node());
}

std::string required_attribute(const xml::Element& el, std::string_view key) {
  auto v = el.attribute(key);
  if (!v)
    throw TermError("<" + el.name + "> lacks attribute '" + std::string(key) + "'");
  return *v;
}

void expect_leaf(const xml::Element& el) {
  if (!el.children.empty())
    throw TermError("<" + el.name + "> must not have child elements");
}

Term decode_element(const xml::Element& el) {
  if (el.name == "OMS") {
    expect_leaf(el);
    Symbol s{required_attribute(el, "cd"), required_attribute(el, "name")};
    check_symbol(s);
    return s;
  }
  if (el.name == "OMI") {
    expect_leaf(el);
    std::string text = el.text;
    auto first = text.find_first_not_of(" \t\r\n");
    auto last = text.find_last_not_of(" \t\r\n");
    text = first == std::string::npos ? "" : text.substr(first, last - first + 1);
    std::size_t digits_from = (!text.empty() && text[0] == '-') ? 1 : 0;
    if (text.size() == digits_from ||
        !std::all_of(text.begin() + static_cast<std::ptrdiff_t>(digits_from),
                     text.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw TermError("bad integer literal");
    return Integer{BigInt(text)};
  }
  if (el.name == "OMSTR") {
    expect_leaf(el);
    return Str{el.text};
  }
  if (el.name == "OMV") {
    expect_leaf(el);
    Var v{required_attribute(el, "name")};
    if (!is_identifier(v.name))
      throw TermError("malformed variable name '" + v.name + "'");
    return v;
  }
  if (el.name == "OMA") {
    if (!el.has_only_whitespace_text())
      throw TermError("unexpected text inside <OMA>");
    if (el.children.size() < 2)
      throw TermError("<OMA> needs a head symbol and at least one argument");
    if (el.children.front().name != "OMS")
      throw TermError("head of <OMA> must be <OMS>");
    Symbol head = decode_element(el.children.front()).as<Symbol>();
    std::vector<Term> args;
    for (std::size_t i = 1; i < el.children.size(); ++i)
      args.push_back(decode_element(el.children[i]));
    Term t = Apply{std::move(head), std::move(args)};
    validate(t);
    return t;
  }
  throw TermError("unknown element <" + el.name + ">");
}

}  // namespace

std::string encode(const Term& t) {
  validate(t);
  std::string out = "<OMOBJ>";
  encode_into(t, out);
  out += "</OMOBJ>";
  return out;
}

Term decode(std::string_view text) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const xml::ParseError& e) {
    throw TermError(e.what());
  }
  if (root.name != "OMOBJ") throw TermError("unknown element <" + root.name + ">");
  if (!root.has_only_whitespace_text() || root.children.size() != 1)
    throw TermError("<OMOBJ> must contain exactly one object");
  return decode_element(root.children.front());
}

// ---------------------------------------------------------------------------
// Canonical keys

namespace {

void key_into(const Term& t, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Symbol>) {
          out += 'Y' + n.cd + '.' + n.name + ';';
        } else if constexpr (std::is_same_v<T, Integer>) {
          out += 'I' + n.value.str() + ';';
        } else if constexpr (std::is_same_v<T, Str>) {
          static const char kHex[] = "0123456789abcdef";
          out += 'S';
          for (unsigned char c : n.value) {
            out += kHex[c >> 4];
            out += kHex[c & 15];
          }
          out += ';';
        } else if constexpr (std::is_same_v<T, Var>) {
          out += 'V' + n.name + ';';
        } else {
          out += 'A' + std::to_string(n.args.size()) + '(' + n.head.cd + '.' +
                 n.head.name + ';';
          for (const auto& a : n.args) key_into(a, out);
          out += ')';
        }
      },
      t.node());
}

}  // namespace

std::string canonical_key(const Term& t) {
  validate(t);
  std::string out;
  key_into(t, out);
  return out;
}

// ---------------------------------------------------------------------------

Term make_list(std::vector<Term> items) {
  if (items.empty()) return sym("list1", "nil");
  return apply("list1", "list", std::move(items));
}

std::vector<Term> list_items(const Term& t) {
  if (t.is_symbol("list1", "nil")) return {};
  if (t.is_apply_of("list1", "list")) return t.as<Apply>().args;
  throw TermError("expected a list1 list");
}

}  // namespace topo
