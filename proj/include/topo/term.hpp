#pragma once

// OpenMath-subset terms: the common language of wire messages, question
// subjects and cache keys.

#include "topo/bigint.hpp"
#include "topo/error.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace topo {

class TermError : public UserError {
 public:
  using UserError::UserError;
};

struct Symbol {
  std::string cd;
  std::string name;

  std::string qualified() const { return cd + "." + name; }
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct Integer {
  BigInt value;
  friend bool operator==(const Integer&, const Integer&) = default;
};

struct Str {
  std::string value;
  friend bool operator==(const Str&, const Str&) = default;
};

struct Var {
  std::string name;
  friend bool operator==(const Var&, const Var&) = default;
};

class Term;

struct Apply {
  Symbol head;
  std::vector<Term> args;
};

class Term {
 public:
  using Node = std::variant<Symbol, Integer, Str, Var, Apply>;

  Term(Symbol s) : node_(std::move(s)) {}
  Term(Integer i) : node_(std::move(i)) {}
  Term(Str s) : node_(std::move(s)) {}
  Term(Var v) : node_(std::move(v)) {}
  Term(Apply a) : node_(std::move(a)) {}

  const Node& node() const noexcept { return node_; }

  template <typename T>
  bool is() const noexcept {
    return std::holds_alternative<T>(node_);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(node_);
  }

  /// Head symbol of an application, or the symbol itself for a bare symbol.
  const Symbol* head() const noexcept;
  bool is_apply_of(std::string_view cd, std::string_view name) const noexcept;
  bool is_symbol(std::string_view cd, std::string_view name) const noexcept;

  friend bool operator==(const Term& a, const Term& b);

 private:
  Node node_;
};

bool operator==(const Apply& a, const Apply& b);

// Construction helpers.
Term sym(std::string cd, std::string name);
Term integer(BigInt v);
Term str(std::string v);
Term apply(std::string cd, std::string name, std::vector<Term> args);

/// Arity of a registered symbol: `min` arguments, `max` arguments or
/// unbounded. Arity 0 symbols are constants and only appear bare.
struct Arity {
  std::size_t min = 0;
  std::optional<std::size_t> max;

  bool admits(std::size_t n) const { return n >= min && (!max || n <= *max); }
};

/// Compiled-in content dictionaries.
class DictionaryRegistry {
 public:
  static const DictionaryRegistry& builtin();

  std::optional<Arity> lookup(const Symbol& s) const;
  std::vector<std::string> dictionaries() const;

 private:
  DictionaryRegistry();
  struct Entry {
    std::string cd;
    std::string name;
    Arity arity;
  };
  std::vector<Entry> entries_;
};

/// Throws TermError if the term uses an unknown symbol, violates an arity
/// or has a malformed identifier.
void validate(const Term& t);

std::string encode(const Term& t);
Term decode(std::string_view xml);

/// Whitespace-free serialization, injective on valid terms.
std::string canonical_key(const Term& t);

/// Sequence helpers for list1.list / list1.nil.
Term make_list(std::vector<Term> items);
std::vector<Term> list_items(const Term& t);

}  // namespace topo
