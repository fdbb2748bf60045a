#include "topo/compact.hpp"

#include <cctype>

namespace topo {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Subject parse() {
    Subject s = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ExprParseError(what, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  BigInt number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected a non-negative integer");
    return BigInt(std::string(text_.substr(start, pos_ - start)));
  }

  int small_number(int min) {
    std::size_t at = pos_;
    BigInt v = number();
    if (v < min || v > 1000) {
      pos_ = at;
      fail("integer out of range");
    }
    return static_cast<int>(v);
  }

  Subject expr() {
    std::size_t start = pos_;
    Subject first = factor();
    bool grouped = false;
    std::vector<GroupExpr> group_factors;
    while (accept('*')) {
      Subject next = factor();
      if (first.index() != next.index()) {
        pos_ = start;
        fail("'*' mixes a space and a group");
      }
      if (auto* lhs = std::get_if<SpaceExpr>(&first)) {
        first = SpaceExpr::product(*lhs, std::get<SpaceExpr>(next));
      } else {
        if (!grouped) group_factors.push_back(std::get<GroupExpr>(first));
        grouped = true;
        group_factors.push_back(std::get<GroupExpr>(next));
      }
    }
    if (grouped) return GroupExpr::direct_product(std::move(group_factors));
    return first;
  }

  Subject factor() {
    skip_ws();
    if (accept('(')) {
      Subject inner = expr();
      expect(')');
      return inner;
    }
    if (text_.substr(pos_, 3) == "RP2") {
      pos_ += 3;
      return SpaceExpr::rp2();
    }
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_++];
    switch (c) {
      case 'S': {
        expect('(');
        int n = small_number(1);
        expect(')');
        return SpaceExpr::sphere(n);
      }
      case 'D': {
        expect('(');
        int n = small_number(0);
        expect(')');
        return SpaceExpr::simplex(n);
      }
      case 'C': {
        expect('(');
        std::size_t at = pos_;
        BigInt m = number();
        if (m < 1) {
          pos_ = at;
          fail("cyclic group order must be at least 1");
        }
        expect(')');
        return GroupExpr::cyclic(std::move(m));
      }
      case 'K': {
        expect('(');
        std::size_t at = pos_;
        Subject g = expr();
        if (!std::holds_alternative<GroupExpr>(g)) {
          pos_ = at;
          fail("K(G,n) needs a group expression");
        }
        expect(',');
        int n = small_number(1);
        expect(')');
        return SpaceExpr::em_space(std::get<GroupExpr>(std::move(g)), n);
      }
      default:
        --pos_;
        fail("unknown constructor '" + std::string(1, c) + "'");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Subject parse_compact(std::string_view text) { return Parser(text).parse(); }

std::string to_compact(const GroupExpr& g) {
  if (auto* c = std::get_if<GroupExpr::Cyclic>(&g.node())) return "C(" + c->order.str() + ")";
  std::string out;
  for (const auto& f : std::get<GroupExpr::DirectProduct>(g.node()).factors) {
    if (!out.empty()) out += '*';
    bool nested = std::holds_alternative<GroupExpr::DirectProduct>(f.node());
    out += nested ? "(" + to_compact(f) + ")" : to_compact(f);
  }
  return out;
}

std::string to_compact(const SpaceExpr& s) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpaceExpr::Sphere>) {
          return "S(" + std::to_string(n.dim) + ")";
        } else if constexpr (std::is_same_v<T, SpaceExpr::Simplex>) {
          return "D(" + std::to_string(n.dim) + ")";
        } else if constexpr (std::is_same_v<T, SpaceExpr::Rp2>) {
          return "RP2";
        } else if constexpr (std::is_same_v<T, SpaceExpr::Product>) {
          bool nested = std::holds_alternative<SpaceExpr::Product>(n.rhs->node());
          std::string rhs = to_compact(*n.rhs);
          return to_compact(*n.lhs) + "*" + (nested ? "(" + rhs + ")" : rhs);
        } else {
          return "K(" + to_compact(n.group) + "," + std::to_string(n.level) + ")";
        }
      },
      s.node());
}

std::string to_compact(const Subject& s) {
  return std::visit([](const auto& x) { return to_compact(x); }, s);
}

std::string to_compact(const Term& t) {
  try {
    if (is_group_term(t) || is_space_term(t)) return to_compact(subject_from_term(t));
  } catch (const TermError&) {
  }
  return canonical_key(t);
}

}  // namespace topo
