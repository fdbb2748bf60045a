#pragma once

// The human-facing expression syntax shared by the CLI and the front door:
//
//   expr   := factor ('*' factor)*
//   factor := 'S(' n ')' | 'D(' n ')' | 'RP2' | 'C(' m ')'
//           | 'K(' expr ',' n ')' | '(' expr ')'
//
// '*' is the cartesian product on spaces (left associative) and the direct
// product on groups (a chain of factors becomes one flat product).

#include "topo/error.hpp"
#include "topo/expr.hpp"

#include <string>
#include <string_view>

namespace topo {

class ExprParseError : public UserError {
 public:
  ExprParseError(const std::string& what, std::size_t column)
      : UserError("parse error at column " + std::to_string(column + 1) + ": " + what) {}
};

Subject parse_compact(std::string_view text);

std::string to_compact(const SpaceExpr& s);
std::string to_compact(const GroupExpr& g);
std::string to_compact(const Subject& s);

/// Compact form of a space or group term; other terms fall back to their
/// canonical key.
std::string to_compact(const Term& t);

}  // namespace topo
