#pragma once

// Minimal XML reader for the two XML dialects the project consumes: the
// OpenMath subset carried on the wire and the rule-base file. No DTDs, no
// namespaces, no CDATA.

#include "topo/error.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topo::xml {

class ParseError : public UserError {
 public:
  ParseError(const std::string& what, int line)
      : UserError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;  // concatenated character data of this element only
  int line = 0;

  std::optional<std::string> attribute(std::string_view key) const;
  bool has_only_whitespace_text() const;
};

/// Parses a document with exactly one root element.
Element parse(std::string_view document);

std::string escape(std::string_view text);

}  // namespace topo::xml
