#pragma once

// Group-axiom certification of finite multiplication tables. The obligation
// document has the shape of a theorem-prover encapsulate; the obligations
// are discharged here by exhaustive evaluation.

#include "topo/error.hpp"
#include "topo/term.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topo {

class MalformedTableError : public UserError {
 public:
  using UserError::UserError;
};

class MultiplicationTable {
 public:
  /// Throws MalformedTableError unless `rows` is a non-empty square table
  /// and `identity` indexes a row.
  MultiplicationTable(std::vector<std::vector<long long>> rows, long long identity);

  /// ℤ/n under addition.
  static MultiplicationTable cyclic(int n);

  std::size_t order() const noexcept { return rows_.size(); }
  long long identity() const noexcept { return identity_; }
  long long at(std::size_t a, std::size_t b) const { return rows_[a][b]; }
  void set(std::size_t a, std::size_t b, long long v) { rows_[a][b] = v; }
  const std::vector<std::vector<long long>>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::vector<long long>> rows_;
  long long identity_;
};

/// Rows separated by newlines or ';', entries by whitespace. '#' starts a
/// comment; an `identity k` line sets the identity (default 0).
MultiplicationTable parse_table(std::string_view text);

struct Obligation {
  std::string axiom;  // closure | associativity | identity | inverse
  std::string statement;
  bool holds = true;
  std::optional<std::vector<long long>> counterexample;

  friend bool operator==(const Obligation&, const Obligation&) = default;
};

struct CertReport {
  bool certified = false;
  std::vector<Obligation> obligations;

  std::string status() const { return certified ? "certified" : "failed"; }
  friend bool operator==(const CertReport&, const CertReport&) = default;
};

std::string obligations(const MultiplicationTable& t);
CertReport check(const MultiplicationTable& t);

Term to_term(const MultiplicationTable& t);
MultiplicationTable table_from_term(const Term& t);
Term to_term(const CertReport& r);
CertReport report_from_term(const Term& t);

}  // namespace topo
