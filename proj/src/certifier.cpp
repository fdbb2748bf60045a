#include "topo/certifier.hpp"

#include <limits>
#include <sstream>

namespace topo {

MultiplicationTable::MultiplicationTable(std::vector<std::vector<long long>> rows,
                                         long long identity)
    : rows_(std::move(rows)), identity_(identity) {
  if (rows_.empty()) throw MalformedTableError("multiplication table is empty");
  for (std::size_t r = 0; r < rows_.size(); ++r)
    if (rows_[r].size() != rows_.size())
      throw MalformedTableError("row " + std::to_string(r) + " has " +
                                std::to_string(rows_[r].size()) + " entries, expected " +
                                std::to_string(rows_.size()));
  if (identity_ < 0 || identity_ >= static_cast<long long>(rows_.size()))
    throw MalformedTableError("identity index " + std::to_string(identity_) +
                              " out of range");
}

MultiplicationTable MultiplicationTable::cyclic(int n) {
  std::vector<std::vector<long long>> rows(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) rows[static_cast<std::size_t>(a)].push_back((a + b) % n);
  return MultiplicationTable(std::move(rows), 0);
}

MultiplicationTable parse_table(std::string_view text) {
  std::vector<std::vector<long long>> rows;
  long long identity = 0;
  std::string normalized(text);
  for (char& c : normalized)
    if (c == ';') c = '\n';
  std::istringstream in(normalized);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first == "identity") {
      if (!(fields >> identity))
        throw MalformedTableError("line " + std::to_string(line_no) +
                                  ": identity needs an index");
      continue;
    }
    std::vector<long long> row;
    std::istringstream all(line);
    std::string token;
    while (all >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stoll(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw MalformedTableError("line " + std::to_string(line_no) + ": bad entry '" +
                                  token + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return MultiplicationTable(std::move(rows), identity);
}

// ---------------------------------------------------------------------------

std::string obligations(const MultiplicationTable& t) {
  const std::size_t n = t.order();
  std::ostringstream out;
  out << ";; Group axioms for a finite operation table.\n";
  out << ";; order " << n << ", identity " << t.identity() << "\n";
  out << "(encapsulate\n";
  out << "  (((carrier-p *) => *)\n";
  out << "   ((e) => *)\n";
  out << "   ((op * *) => *))\n\n";
  out << "  (local (defun carrier-p (x) (and (natp x) (< x " << n << "))))\n";
  out << "  (local (defun e () " << t.identity() << "))\n";
  out << "  (local (defun op (x y)\n";
  out << "           (nth y (nth x '(";
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0) out << "\n                           ";
    out << "(";
    for (std::size_t c = 0; c < n; ++c) out << (c ? " " : "") << t.at(r, c);
    out << ")";
  }
  out << ")))))\n\n";
  out << "  (defthm op-closure\n"
         "    (implies (and (carrier-p x) (carrier-p y))\n"
         "             (carrier-p (op x y))))\n\n";
  out << "  (defthm op-associativity\n"
         "    (implies (and (carrier-p x) (carrier-p y) (carrier-p z))\n"
         "             (equal (op (op x y) z) (op x (op y z)))))\n\n";
  out << "  (defthm op-identity\n"
         "    (implies (carrier-p x)\n"
         "             (and (carrier-p (e))\n"
         "                  (equal (op (e) x) x)\n"
         "                  (equal (op x (e)) x))))\n\n";
  out << "  (defun-sk has-inverse (x)\n"
         "    (exists (y)\n"
         "      (and (carrier-p y) (equal (op x y) (e)) (equal (op y x) (e)))))\n\n";
  out << "  (defthm op-inverse\n"
         "    (implies (carrier-p x) (has-inverse x))))\n";
  return out.str();
}

namespace {

const char* const kClosure = "for all x, y in G: x*y is in G";
const char* const kAssociativity = "for all x, y, z in G: (x*y)*z = x*(y*z)";
const char* const kIdentity = "for all x in G: e*x = x and x*e = x";
const char* const kInverse = "for all x in G there is y in G with x*y = e and y*x = e";

}  // namespace

CertReport check(const MultiplicationTable& t) {
  const auto n = static_cast<long long>(t.order());
  auto in_carrier = [n](long long v) { return v >= 0 && v < n; };
  auto op = [&t](long long a, long long b) {
    return t.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  };
  const long long e = t.identity();

  Obligation closure{"closure", kClosure, true, std::nullopt};
  for (long long a = 0; a < n && closure.holds; ++a)
    for (long long b = 0; b < n; ++b)
      if (!in_carrier(op(a, b))) {
        closure.holds = false;
        closure.counterexample = std::vector<long long>{a, b};
        break;
      }

  // Triples whose intermediate products leave the carrier are closure's
  // business, not associativity's.
  Obligation assoc{"associativity", kAssociativity, true, std::nullopt};
  for (long long a = 0; a < n && assoc.holds; ++a)
    for (long long b = 0; b < n && assoc.holds; ++b)
      for (long long c = 0; c < n; ++c) {
        long long ab = op(a, b), bc = op(b, c);
        if (!in_carrier(ab) || !in_carrier(bc)) continue;
        if (op(ab, c) != op(a, bc)) {
          assoc.holds = false;
          assoc.counterexample = std::vector<long long>{a, b, c};
          break;
        }
      }

  Obligation identity{"identity", kIdentity, true, std::nullopt};
  for (long long a = 0; a < n; ++a)
    if (op(e, a) != a || op(a, e) != a) {
      identity.holds = false;
      identity.counterexample = std::vector<long long>{a};
      break;
    }

  Obligation inverse{"inverse", kInverse, true, std::nullopt};
  for (long long a = 0; a < n; ++a) {
    bool found = false;
    for (long long y = 0; y < n && !found; ++y) found = op(a, y) == e && op(y, a) == e;
    if (!found) {
      inverse.holds = false;
      inverse.counterexample = std::vector<long long>{a};
      break;
    }
  }

  CertReport report;
  report.obligations = {closure, assoc, identity, inverse};
  report.certified = closure.holds && assoc.holds && identity.holds && inverse.holds;
  return report;
}

// ---------------------------------------------------------------------------

Term to_term(const MultiplicationTable& t) {
  std::vector<Term> rows;
  for (const auto& r : t.rows()) {
    std::vector<Term> entries;
    for (long long v : r) entries.push_back(integer(v));
    rows.push_back(make_list(std::move(entries)));
  }
  return apply("cert1", "mult_table", {integer(t.identity()), make_list(std::move(rows))});
}

namespace {

long long as_int64(const Term& t) {
  if (!t.is<Integer>()) throw TermError("expected an integer");
  const BigInt& v = t.as<Integer>().value;
  if (v < std::numeric_limits<long long>::min() || v > std::numeric_limits<long long>::max())
    throw TermError("integer out of range");
  return static_cast<long long>(v);
}

std::string as_string(const Term& t) {
  if (!t.is<Str>()) throw TermError("expected a string");
  return t.as<Str>().value;
}

}  // namespace

MultiplicationTable table_from_term(const Term& t) {
  if (!t.is_apply_of("cert1", "mult_table"))
    throw TermError("invalid constructor term: not a multiplication table");
  const auto& args = t.as<Apply>().args;
  std::vector<std::vector<long long>> rows;
  for (const auto& row : list_items(args[1])) {
    std::vector<long long> entries;
    for (const auto& v : list_items(row)) entries.push_back(as_int64(v));
    rows.push_back(std::move(entries));
  }
  return MultiplicationTable(std::move(rows), as_int64(args[0]));
}

Term to_term(const CertReport& r) {
  std::vector<Term> items;
  for (const auto& o : r.obligations) {
    std::vector<Term> cex;
    if (o.counterexample)
      for (long long v : *o.counterexample) cex.push_back(integer(v));
    items.push_back(apply("cert1", "obligation",
                          {str(o.axiom), str(o.statement),
                           sym("cert1", o.holds ? "true" : "false"),
                           make_list(std::move(cex))}));
  }
  return apply("cert1", "report",
               {str(r.status()), make_list(std::move(items))});
}

CertReport report_from_term(const Term& t) {
  if (!t.is_apply_of("cert1", "report")) throw TermError("not a certification report");
  const auto& args = t.as<Apply>().args;
  CertReport r;
  const std::string status = as_string(args[0]);
  if (status != "certified" && status != "failed")
    throw TermError("unknown certification status '" + status + "'");
  r.certified = status == "certified";
  for (const auto& item : list_items(args[1])) {
    if (!item.is_apply_of("cert1", "obligation")) throw TermError("expected an obligation");
    const auto& o = item.as<Apply>().args;
    Obligation ob;
    ob.axiom = as_string(o[0]);
    ob.statement = as_string(o[1]);
    if (o[2].is_symbol("cert1", "true")) ob.holds = true;
    else if (o[2].is_symbol("cert1", "false")) ob.holds = false;
    else throw TermError("expected cert1.true or cert1.false");
    auto cex = list_items(o[3]);
    if (!cex.empty()) {
      ob.counterexample.emplace();
      for (const auto& v : cex) ob.counterexample->push_back(as_int64(v));
    }
    r.obligations.push_back(std::move(ob));
  }
  return r;
}

}  // namespace topo
