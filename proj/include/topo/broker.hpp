#pragma once

// The mediator: routes questions to registered kernels, memoizes answers,
// keeps decorated objects and inference traces, and lets kernels ask
// sub-questions back through itself.

#include "topo/certifier.hpp"
#include "topo/error.hpp"
#include "topo/hes.hpp"
#include "topo/snf.hpp"
#include "topo/term.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace topo {

enum class QuestionKind { Homology, Homotopy, Certify };

std::string_view kind_name(QuestionKind k);
/// "homology", "homotopy" or "certify"; throws UserError otherwise.
QuestionKind parse_kind(std::string_view name);

struct Question {
  QuestionKind kind = QuestionKind::Homology;
  Term subject = integer(0);
  int degree = 0;  // unused for Certify

  /// algtop1.homology(s,n), algtop1.homotopy_group(s,n) or cert1.certify(t).
  Term to_term() const;
  /// Cache key: canonical_key of to_term().
  std::string key() const;
  /// `H_5(C(5))`, `pi_4(S(4))`, `certify(4x4 table)`.
  std::string text() const;
};

/// Throws UserError if the term is not a well-formed question.
Question question_from_term(const Term& t);

/// Checks subject shape and degree; throws UserError.
void validate(const Question& q);

struct Unknown {
  friend bool operator==(const Unknown&, const Unknown&) = default;
};

using AnswerValue = std::variant<FgAbelianGroup, Unknown, CertReport>;

/// res1.fg_abelian(rank, torsion-list), res1.unknown or cert1.report.
Term value_term(const AnswerValue& v);
AnswerValue value_from_term(const Term& t);
/// `Z/5`, `unknown`, `certified`.
std::string value_text(const AnswerValue& v);

Term group_term(const FgAbelianGroup& g);
FgAbelianGroup group_from_result(const Term& t);

struct Answer {
  AnswerValue value;
  std::vector<std::string> provenance;
  std::optional<std::string> trace_id;
  bool cached = false;
};

// ---------------------------------------------------------------------------
// Kernels

using SubAsk = std::function<Answer(const Question&)>;

struct KernelResult {
  AnswerValue value;
  std::optional<hes::Trace> trace;
};

class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual std::string name() const = 0;
  virtual bool accepts(const Question& q) const = 0;
  /// May call `ask` for sub-questions. Must be safe to call concurrently.
  virtual KernelResult solve(const Question& q, const SubAsk& ask) = 0;
  virtual std::string transport() const { return "in-process"; }
};

// ---------------------------------------------------------------------------
// Decorations

enum class Tri { Yes, No, Unknown };
std::string_view tri_name(Tri t);

struct Decoration {
  enum class Kind { Space, Group };
  Kind object_kind = Kind::Space;
  Tri contractible = Tri::Unknown;
  /// Largest k known with pi_i = 0 for 1 <= i <= k; unset for groups.
  std::optional<hes::Degree> connectivity;
  std::optional<long long> dim_bound;
};

/// The constructor rule table.
Decoration decorate(const Term& expr);

struct ObjectRecord {
  std::string id;
  Term expr;
  Decoration decoration;
};

// ---------------------------------------------------------------------------

class RegistrationError : public UserError {
 public:
  using UserError::UserError;
};
class UnroutableError : public UserError {
 public:
  using UserError::UserError;
};
class CycleError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};
class KernelError : public ComputationError {
 public:
  KernelError(const std::string& kernel, const std::string& what)
      : ComputationError("kernel " + kernel + ": " + what), kernel_(kernel) {}
  const std::string& kernel() const noexcept { return kernel_; }

 private:
  std::string kernel_;
};

struct Stats {
  struct KernelInfo {
    std::string name;
    std::string transport;
    std::uint64_t invocations = 0;
  };
  struct Entry {
    std::string question;
    std::uint64_t hits = 0;
  };
  std::size_t cache_size = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::vector<KernelInfo> kernels;
  std::vector<Entry> entries;  // in insertion order
};

struct StoredTrace {
  std::string id;
  std::string question;
  hes::Trace trace;
};

class Broker {
 public:
  static constexpr std::size_t kMaxDepth = 16;

  Broker() = default;
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  /// Throws RegistrationError on a duplicate name.
  void register_kernel(std::shared_ptr<Kernel> kernel);
  /// First accepting kernel in registration order; UnroutableError if none.
  std::string route(const Question& q) const;
  Answer ask(const Question& q);

  ObjectRecord new_object(const Term& expr);
  std::optional<ObjectRecord> object(const std::string& id) const;
  std::optional<StoredTrace> trace(const std::string& id) const;
  Stats stats() const;

 private:
  struct Registered {
    std::shared_ptr<Kernel> kernel;
    std::unique_ptr<std::atomic<std::uint64_t>> invocations;
  };
  struct CacheEntry {
    std::string question;
    Answer answer;
    std::unique_ptr<std::atomic<std::uint64_t>> hits;
  };

  Answer ask_within(const Question& q, std::vector<std::string>& stack);
  const Registered& route_entry(const Question& q) const;

  std::vector<Registered> kernels_;

  mutable std::mutex mutex_;
  std::map<std::string, CacheEntry> cache_;
  std::vector<std::string> cache_order_;
  std::map<std::string, StoredTrace> traces_;
  std::map<std::string, ObjectRecord> objects_;
  std::size_t next_trace_ = 1;
  std::size_t next_object_ = 1;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

// ---------------------------------------------------------------------------
// Built-in kernels

bool simplicial_accepts(const Question& q);
bool grouphom_accepts(const Question& q);
bool hes_accepts(const Question& q);
bool certifier_accepts(const Question& q);

std::shared_ptr<Kernel> make_simplicial_kernel();
std::shared_ptr<Kernel> make_grouphom_kernel();
std::shared_ptr<Kernel> make_hes_kernel(hes::RuleBase rules);
std::shared_ptr<Kernel> make_certifier_kernel();

/// Names of kernels that can be served over the wire.
std::vector<std::string> servable_kernels();
/// Local kernel by name; throws UserError for unknown names.
std::shared_ptr<Kernel> make_local_kernel(const std::string& name,
                                          const hes::RuleBase& rules = hes::RuleBase::builtin());

/// A kernel reached over the wire protocol. Connects on first use; the
/// acceptance predicate is that of the local kernel with the same name.
std::shared_ptr<Kernel> make_remote_kernel(const std::string& name, const std::string& host,
                                           std::uint16_t port);

/// Wire handler exposing one local kernel: algtop1.homology(s,n),
/// grp1.group_homology(g,n), cert1.certify(t).
std::function<Term(const Symbol&, const std::vector<Term>&)> kernel_handler(
    std::shared_ptr<Kernel> kernel);

struct RemoteSpec {
  std::string name;
  std::string host;
  std::uint16_t port = 0;
};

/// Parses `name=host:port`.
RemoteSpec parse_remote_spec(const std::string& text);

/// simplicial, grouphom, hes, certifier in that order; kernels named in
/// `remotes` are replaced by remote ones in the same position.
std::unique_ptr<Broker> make_default_broker(const hes::RuleBase& rules = hes::RuleBase::builtin(),
                                            const std::vector<RemoteSpec>& remotes = {});

}  // namespace topo
