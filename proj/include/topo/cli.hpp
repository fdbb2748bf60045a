#pragma once

// The topobroker command line: one-shot commands, scripts, and the serve /
// kernel daemons.

#include "topo/frontdoor.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace topo::cli {

enum ExitCode { kOk = 0, kUserError = 1, kComputationError = 2 };

/// Where front-door requests go: an in-process FrontDoor or a remote one.
class Backend {
 public:
  virtual ~Backend() = default;
  /// Transport failures are reported as status 0.
  virtual Response request(const std::string& method, const std::string& path,
                           const std::optional<Json>& body) = 0;
};

class LocalBackend : public Backend {
 public:
  explicit LocalBackend(FrontDoor& door) : door_(door) {}
  Response request(const std::string& method, const std::string& path,
                   const std::optional<Json>& body) override;

 private:
  FrontDoor& door_;
};

std::unique_ptr<Backend> make_http_backend(const std::string& host, int port);

struct Command {
  enum class Kind { Ask, New, Explain, Stats, Certify };
  Kind kind = Kind::Stats;
  std::string question_kind;  // Ask
  std::string text;           // Ask/New: expression; Explain: id; Certify: path
  std::optional<long long> degree;
};

/// Parses one script line's tokens; throws UserError.
Command parse_command(const std::vector<std::string>& tokens);
/// Whitespace split honouring double quotes.
std::vector<std::string> tokenize(const std::string& line);

/// Renders commands against a backend; keeps the "last" trace id.
class Session {
 public:
  Session(Backend& backend, bool json) : backend_(backend), json_(json) {}

  int execute(const Command& c, std::ostream& out, std::ostream& err);
  /// Runs a script; echoes each command as "> cmd". Returns the worst exit
  /// code seen.
  int run_script(std::istream& in, std::ostream& out, std::ostream& err);

 private:
  Response call(const std::string& method, const std::string& path,
                const std::optional<Json>& body = std::nullopt);

  Backend& backend_;
  bool json_;
  std::optional<std::string> last_trace_;
  bool asked_ = false;
};

/// Formatting helpers shared with tests.
std::string render_answer(const Json& ask_response);
std::vector<std::string> render_trace(const Json& trace);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace topo::cli
