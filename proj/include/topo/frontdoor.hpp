#pragma once

// HTTP/JSON front door over a broker, plus the per-session log of objects
// created and questions answered.

#include "topo/broker.hpp"

#include "json.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace topo {

using Json = nlohmann::ordered_json;

struct Response {
  int status = 200;
  Json body;
};

Json to_json(const Decoration& d);
Json to_json(const AnswerValue& v);
Json to_json(const StoredTrace& t);
Json to_json(const Stats& s);

/// Request handling without a network; the HTTP server and the in-process
/// CLI both go through here. Errors become 400 (user), 404 (missing) or 422
/// (computation) responses with an {"error": text} body.
class FrontDoor {
 public:
  explicit FrontDoor(Broker& broker) : broker_(broker) {}

  Response post_objects(const Json& body);
  Response post_ask(const Json& body);
  Response get_trace(const std::string& id) const;
  Response get_stats() const;
  Response get_session() const;

  /// Routes a method + path + raw body.
  Response handle(const std::string& method, const std::string& path, const std::string& body);

  Broker& broker() noexcept { return broker_; }

 private:
  Question question_from_request(const Json& body) const;
  Term resolve_subject(const std::string& text) const;

  Broker& broker_;
  mutable std::mutex mutex_;
  std::vector<Json> session_;
};

class HttpFrontDoor {
 public:
  /// Port 0 picks a free port. `ui_dir`, when set, is served under /ui/.
  HttpFrontDoor(FrontDoor& door, const std::string& host, int port,
                std::optional<std::string> ui_dir = std::nullopt);
  ~HttpFrontDoor();

  int port() const noexcept { return port_; }
  /// Serves in a background thread.
  void start();
  /// Serves on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace topo
