#include "topo/frontdoor.hpp"

#include "topo/compact.hpp"
#include "topo/expr.hpp"

#include "httplib.h"

#include <regex>
#include <thread>

namespace topo {

namespace {

Json big(const BigInt& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return static_cast<long long>(v);
  return v.str();
}

Json degree_json(const hes::Degree& d) {
  if (d.infinite()) return "infinity";
  return d.value();
}

Response error(int status, const std::string& text) { return {status, Json{{"error", text}}}; }

}  // namespace

Json to_json(const Decoration& d) {
  Json j;
  j["object_kind"] = d.object_kind == Decoration::Kind::Space ? "space" : "group";
  j["contractible"] = std::string(tri_name(d.contractible));
  j["connectivity"] = d.connectivity ? degree_json(*d.connectivity) : Json(nullptr);
  j["dim_bound"] = d.dim_bound ? Json(*d.dim_bound) : Json(nullptr);
  return j;
}

Json to_json(const AnswerValue& v) {
  if (auto* g = std::get_if<FgAbelianGroup>(&v)) {
    Json torsion = Json::array();
    for (const auto& d : g->torsion()) torsion.push_back(big(d));
    return Json{{"rank", g->rank()}, {"torsion", torsion}};
  }
  if (std::holds_alternative<Unknown>(v)) return "unknown";
  const auto& r = std::get<CertReport>(v);
  Json obligations = Json::array();
  for (const auto& o : r.obligations) {
    Json cex = nullptr;
    if (o.counterexample) cex = *o.counterexample;
    obligations.push_back(
        {{"axiom", o.axiom}, {"statement", o.statement}, {"holds", o.holds}, {"counterexample", cex}});
  }
  return Json{{"status", r.status()}, {"obligations", obligations}};
}

Json to_json(const StoredTrace& t) {
  Json steps = Json::array();
  const auto lines = hes::explain(t.trace);
  for (std::size_t i = 0; i < t.trace.steps.size(); ++i) {
    const auto& s = t.trace.steps[i];
    Json bindings = Json::object();
    for (const auto& [k, v] : s.bindings) bindings[k] = hes::to_string(v);
    Json consumed = Json::array();
    for (const auto& f : s.consumed) consumed.push_back(f.to_string());
    Json subs = Json::array();
    for (const auto& q : s.subquestions)
      subs.push_back({{"question", "H_" + std::to_string(q.degree) + "(" + to_compact(q.subject) + ")"},
                      {"answer", q.answer ? q.answer->to_string() : "unknown"}});
    steps.push_back({{"rule", s.rule_id},
                     {"cite", s.cite},
                     {"bindings", bindings},
                     {"consumed", consumed},
                     {"produced", s.produced.to_string()},
                     {"subquestions", subs},
                     {"line", lines[i]}});
  }
  return Json{{"id", t.id}, {"question", t.question}, {"steps", steps}, {"lines", lines}};
}

Json to_json(const Stats& s) {
  Json kernels = Json::array();
  for (const auto& k : s.kernels)
    kernels.push_back({{"name", k.name}, {"transport", k.transport}, {"invocations", k.invocations}});
  Json entries = Json::array();
  for (const auto& e : s.entries) entries.push_back({{"question", e.question}, {"hits", e.hits}});
  return Json{{"cache_size", s.cache_size},
              {"hits", s.hits},
              {"misses", s.misses},
              {"kernels", kernels},
              {"entries", entries}};
}

// ---------------------------------------------------------------------------

Term FrontDoor::resolve_subject(const std::string& text) const {
  static const std::regex object_id("o[0-9]+");
  if (std::regex_match(text, object_id)) {
    auto rec = broker_.object(text);
    if (!rec) throw UserError("no object with id " + text);
    return rec->expr;
  }
  return to_term(parse_compact(text));
}

Question FrontDoor::question_from_request(const Json& body) const {
  if (!body.is_object()) throw UserError("request body must be a JSON object");
  if (!body.contains("kind") || !body["kind"].is_string())
    throw UserError("missing string field 'kind'");
  if (!body.contains("subject") || !body["subject"].is_string())
    throw UserError("missing string field 'subject'");
  Question q;
  q.kind = parse_kind(body["kind"].get<std::string>());
  const std::string subject = body["subject"].get<std::string>();
  if (q.kind == QuestionKind::Certify) {
    MultiplicationTable t = parse_table(subject);
    if (body.contains("identity")) {
      if (!body["identity"].is_number_integer()) throw UserError("'identity' must be an integer");
      t = MultiplicationTable(t.rows(), body["identity"].get<long long>());
    }
    q.subject = to_term(t);
    return q;
  }
  if (!body.contains("degree") || !body["degree"].is_number_integer())
    throw UserError("missing integer field 'degree'");
  const auto degree = body["degree"].get<long long>();
  if (degree < 0) throw UserError("degree must be non-negative");
  if (degree > 1000) throw UserError("degree is too large");
  q.degree = static_cast<int>(degree);
  q.subject = resolve_subject(subject);
  return q;
}

Response FrontDoor::post_objects(const Json& body) {
  if (!body.is_object() || !body.contains("expr") || !body["expr"].is_string())
    throw UserError("missing string field 'expr'");
  ObjectRecord rec = broker_.new_object(to_term(parse_compact(body["expr"].get<std::string>())));
  Json out{{"id", rec.id}, {"expr", to_compact(rec.expr)}, {"decorations", to_json(rec.decoration)}};
  std::lock_guard lock(mutex_);
  Json entry{{"type", "object"}};
  entry.update(out);
  session_.push_back(entry);
  return {200, out};
}

Response FrontDoor::post_ask(const Json& body) {
  const Question q = question_from_request(body);
  const Answer a = broker_.ask(q);
  Json value = to_json(a.value);
  if (q.kind == QuestionKind::Certify) value["document"] = obligations(table_from_term(q.subject));
  Json out{{"question", q.text()},
           {"kind", std::string(kind_name(q.kind))},
           {"value", value},
           {"text", value_text(a.value)},
           {"provenance", a.provenance},
           {"trace", a.trace_id ? Json(*a.trace_id) : Json(nullptr)},
           {"cached", a.cached}};
  std::lock_guard lock(mutex_);
  Json entry{{"type", "question"}};
  entry.update(out);
  session_.push_back(entry);
  return {200, out};
}

Response FrontDoor::get_trace(const std::string& id) const {
  auto t = broker_.trace(id);
  if (!t) return error(404, "no trace with id " + id);
  return {200, to_json(*t)};
}

Response FrontDoor::get_stats() const { return {200, to_json(broker_.stats())}; }

Response FrontDoor::get_session() const {
  std::lock_guard lock(mutex_);
  Json entries = Json::array();
  for (const auto& e : session_) entries.push_back(e);
  return {200, Json{{"entries", entries}}};
}

Response FrontDoor::handle(const std::string& method, const std::string& path,
                           const std::string& body) {
  try {
    auto parse_body = [&body]() {
      try {
        return Json::parse(body);
      } catch (const Json::parse_error& e) {
        throw UserError(std::string("malformed JSON: ") + e.what());
      }
    };
    if (method == "POST" && path == "/objects") return post_objects(parse_body());
    if (method == "POST" && path == "/ask") return post_ask(parse_body());
    if (method == "GET" && path == "/stats") return get_stats();
    if (method == "GET" && path == "/session") return get_session();
    if (method == "GET" && path.rfind("/trace/", 0) == 0) return get_trace(path.substr(7));
    return error(404, "no route for " + method + " " + path);
  } catch (const UserError& e) {
    return error(400, e.what());
  } catch (const ComputationError& e) {
    return error(422, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

// ---------------------------------------------------------------------------

struct HttpFrontDoor::Impl {
  httplib::Server server;
  std::thread thread;
};

HttpFrontDoor::HttpFrontDoor(FrontDoor& door, const std::string& host, int port,
                             std::optional<std::string> ui_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;
  auto forward = [&door](const httplib::Request& req, httplib::Response& res) {
    Response r = door.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  srv.Post("/objects", forward);
  srv.Post("/ask", forward);
  srv.Get("/stats", forward);
  srv.Get("/session", forward);
  srv.Get(R"(/trace/([A-Za-z0-9]+))", forward);
  if (ui_dir && !srv.set_mount_point("/ui", *ui_dir))
    throw UserError("cannot serve UI directory " + *ui_dir);
  if (port == 0) {
    port_ = srv.bind_to_any_port(host);
  } else {
    port_ = srv.bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw ComputationError("cannot listen on " + host + ":" + std::to_string(port));
}

HttpFrontDoor::~HttpFrontDoor() { stop(); }

void HttpFrontDoor::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpFrontDoor::run() { impl_->server.listen_after_bind(); }

void HttpFrontDoor::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace topo
