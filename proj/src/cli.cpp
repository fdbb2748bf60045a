#include "topo/cli.hpp"

#include "topo/socket.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <fstream>
#include <iostream>
#include <sstream>

namespace topo::cli {

Response LocalBackend::request(const std::string& method, const std::string& path,
                               const std::optional<Json>& body) {
  return door_.handle(method, path, body ? body->dump() : std::string());
}

namespace {

class HttpBackend : public Backend {
 public:
  HttpBackend(const std::string& host, int port) : client_(host, port), where_(host + ":" + std::to_string(port)) {
    client_.set_connection_timeout(5);
    client_.set_read_timeout(600);
  }

  Response request(const std::string& method, const std::string& path,
                   const std::optional<Json>& body) override {
    httplib::Result res = method == "POST"
                              ? client_.Post(path, body ? body->dump() : "{}", "application/json")
                              : client_.Get(path);
    if (!res)
      return {0, Json{{"error", "cannot reach front door at " + where_ + ": " +
                                    httplib::to_string(res.error())}}};
    Json parsed;
    try {
      parsed = Json::parse(res->body);
    } catch (const Json::parse_error&) {
      return {0, Json{{"error", "front door sent a non-JSON response"}}};
    }
    return {res->status, parsed};
  }

 private:
  httplib::Client client_;
  std::string where_;
};

int exit_code_for(int status) {
  if (status == 200) return kOk;
  if (status == 400 || status == 404) return kUserError;
  return kComputationError;
}

std::string join(const Json& items, const std::string& sep) {
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += sep;
    out += i.get<std::string>();
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UserError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string degree_text(const Json& v) {
  if (v.is_null()) return "none";
  if (v.is_string()) return v.get<std::string>();
  return std::to_string(v.get<long long>());
}

}  // namespace

std::unique_ptr<Backend> make_http_backend(const std::string& host, int port) {
  return std::make_unique<HttpBackend>(host, port);
}

// ---------------------------------------------------------------------------

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  bool quoted = false, have = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      have = true;
    } else if (!quoted && std::isspace(static_cast<unsigned char>(c))) {
      if (have) tokens.push_back(current);
      current.clear();
      have = false;
    } else {
      current += c;
      have = true;
    }
  }
  if (quoted) throw UserError("unterminated quote");
  if (have) tokens.push_back(current);
  return tokens;
}

namespace {

long long parse_degree(const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) throw UserError("degree must be an integer, got '" + text + "'");
  if (v < 0) throw UserError("degree must be non-negative");
  return v;
}

}  // namespace

Command parse_command(const std::vector<std::string>& t) {
  if (t.empty()) throw UserError("empty command");
  Command c;
  const std::string& verb = t[0];
  auto arity = [&](std::size_t lo, std::size_t hi, const char* usage) {
    if (t.size() - 1 < lo || t.size() - 1 > hi) throw UserError(std::string("usage: ") + usage);
  };
  if (verb == "ask") {
    arity(2, 3, "ask <homology|homotopy|certify> <expr> [degree]");
    c.kind = Command::Kind::Ask;
    c.question_kind = t[1];
    c.text = t[2];
    if (t.size() == 4) c.degree = parse_degree(t[3]);
  } else if (verb == "new") {
    arity(1, 1, "new <expr>");
    c.kind = Command::Kind::New;
    c.text = t[1];
  } else if (verb == "explain") {
    arity(1, 1, "explain <trace-id|last>");
    c.kind = Command::Kind::Explain;
    c.text = t[1];
  } else if (verb == "stats") {
    arity(0, 0, "stats");
    c.kind = Command::Kind::Stats;
  } else if (verb == "certify") {
    arity(1, 1, "certify <table-file>");
    c.kind = Command::Kind::Certify;
    c.text = t[1];
  } else {
    throw UserError("unknown command '" + verb + "'");
  }
  return c;
}

// ---------------------------------------------------------------------------

std::string render_answer(const Json& r) {
  std::string line = r["question"].get<std::string>() + " = " + r["text"].get<std::string>() +
                     "   [" + join(r["provenance"], ", ") + "]";
  if (r["cached"].get<bool>()) line += " (cached)";
  if (r["value"].is_object() && r["value"].contains("obligations")) {
    for (const auto& o : r["value"]["obligations"]) {
      line += "\n  " + o["axiom"].get<std::string>() + ": ";
      if (o["holds"].get<bool>()) {
        line += "holds";
      } else {
        line += "fails at (";
        bool first = true;
        for (const auto& v : o["counterexample"]) {
          line += (first ? "" : ", ") + std::to_string(v.get<long long>());
          first = false;
        }
        line += ")";
      }
    }
  }
  return line;
}

std::vector<std::string> render_trace(const Json& trace) {
  std::vector<std::string> lines;
  for (const auto& l : trace["lines"]) lines.push_back(l.get<std::string>());
  return lines;
}

Response Session::call(const std::string& method, const std::string& path,
                       const std::optional<Json>& body) {
  return backend_.request(method, path, body);
}

int Session::execute(const Command& c, std::ostream& out, std::ostream& err) {
  Response r;
  try {
    switch (c.kind) {
      case Command::Kind::Ask:
      case Command::Kind::Certify: {
        Json body;
        if (c.kind == Command::Kind::Certify) {
          body = {{"kind", "certify"}, {"subject", read_file(c.text)}};
        } else {
          body = {{"kind", c.question_kind}, {"subject", c.text}};
          if (c.question_kind != "certify") {
            if (!c.degree) throw UserError("a degree is required for " + c.question_kind);
            body["degree"] = *c.degree;
          }
        }
        r = call("POST", "/ask", body);
        if (r.status == 200) {
          asked_ = true;
          last_trace_.reset();
          if (r.body["trace"].is_string()) last_trace_ = r.body["trace"].get<std::string>();
          out << (json_ ? r.body.dump() : render_answer(r.body)) << "\n";
        }
        break;
      }
      case Command::Kind::New: {
        r = call("POST", "/objects", Json{{"expr", c.text}});
        if (r.status == 200) {
          if (json_) {
            out << r.body.dump() << "\n";
          } else {
            const Json& d = r.body["decorations"];
            out << r.body["id"].get<std::string>() << " = " << r.body["expr"].get<std::string>()
                << "   " << d["object_kind"].get<std::string>()
                << ", contractible " << d["contractible"].get<std::string>()
                << ", connectivity " << degree_text(d["connectivity"]) << ", dim_bound "
                << degree_text(d["dim_bound"]) << "\n";
          }
        }
        break;
      }
      case Command::Kind::Explain: {
        std::string id = c.text;
        if (id == "last") {
          if (!asked_) throw UserError("nothing has been asked yet");
          if (!last_trace_) throw UserError("the last answer has no trace");
          id = *last_trace_;
        }
        r = call("GET", "/trace/" + id);
        if (r.status == 200) {
          if (json_) {
            out << r.body.dump() << "\n";
          } else {
            for (const auto& line : render_trace(r.body)) out << "  " << line << "\n";
          }
        }
        break;
      }
      case Command::Kind::Stats: {
        r = call("GET", "/stats");
        if (r.status == 200) {
          if (json_) {
            out << r.body.dump() << "\n";
          } else {
            const Json& s = r.body;
            out << "cache: " << s["cache_size"].get<std::size_t>() << " entries, "
                << s["hits"].get<std::uint64_t>() << " hits, "
                << s["misses"].get<std::uint64_t>() << " misses\n";
            for (const auto& k : s["kernels"])
              out << "kernel " << k["name"].get<std::string>() << " ("
                  << k["transport"].get<std::string>()
                  << "): " << k["invocations"].get<std::uint64_t>() << " invocations\n";
          }
        }
        break;
      }
    }
  } catch (const UserError& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kComputationError;
  }
  if (r.status != 200) {
    err << "error: " << r.body.value("error", std::string("request failed")) << "\n";
    return exit_code_for(r.status);
  }
  return kOk;
}

int Session::run_script(std::istream& in, std::ostream& out, std::ostream& err) {
  int worst = kOk;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first, line.find_last_not_of(" \t") - first + 1);
    out << "> " << line << "\n";
    int code = kOk;
    try {
      code = execute(parse_command(tokenize(line)), out, err);
    } catch (const UserError& e) {
      err << "error: " << e.what() << "\n";
      code = kUserError;
    }
    worst = std::max(worst, code);
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

struct Options {
  std::string rules_path;
  std::vector<std::string> remote_kernels;
  bool json = false;
  std::string connect;
};

hes::RuleBase load_rules(const Options& o) {
  return o.rules_path.empty() ? hes::RuleBase::builtin() : hes::RuleBase::load_file(o.rules_path);
}

std::vector<RemoteSpec> remotes(const Options& o) {
  std::vector<RemoteSpec> out;
  for (const auto& r : o.remote_kernels) out.push_back(parse_remote_spec(r));
  return out;
}

int with_session(const Options& o, std::ostream& out, std::ostream& err,
                 const std::function<int(Session&)>& body) {
  if (!o.connect.empty()) {
    auto [host, port] = wire::parse_endpoint(o.connect);
    auto backend = make_http_backend(host, port);
    Session session(*backend, o.json);
    return body(session);
  }
  auto broker = make_default_broker(load_rules(o), remotes(o));
  FrontDoor door(*broker);
  LocalBackend backend(door);
  Session session(backend, o.json);
  (void)out;
  (void)err;
  return body(session);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Question-answering broker for algebraic topology", "topobroker"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--rules", o.rules_path, "Rule file for the homotopy expert system");
  app.add_option("--remote-kernel", o.remote_kernels, "Use a remote kernel: name=host:port");
  app.add_flag("--json", o.json, "Print front-door JSON instead of text");
  app.add_option("--connect", o.connect, "Send requests to a running front door at host:port");

  int http_port = 8080;
  std::string host = "127.0.0.1";
  std::string ui_dir;
  auto* serve = app.add_subcommand("serve", "Run the broker behind the HTTP front door");
  serve->add_option("--port", http_port, "HTTP port")->capture_default_str();
  serve->add_option("--host", host, "Listen address")->capture_default_str();
  serve->add_option("--ui-dir", ui_dir, "Static files served under /ui/");

  std::string kernel_name;
  int wire_port = -1;
  auto* kernel = app.add_subcommand("kernel", "Serve one kernel over the wire protocol");
  kernel->add_option("name", kernel_name, "simplicial, grouphom or certifier")->required();
  kernel->add_option("--port", wire_port, "TCP port (default 26133 or $TOPOBROKER_SCSCP_PORT)");
  kernel->add_option("--host", host, "Listen address")->capture_default_str();

  std::string kind, expr, path, trace_id;
  std::optional<long long> degree;
  auto* ask = app.add_subcommand("ask", "Ask a question");
  ask->add_option("kind", kind, "homology, homotopy or certify")->required();
  ask->add_option("expr", expr, "Subject: compact expression or object id")->required();
  ask->add_option("degree", degree, "Degree");
  auto* create = app.add_subcommand("new", "Create a decorated object");
  create->add_option("expr", expr, "Compact expression")->required();
  auto* explain = app.add_subcommand("explain", "Show an inference trace");
  explain->add_option("id", trace_id, "Trace id or 'last'")->required();
  auto* stats = app.add_subcommand("stats", "Show cache and kernel counters");
  auto* script = app.add_subcommand("script", "Run commands from a file ('-' for stdin)");
  script->add_option("path", path, "Script file")->required();
  auto* certify = app.add_subcommand("certify", "Certify a multiplication table file");
  certify->add_option("path", path, "Table file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUserError;
  }

  try {
    if (serve->parsed()) {
      auto broker = make_default_broker(load_rules(o), remotes(o));
      FrontDoor door(*broker);
      HttpFrontDoor http(door, host, http_port,
                         ui_dir.empty() ? std::nullopt : std::optional<std::string>(ui_dir));
      out << "topobroker front door listening on http://" << host << ":" << http.port() << "/"
          << std::endl;
      http.run();
      return kOk;
    }
    if (kernel->parsed()) {
      const auto servable = servable_kernels();
      if (std::find(servable.begin(), servable.end(), kernel_name) == servable.end())
        throw UserError("kernel '" + kernel_name + "' cannot be served remotely");
      const std::uint16_t port =
          wire_port < 0 ? wire::default_port() : static_cast<std::uint16_t>(wire_port);
      wire::Server server(kernel_handler(make_local_kernel(kernel_name, load_rules(o))), port, host);
      out << "kernel " << kernel_name << " listening on " << host << ":" << server.port()
          << std::endl;
      server.wait();
      return kOk;
    }
    return with_session(o, out, err, [&](Session& s) {
      if (ask->parsed()) {
        Command c{Command::Kind::Ask, kind, expr, degree};
        if (degree && *degree < 0) throw UserError("degree must be non-negative");
        return s.execute(c, out, err);
      }
      if (create->parsed()) return s.execute({Command::Kind::New, "", expr, std::nullopt}, out, err);
      if (explain->parsed())
        return s.execute({Command::Kind::Explain, "", trace_id, std::nullopt}, out, err);
      if (stats->parsed()) return s.execute({Command::Kind::Stats, "", "", std::nullopt}, out, err);
      if (certify->parsed())
        return s.execute({Command::Kind::Certify, "", path, std::nullopt}, out, err);
      if (path == "-") return s.run_script(std::cin, out, err);
      std::ifstream in(path);
      if (!in) throw UserError("cannot open script " + path);
      return s.run_script(in, out, err);
    });
  } catch (const UserError& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kComputationError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace topo::cli
