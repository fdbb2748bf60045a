#include "topo/wire.hpp"

#include <cctype>
#include <cstring>
#include <regex>
#include <sstream>

namespace topo::wire {

std::string frame(std::string_view payload) {
  // A payload ending in "\n<?scscp end ?>" would also be ambiguous, but
  // that contains the bare end instruction and is rejected below.
  if (payload.find("<?scscp start ?>") != std::string_view::npos ||
      payload.find("<?scscp end ?>") != std::string_view::npos)
    throw FramingError("payload contains a frame delimiter");
  std::string out;
  out.reserve(kFrameStart.size() + payload.size() + kFrameEnd.size());
  out += kFrameStart;
  out += payload;
  out += kFrameEnd;
  return out;
}

std::size_t StringStream::read(char* buf, std::size_t n) {
  const std::size_t count = std::min(n, input_.size() - pos_);
  std::memcpy(buf, input_.data() + pos_, count);
  pos_ += count;
  return count;
}

std::size_t RecordingStream::read(char* buf, std::size_t n) {
  const std::size_t count = inner_->read(buf, n);
  received_.append(buf, count);
  return count;
}

void RecordingStream::write(std::string_view bytes) {
  sent_ += bytes;
  inner_->write(bytes);
}

// ---------------------------------------------------------------------------

bool Reader::fill() {
  if (pos_ > 0 && pos_ == buffer_.size()) {
    buffer_.clear();
    pos_ = 0;
  }
  char chunk[4096];
  const std::size_t n = stream_.read(chunk, sizeof chunk);
  buffer_.append(chunk, n);
  return n > 0;
}

std::optional<char> Reader::peek() {
  if (pos_ == buffer_.size() && !fill()) return std::nullopt;
  return buffer_[pos_];
}

std::optional<std::string> Reader::next_frame() {
  while (auto c = peek()) {
    if (!std::isspace(static_cast<unsigned char>(*c))) break;
    ++pos_;
  }
  if (!peek()) return std::nullopt;

  for (std::size_t i = 0; i < kFrameStart.size(); ++i) {
    auto c = peek();
    if (!c) throw TruncationError("stream ended inside a frame start");
    if (*c != kFrameStart[i]) {
      std::string rest = buffer_.substr(pos_ - i, 64);
      if (rest.rfind("<?scscp quit", 0) == 0)
        throw ProtocolError("peer quit: " + rest.substr(0, rest.find('\n')));
      throw ProtocolError("unexpected bytes outside a frame");
    }
    ++pos_;
  }

  std::string payload;
  for (;;) {
    auto c = peek();
    if (!c) throw TruncationError("stream ended inside a frame");
    payload += *c;
    ++pos_;
    if (payload.size() >= kFrameEnd.size() &&
        std::string_view(payload).substr(payload.size() - kFrameEnd.size()) == kFrameEnd) {
      payload.resize(payload.size() - kFrameEnd.size());
      return payload;
    }
  }
}

std::optional<std::string> Reader::next_line() {
  std::string line;
  for (;;) {
    auto c = peek();
    if (!c) {
      if (line.empty()) return std::nullopt;
      throw TruncationError("stream ended inside a line");
    }
    ++pos_;
    if (*c == '\n') return line;
    line += *c;
  }
}

std::string deframe(Reader& reader) {
  auto payload = reader.next_frame();
  if (!payload) throw TruncationError("stream ended before a frame");
  return *payload;
}

// ---------------------------------------------------------------------------

Message Message::call(Symbol procedure, std::vector<Term> args, std::string call_id) {
  Message m;
  m.kind = Kind::Call;
  m.procedure = std::move(procedure);
  m.args = std::move(args);
  m.call_id = std::move(call_id);
  return m;
}

Message Message::completed(std::string call_id, Term result) {
  Message m;
  m.kind = Kind::Completed;
  m.call_id = std::move(call_id);
  m.result = std::move(result);
  return m;
}

Message Message::terminated(std::string call_id, std::string code, std::string text) {
  Message m;
  m.kind = Kind::Terminated;
  m.call_id = std::move(call_id);
  m.error_code = std::move(code);
  m.error_text = std::move(text);
  return m;
}

Term to_term(const Message& m) {
  if (m.call_id.empty()) throw ProtocolError("message without call id");
  Term id = apply("proto1", "call_id", {str(m.call_id)});
  switch (m.kind) {
    case Message::Kind::Call: {
      std::vector<Term> args{Term(m.procedure)};
      args.insert(args.end(), m.args.begin(), m.args.end());
      args.push_back(std::move(id));
      return apply("proto1", "procedure_call", std::move(args));
    }
    case Message::Kind::Completed:
      return apply("proto1", "procedure_completed", {std::move(id), *m.result});
    case Message::Kind::Terminated:
      return apply("proto1", "procedure_terminated",
                   {std::move(id),
                    apply("proto1", "error", {str(m.error_code), str(m.error_text)})});
  }
  throw ProtocolError("bad message kind");
}

namespace {

std::string call_id_of(const Term& t) {
  if (!t.is_apply_of("proto1", "call_id")) throw ProtocolError("expected proto1.call_id");
  const Term& v = t.as<Apply>().args.front();
  if (!v.is<Str>() || v.as<Str>().value.empty())
    throw ProtocolError("call id must be a non-empty string");
  return v.as<Str>().value;
}

}  // namespace

Message message_from_term(const Term& t) {
  if (t.is_apply_of("proto1", "procedure_call")) {
    const auto& a = t.as<Apply>().args;
    if (!a.front().is<Symbol>()) throw ProtocolError("procedure name must be a symbol");
    return Message::call(a.front().as<Symbol>(), std::vector<Term>(a.begin() + 1, a.end() - 1),
                         call_id_of(a.back()));
  }
  if (t.is_apply_of("proto1", "procedure_completed")) {
    const auto& a = t.as<Apply>().args;
    return Message::completed(call_id_of(a[0]), a[1]);
  }
  if (t.is_apply_of("proto1", "procedure_terminated")) {
    const auto& a = t.as<Apply>().args;
    if (!a[1].is_apply_of("proto1", "error")) throw ProtocolError("expected proto1.error");
    const auto& e = a[1].as<Apply>().args;
    if (!e[0].is<Str>() || !e[1].is<Str>()) throw ProtocolError("error fields must be strings");
    return Message::terminated(call_id_of(a[0]), e[0].as<Str>().value, e[1].as<Str>().value);
  }
  throw ProtocolError("not a protocol message");
}

std::optional<Message> Connection::recv() {
  auto payload = recv_frame();
  if (!payload) return std::nullopt;
  try {
    return message_from_term(decode(*payload));
  } catch (const TermError& e) {
    throw ProtocolError(std::string("undecodable message: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

std::optional<std::string> pi_attribute(const std::string& line, const std::string& key) {
  std::regex re("\\b" + key + "=\"([^\"]*)\"");
  std::smatch m;
  if (!std::regex_search(line, m, re)) return std::nullopt;
  return m[1].str();
}

bool is_instruction(const std::string& line) {
  return line.rfind("<?scscp ", 0) == 0 && line.size() >= 10 &&
         line.compare(line.size() - 2, 2, "?>") == 0;
}

}  // namespace

std::string negotiate_server(Connection& conn) {
  conn.send_raw("<?scscp service_name=\"" + std::string(kServiceName) +
                "\" scscp_versions=\"" + std::string(kVersion) + "\" ?>\n");
  auto line = conn.recv_line();
  if (!line) throw TransportError("client closed during negotiation");
  auto version = is_instruction(*line) ? pi_attribute(*line, "version") : std::nullopt;
  if (!version) {
    conn.send_raw("<?scscp quit reason=\"protocol error\" ?>\n");
    conn.close();
    throw ProtocolError("malformed version request");
  }
  if (*version != kVersion) {
    conn.send_raw("<?scscp quit reason=\"unsupported version\" ?>\n");
    conn.close();
    throw ProtocolError("client requested unsupported version " + *version);
  }
  return *version;
}

std::string negotiate_client(Connection& conn, std::string_view version) {
  auto line = conn.recv_line();
  if (!line) throw TransportError("server closed during negotiation");
  auto offered = is_instruction(*line) ? pi_attribute(*line, "scscp_versions") : std::nullopt;
  if (!offered || !pi_attribute(*line, "service_name"))
    throw ProtocolError("malformed server greeting");
  bool supported = false;
  std::istringstream versions(*offered);
  for (std::string v; versions >> v;) supported = supported || v == kVersion;
  if (!supported) throw ProtocolError("server offers no supported version: " + *offered);
  conn.send_raw("<?scscp version=\"" + std::string(version) + "\" ?>\n");
  return std::string(version);
}

void send_call(Connection& conn, const Symbol& procedure, const std::vector<Term>& args,
               const std::string& call_id) {
  conn.send(Message::call(procedure, args, call_id));
}

Message recv_reply(Connection& conn, const std::string& call_id) {
  std::optional<Message> reply;
  try {
    reply = conn.recv();
  } catch (const TransportError& e) {
    return Message::terminated(call_id, "system_specific", e.what());
  } catch (const TruncationError& e) {
    return Message::terminated(call_id, "system_specific", e.what());
  }
  if (!reply)
    return Message::terminated(call_id, "system_specific", "connection closed by peer");
  if (reply->kind == Message::Kind::Call) throw ProtocolError("expected a reply, got a call");
  if (reply->call_id != call_id)
    throw ProtocolError("reply for unknown call id '" + reply->call_id + "'");
  return *reply;
}

void serve_connection(Connection& conn, const Handler& handler) {
  negotiate_server(conn);
  for (;;) {
    std::optional<Message> msg;
    try {
      msg = conn.recv();
    } catch (const WireError&) {
      conn.close();
      return;
    }
    if (!msg) return;
    if (msg->kind != Message::Kind::Call) {
      conn.send(Message::terminated(msg->call_id, "system_specific", "expected a call"));
      continue;
    }
    Message reply;
    try {
      Term result = handler(msg->procedure, msg->args);
      validate(result);
      reply = Message::completed(msg->call_id, std::move(result));
    } catch (const UnknownProcedureError& e) {
      reply = Message::terminated(msg->call_id, "unknown_procedure", e.what());
    } catch (const UserError& e) {
      reply = Message::terminated(msg->call_id, "invalid_arguments", e.what());
    } catch (const ComputationError& e) {
      reply = Message::terminated(msg->call_id, "computation_failed", e.what());
    } catch (const std::exception& e) {
      reply = Message::terminated(msg->call_id, "system_specific", e.what());
    }
    try {
      conn.send(reply);
    } catch (const WireError&) {
      conn.close();
      return;
    }
  }
}

}  // namespace topo::wire
