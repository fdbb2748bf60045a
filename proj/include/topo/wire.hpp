#pragma once

// SCSCP-style session protocol: processing-instruction framed payloads,
// version negotiation, and procedure call / reply messages carried as
// encoded terms.

#include "topo/error.hpp"
#include "topo/term.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace topo::wire {

inline constexpr std::string_view kFrameStart = "<?scscp start ?>\n";
inline constexpr std::string_view kFrameEnd = "\n<?scscp end ?>\n";
inline constexpr std::string_view kVersion = "1.3";
inline constexpr std::string_view kServiceName = "topobroker";
inline constexpr std::uint16_t kDefaultPort = 26133;

class WireError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};
class FramingError : public WireError {
 public:
  using WireError::WireError;
};
class TruncationError : public WireError {
 public:
  using WireError::WireError;
};
class ProtocolError : public WireError {
 public:
  using WireError::WireError;
};
class TransportError : public WireError {
 public:
  using WireError::WireError;
};

/// Thrown by procedure handlers for names they do not serve.
class UnknownProcedureError : public UserError {
 public:
  using UserError::UserError;
};

/// Throws FramingError if `payload` contains a frame delimiter.
std::string frame(std::string_view payload);

// ---------------------------------------------------------------------------
// Byte streams

class ByteStream {
 public:
  virtual ~ByteStream() = default;
  /// Reads at most `n` bytes; returns 0 at end of stream.
  virtual std::size_t read(char* buf, std::size_t n) = 0;
  virtual void write(std::string_view bytes) = 0;
  /// Shuts the stream down in both directions; further reads return 0.
  virtual void close() {}
};

/// In-memory stream: reads from a fixed input, collects writes.
class StringStream : public ByteStream {
 public:
  explicit StringStream(std::string input = {}) : input_(std::move(input)) {}
  std::size_t read(char* buf, std::size_t n) override;
  void write(std::string_view bytes) override { output_ += bytes; }
  const std::string& output() const noexcept { return output_; }

 private:
  std::string input_;
  std::size_t pos_ = 0;
  std::string output_;
};

/// Wraps another stream and keeps a copy of every byte in each direction.
class RecordingStream : public ByteStream {
 public:
  explicit RecordingStream(std::unique_ptr<ByteStream> inner) : inner_(std::move(inner)) {}
  std::size_t read(char* buf, std::size_t n) override;
  void write(std::string_view bytes) override;
  void close() override { inner_->close(); }

  const std::string& sent() const noexcept { return sent_; }
  const std::string& received() const noexcept { return received_; }

 private:
  std::unique_ptr<ByteStream> inner_;
  std::string sent_;
  std::string received_;
};

/// Buffered reader over a stream, delimiting lines and frames.
class Reader {
 public:
  explicit Reader(ByteStream& stream) : stream_(stream) {}

  /// Next payload, or nullopt on a clean end of stream between frames.
  /// Throws TruncationError if the stream ends mid-frame and
  /// ProtocolError on non-whitespace bytes outside a frame.
  std::optional<std::string> next_frame();
  /// Next '\n'-terminated line without the terminator; nullopt at end.
  std::optional<std::string> next_line();

 private:
  bool fill();
  std::optional<char> peek();

  ByteStream& stream_;
  std::string buffer_;
  std::size_t pos_ = 0;
};

/// Reads exactly one frame; end of stream before a frame is a
/// TruncationError as well.
std::string deframe(Reader& reader);

// ---------------------------------------------------------------------------
// Messages

struct Message {
  enum class Kind { Call, Completed, Terminated };

  Kind kind = Kind::Call;
  std::string call_id;
  // Call
  Symbol procedure;
  std::vector<Term> args;
  // Completed
  std::optional<Term> result;
  // Terminated
  std::string error_code;
  std::string error_text;

  static Message call(Symbol procedure, std::vector<Term> args, std::string call_id);
  static Message completed(std::string call_id, Term result);
  static Message terminated(std::string call_id, std::string code, std::string text);
};

Term to_term(const Message& m);
/// Throws ProtocolError for terms that are not protocol messages.
Message message_from_term(const Term& t);

// ---------------------------------------------------------------------------
// Connections

/// A negotiated or fresh byte-stream connection. Not thread-safe; one
/// session owns it at a time.
class Connection {
 public:
  explicit Connection(std::unique_ptr<ByteStream> stream)
      : stream_(std::move(stream)), reader_(*stream_) {}

  void send_raw(std::string_view bytes) { stream_->write(bytes); }
  void send_frame(std::string_view payload) { stream_->write(frame(payload)); }
  void send(const Message& m) { send_frame(encode(to_term(m))); }
  std::optional<std::string> recv_frame() { return reader_.next_frame(); }
  std::optional<std::string> recv_line() { return reader_.next_line(); }
  /// Next message; nullopt on a clean end of stream.
  std::optional<Message> recv();
  void close() { stream_->close(); }

  ByteStream& stream() noexcept { return *stream_; }

 private:
  std::unique_ptr<ByteStream> stream_;
  Reader reader_;
};

/// Server side of connection initiation. On an unsupported client version
/// sends the quit instruction, closes, and throws ProtocolError.
std::string negotiate_server(Connection& conn);
/// Client side; `version` is what the client asks for.
std::string negotiate_client(Connection& conn, std::string_view version = kVersion);

void send_call(Connection& conn, const Symbol& procedure, const std::vector<Term>& args,
               const std::string& call_id);
/// Blocks until the reply for `call_id` arrives. Transport failures are
/// reported as Terminated("system_specific"); a reply for another call id
/// or a non-reply message throws ProtocolError.
Message recv_reply(Connection& conn, const std::string& call_id);

/// Serves procedure calls. Handlers throw UnknownProcedureError,
/// UserError, or ComputationError; these become Terminated replies with
/// codes unknown_procedure, invalid_arguments, and computation_failed.
using Handler = std::function<Term(const Symbol& procedure, const std::vector<Term>& args)>;

/// Negotiates and answers calls until the peer closes the connection.
void serve_connection(Connection& conn, const Handler& handler);

}  // namespace topo::wire
