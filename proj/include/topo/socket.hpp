#pragma once

// POSIX socket transports for the wire protocol.

#include "topo/wire.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace topo::wire {

/// Owns a connected socket descriptor.
class SocketStream : public ByteStream {
 public:
  explicit SocketStream(int fd) : fd_(fd) {}
  ~SocketStream() override;
  SocketStream(const SocketStream&) = delete;
  SocketStream& operator=(const SocketStream&) = delete;

  std::size_t read(char* buf, std::size_t n) override;
  void write(std::string_view bytes) override;
  void close() override;

 private:
  int fd_;
};

/// Two connected in-process endpoints.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> socket_pair();

/// Throws TransportError if the endpoint is unreachable.
std::unique_ptr<ByteStream> connect_tcp(const std::string& host, std::uint16_t port);

/// Splits "host:port"; throws UserError on malformed input.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

/// The wire port: TOPOBROKER_SCSCP_PORT if set, else kDefaultPort.
std::uint16_t default_port();

class Listener {
 public:
  /// Port 0 picks a free port.
  explicit Listener(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Blocks; returns nullptr once the listener is closed.
  std::unique_ptr<ByteStream> accept();
  void close();

 private:
  std::atomic<int> fd_;
  std::uint16_t port_ = 0;
};

/// Accept loop answering calls with a handler, one thread per connection.
class Server {
 public:
  Server(Handler handler, std::uint16_t port, const std::string& host = "127.0.0.1");
  ~Server();

  std::uint16_t port() const noexcept { return listener_.port(); }
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  void accept_loop();

  Handler handler_;
  Listener listener_;
  std::thread acceptor_;
  std::mutex mutex_;
  std::vector<std::thread> workers_;
  std::vector<ByteStream*> open_;
  std::atomic<bool> stopped_{false};
};

}  // namespace topo::wire
