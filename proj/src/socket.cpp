#include "topo/socket.hpp"

#include <algorithm>
#include <arpa/inet.h>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

namespace topo::wire {

namespace {

std::string errno_text(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

}  // namespace

SocketStream::~SocketStream() {
  if (fd_ >= 0) ::close(fd_);
}

std::size_t SocketStream::read(char* buf, std::size_t n) {
  for (;;) {
    const ssize_t got = ::recv(fd_, buf, n, 0);
    if (got >= 0) return static_cast<std::size_t>(got);
    if (errno == EINTR) continue;
    if (errno == ECONNRESET || errno == EBADF || errno == ENOTCONN) return 0;
    throw TransportError(errno_text("recv"));
  }
}

void SocketStream::write(std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t sent = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (sent < 0) {
      if (errno == EINTR) continue;
      throw TransportError(errno_text("send"));
    }
    bytes.remove_prefix(static_cast<std::size_t>(sent));
  }
}

void SocketStream::close() { ::shutdown(fd_, SHUT_RDWR); }

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> socket_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw TransportError(errno_text("socketpair"));
  return {std::make_unique<SocketStream>(fds[0]), std::make_unique<SocketStream>(fds[1])};
}

std::unique_ptr<ByteStream> connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0)
    throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  std::string last_error = "no addresses";
  for (addrinfo* a = found; a; a = a->ai_next) {
    int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      ::freeaddrinfo(found);
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<SocketStream>(fd);
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(found);
  throw TransportError("cannot connect to " + host + ":" + service + ": " + last_error);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw UserError("endpoint must be host:port, got '" + text + "'");
  const std::string port_text = text.substr(colon + 1);
  if (!std::all_of(port_text.begin(), port_text.end(), ::isdigit) || port_text.size() > 5)
    throw UserError("bad port in '" + text + "'");
  const long port = std::stol(port_text);
  if (port < 1 || port > 65535) throw UserError("port out of range in '" + text + "'");
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

std::uint16_t default_port() {
  if (const char* env = std::getenv("TOPOBROKER_SCSCP_PORT"); env && *env)
    return parse_endpoint(std::string("localhost:") + env).second;
  return kDefaultPort;
}

// ---------------------------------------------------------------------------

Listener::Listener(std::uint16_t port, const std::string& host) : fd_(-1) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError(errno_text("socket"));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw UserError("listen address must be an IPv4 literal, got '" + host + "'");
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(fd, 16) != 0) {
    std::string why = errno_text("cannot listen on port " + std::to_string(port));
    ::close(fd);
    throw TransportError(why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  fd_ = fd;
}

Listener::~Listener() {
  close();
}

std::unique_ptr<ByteStream> Listener::accept() {
  for (;;) {
    const int lfd = fd_.load();
    if (lfd < 0) return nullptr;
    int fd = ::accept(lfd, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return std::make_unique<SocketStream>(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return nullptr;
  }
}

void Listener::close() {
  const int fd = fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

// ---------------------------------------------------------------------------

Server::Server(Handler handler, std::uint16_t port, const std::string& host)
    : handler_(std::move(handler)), listener_(port, host) {
  acceptor_ = std::thread([this] { accept_loop(); });
}

Server::~Server() {
  stop();
}

void Server::accept_loop() {
  while (auto stream = listener_.accept()) {
    std::lock_guard lock(mutex_);
    if (stopped_) break;
    ByteStream* raw = stream.get();
    open_.push_back(raw);
    workers_.emplace_back([this, s = std::move(stream), raw]() mutable {
      Connection conn(std::move(s));
      try {
        serve_connection(conn, handler_);
      } catch (const std::exception&) {
        // Negotiation failures end the connection; the server keeps going.
      }
      std::lock_guard inner(mutex_);
      open_.erase(std::remove(open_.begin(), open_.end(), raw), open_.end());
    });
  }
}

void Server::stop() {
  if (stopped_.exchange(true)) return;
  listener_.close();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(mutex_);
    for (ByteStream* s : open_) s->close();
    workers.swap(workers_);
  }
  for (auto& w : workers) w.join();
}

void Server::wait() {
  while (!stopped_) std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

}  // namespace topo::wire
