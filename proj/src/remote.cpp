#include "topo/broker.hpp"

#include "topo/socket.hpp"

namespace topo {

namespace {

class RemoteKernel : public Kernel {
 public:
  RemoteKernel(std::string name, std::string host, std::uint16_t port)
      : name_(std::move(name)), host_(std::move(host)), port_(port) {
    if (name_ == "simplicial") accepts_ = simplicial_accepts;
    else if (name_ == "grouphom") accepts_ = grouphom_accepts;
    else if (name_ == "certifier") accepts_ = certifier_accepts;
    else throw UserError("kernel '" + name_ + "' cannot run remotely");
  }

  std::string name() const override { return name_; }
  bool accepts(const Question& q) const override { return accepts_(q); }
  std::string transport() const override {
    return "remote(" + host_ + ":" + std::to_string(port_) + ")";
  }

  KernelResult solve(const Question& q, const SubAsk&) override {
    std::lock_guard lock(mutex_);
    const std::string call_id = "c" + std::to_string(++calls_);
    wire::Message reply;
    try {
      if (!conn_) {
        conn_ = std::make_unique<wire::Connection>(wire::connect_tcp(host_, port_));
        wire::negotiate_client(*conn_);
      }
      const Term call = q.to_term();
      const auto& a = call.as<Apply>();
      wire::send_call(*conn_, a.head, a.args, call_id);
      reply = wire::recv_reply(*conn_, call_id);
    } catch (const wire::WireError& e) {
      conn_.reset();
      throw KernelError(name_, e.what());
    }
    if (reply.kind == wire::Message::Kind::Terminated) {
      if (reply.error_code == "system_specific") conn_.reset();
      throw KernelError(name_, reply.error_code + ": " + reply.error_text);
    }
    try {
      return {value_from_term(*reply.result), std::nullopt};
    } catch (const TermError& e) {
      throw KernelError(name_, std::string("malformed result: ") + e.what());
    }
  }

 private:
  std::string name_;
  std::string host_;
  std::uint16_t port_;
  bool (*accepts_)(const Question&) = nullptr;
  std::mutex mutex_;
  std::unique_ptr<wire::Connection> conn_;
  std::uint64_t calls_ = 0;
};

}  // namespace

std::shared_ptr<Kernel> make_remote_kernel(const std::string& name, const std::string& host,
                                           std::uint16_t port) {
  return std::make_shared<RemoteKernel>(name, host, port);
}

RemoteSpec parse_remote_spec(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw UserError("remote kernel must be name=host:port, got '" + text + "'");
  auto [host, port] = wire::parse_endpoint(text.substr(eq + 1));
  return {text.substr(0, eq), host, port};
}

}  // namespace topo
