#pragma once

#include <cstdint>
#include <string>

#include "rtms/net/hub.hpp"

namespace rtms::net {

struct EndpointConfig {
  std::string host = "127.0.0.1";
  uint16_t port = 18944;  // conventional OpenIGTLink port
  enum class Role { server, client } role = Role::server;
  int accept_limit = 4;
};

// User-facing configuration check: port in [1, 65535], accept_limit >= 1.
// (Internally a Server built with port 0 binds an ephemeral port, which
// tests rely on.)
void validate(const EndpointConfig& config);

// OpenIGTLink TCP server. Accepts up to accept_limit concurrent
// sessions; connections beyond the limit receive a STATUS refusal
// notice and are closed.
class Server {
 public:
  explicit Server(EndpointConfig config,
                  std::size_t queue_bound = Hub::kDefaultQueueBound);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  void start();  // throws TransportError on bind failure
  void stop();

  uint16_t port() const { return bound_port_; }
  Hub& hub() { return hub_; }

 private:
  void accept_loop();

  EndpointConfig config_;
  Hub hub_;
  int listen_fd_ = -1;
  uint16_t bound_port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
};

// Client side of a session: a Hub holding exactly one connection.
class Client {
 public:
  Client(const std::string& host, uint16_t port,
         std::size_t queue_bound = Hub::kDefaultQueueBound);
  ~Client() = default;

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void send(const igtl::IgtlMessage& message) { hub_.send(session_id_, message); }
  std::shared_ptr<MessageFeed> subscribe(Selector selector) {
    return hub_.subscribe(std::move(selector));
  }
  void close() { hub_.close_session(session_id_); }
  bool connected() const {
    return hub_.session_state(session_id_) == SessionState::open;
  }
  uint64_t session_id() const { return session_id_; }
  Hub& hub() { return hub_; }

 private:
  Hub hub_;
  uint64_t session_id_ = 0;
};

}  // namespace rtms::net
