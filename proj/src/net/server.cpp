#include "rtms/net/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "rtms/devices.hpp"
#include "rtms/igtl/codec.hpp"

namespace rtms::net {

namespace {

std::string peer_string(const sockaddr_in& addr) {
  char buf[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
  return std::string(buf) + ":" + std::to_string(ntohs(addr.sin_port));
}

}  // namespace

void validate(const EndpointConfig& config) {
  if (config.port < 1) {
    throw TransportError(TransportErrc::bad_config, "port must be in [1, 65535]");
  }
  if (config.accept_limit < 1) {
    throw TransportError(TransportErrc::bad_config, "accept_limit must be >= 1");
  }
}

Server::Server(EndpointConfig config, std::size_t queue_bound)
    : config_(std::move(config)), hub_(queue_bound) {}

Server::~Server() {
  stop();
}

void Server::start() {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) {
    throw TransportError(TransportErrc::bind_failed, "socket: " + std::string(strerror(errno)));
  }
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(config_.port);
  if (::inet_pton(AF_INET, config_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw TransportError(TransportErrc::bind_failed,
                         "bad listen address \"" + config_.host + "\"");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    std::string err = strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw TransportError(TransportErrc::bind_failed,
                         "bind " + config_.host + ":" + std::to_string(config_.port) +
                             ": " + err);
  }
  if (::listen(listen_fd_, 8) != 0) {
    std::string err = strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw TransportError(TransportErrc::bind_failed, "listen: " + err);
  }

  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  bound_port_ = ntohs(bound.sin_port);

  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::accept_loop() {
  while (running_) {
    sockaddr_in peer{};
    socklen_t len = sizeof(peer);
    int fd = ::accept(listen_fd_, reinterpret_cast<sockaddr*>(&peer), &len);
    if (fd < 0) {
      if (running_ && (errno == EINTR || errno == ECONNABORTED)) {
        continue;
      }
      break;  // listener shut down
    }
    if (hub_.session_count() >= static_cast<std::size_t>(config_.accept_limit)) {
      // Refuse with a STATUS notice, then close.
      igtl::StatusBody refusal;
      refusal.code = igtl::kStatusError;
      refusal.error_name = "REFUSED";
      refusal.message = "accept limit " + std::to_string(config_.accept_limit) +
                        " reached";
      auto bytes = igtl::encode(igtl::make_status(devices::kServer, refusal));
      ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
      ::close(fd);
      continue;
    }
    hub_.adopt_socket(fd, peer_string(peer));
  }
}

void Server::stop() {
  if (!running_.exchange(false)) {
    if (listen_fd_ >= 0) {
      ::close(listen_fd_);
      listen_fd_ = -1;
    }
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;
  if (acceptor_.joinable()) {
    acceptor_.join();
  }
  hub_.close_all();
}

Client::Client(const std::string& host, uint16_t port, std::size_t queue_bound)
    : hub_(queue_bound) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &result);
  if (rc != 0 || !result) {
    throw TransportError(TransportErrc::connect_failed,
                         "resolve " + host + ": " + gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      break;
    }
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(result);
  if (fd < 0) {
    throw TransportError(TransportErrc::connect_failed,
                         "connect " + host + ":" + std::to_string(port) + ": " +
                             strerror(errno));
  }
  session_id_ = hub_.adopt_socket(fd, host + ":" + std::to_string(port));
}

}  // namespace rtms::net
