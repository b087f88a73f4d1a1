#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rtms/net/feed.hpp"

namespace rtms::net {

enum class TransportErrc {
  bind_failed,
  connect_failed,
  closed_session,
  send_failed,
  bad_config,
};

class TransportError : public std::runtime_error {
 public:
  TransportError(TransportErrc code, std::string what)
      : std::runtime_error(std::move(what)), code_(code) {}
  TransportErrc code() const { return code_; }

 private:
  TransportErrc code_;
};

enum class SessionState { open, closing, closed };

// Owns all sockets and session threads: one reader and one writer per
// session. Wire bytes never leave this class; subscribers see decoded
// messages only. Outbound queues are bounded: once full, a TRANSFORM
// replaces the oldest queued TRANSFORM for the same device (latest-wins
// for pose streams), while STATUS and POLYDATA are never dropped.
class Hub {
 public:
  explicit Hub(std::size_t outbound_queue_bound = kDefaultQueueBound);
  ~Hub();

  Hub(const Hub&) = delete;
  Hub& operator=(const Hub&) = delete;

  std::shared_ptr<MessageFeed> subscribe(Selector selector);

  // Encode and enqueue for one session; throws on closed sessions, and
  // codec errors propagate.
  void send(uint64_t session_id, const igtl::IgtlMessage& message);

  // Send to every open session; returns the number reached.
  std::size_t broadcast(const igtl::IgtlMessage& message);

  std::vector<uint64_t> open_sessions() const;
  std::size_t session_count() const;
  SessionState session_state(uint64_t session_id) const;
  std::string peer(uint64_t session_id) const;

  // Drains the outbound queue (bounded wait), then tears the socket
  // down. Subscribers receive a synthetic session-closed event.
  void close_session(uint64_t session_id,
                     std::chrono::milliseconds drain_timeout = std::chrono::seconds(2));
  void close_all();

  // Take ownership of a connected socket and start its session threads.
  uint64_t adopt_socket(int fd, std::string peer);

  static constexpr std::size_t kDefaultQueueBound = 64;

 private:
  struct Session;

  void reader_loop(std::shared_ptr<Session> s);
  void writer_loop(std::shared_ptr<Session> s);
  void dispatch_message(uint64_t session_id, igtl::IgtlMessage message);
  void dispatch_closed(Session& s);

  mutable std::mutex mutex_;  // sessions_ and subscribers_
  std::map<uint64_t, std::shared_ptr<Session>> sessions_;
  std::vector<std::pair<Selector, std::weak_ptr<MessageFeed>>> subscribers_;
  std::size_t queue_bound_;
  std::atomic<uint64_t> next_session_id_{1};
};

}  // namespace rtms::net
