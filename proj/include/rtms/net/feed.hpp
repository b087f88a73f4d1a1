#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>

#include "rtms/igtl/message.hpp"

namespace rtms::net {

enum class EventKind { message, session_closed };

struct Delivery {
  uint64_t session_id = 0;
  EventKind kind = EventKind::message;
  igtl::IgtlMessage message;  // empty for session_closed
};

// Message selector: both conditions must hold when present. The device
// pattern is an exact name or a prefix ending in '*'.
struct Selector {
  std::optional<std::string> type_name;
  std::optional<std::string> device_pattern;

  bool matches(const igtl::MessageHeader& header) const;

  static Selector all() { return {}; }
  static Selector type(std::string t) { return {std::move(t), std::nullopt}; }
  static Selector device(std::string d) { return {std::nullopt, std::move(d)}; }
};

// One subscriber's view of the message stream. Safe to consume from any
// thread; each subscriber receives its own full copy of every matching
// message, in per-session arrival order. Session closures are delivered
// to every feed regardless of selector.
class MessageFeed {
 public:
  std::optional<Delivery> poll(std::chrono::milliseconds timeout);
  std::optional<Delivery> try_poll();
  std::size_t pending() const;

 private:
  friend class Hub;
  void push(Delivery d);

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Delivery> queue_;
};

}  // namespace rtms::net
