#include "rtms/net/feed.hpp"

namespace rtms::net {

bool Selector::matches(const igtl::MessageHeader& header) const {
  if (type_name && *type_name != header.type_name) {
    return false;
  }
  if (device_pattern) {
    const std::string& p = *device_pattern;
    if (!p.empty() && p.back() == '*') {
      if (header.device_name.compare(0, p.size() - 1, p, 0, p.size() - 1) != 0) {
        return false;
      }
    } else if (header.device_name != p) {
      return false;
    }
  }
  return true;
}

void MessageFeed::push(Delivery d) {
  {
    std::lock_guard lk(mutex_);
    queue_.push_back(std::move(d));
  }
  cv_.notify_one();
}

std::optional<Delivery> MessageFeed::poll(std::chrono::milliseconds timeout) {
  std::unique_lock lk(mutex_);
  if (!cv_.wait_for(lk, timeout, [this] { return !queue_.empty(); })) {
    return std::nullopt;
  }
  Delivery d = std::move(queue_.front());
  queue_.pop_front();
  return d;
}

std::optional<Delivery> MessageFeed::try_poll() {
  std::lock_guard lk(mutex_);
  if (queue_.empty()) {
    return std::nullopt;
  }
  Delivery d = std::move(queue_.front());
  queue_.pop_front();
  return d;
}

std::size_t MessageFeed::pending() const {
  std::lock_guard lk(mutex_);
  return queue_.size();
}

}  // namespace rtms::net
