#include "rtms/net/hub.hpp"

#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <iostream>

#include "rtms/igtl/codec.hpp"

namespace rtms::net {

namespace {

struct OutboundFrame {
  std::string type_name;
  std::string device_name;
  std::vector<std::byte> bytes;
};

}  // namespace

struct Hub::Session {
  uint64_t id = 0;
  int fd = -1;
  std::string peer;

  std::mutex mutex;
  std::condition_variable cv;
  std::deque<OutboundFrame> outbound;
  bool draining = false;   // stop accepting, flush and exit
  bool in_flight = false;  // writer is mid-frame
  SessionState state = SessionState::open;

  std::atomic<bool> closed_event_sent{false};
  std::thread reader;
  std::thread writer;

  ~Session() {
    if (fd >= 0) {
      ::close(fd);
    }
  }
};

Hub::Hub(std::size_t outbound_queue_bound) : queue_bound_(outbound_queue_bound) {}

Hub::~Hub() {
  close_all();
  std::vector<std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lk(mutex_);
    for (auto& [id, s] : sessions_) {
      sessions.push_back(s);
    }
    sessions_.clear();
  }
  for (auto& s : sessions) {
    if (s->reader.joinable()) s->reader.join();
    if (s->writer.joinable()) s->writer.join();
  }
}

std::shared_ptr<MessageFeed> Hub::subscribe(Selector selector) {
  auto feed = std::make_shared<MessageFeed>();
  std::lock_guard lk(mutex_);
  subscribers_.emplace_back(std::move(selector), feed);
  return feed;
}

uint64_t Hub::adopt_socket(int fd, std::string peer) {
  int flag = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &flag, sizeof(flag));

  auto session = std::make_shared<Session>();
  session->id = next_session_id_.fetch_add(1);
  session->fd = fd;
  session->peer = std::move(peer);
  {
    std::lock_guard lk(mutex_);
    sessions_.emplace(session->id, session);
  }
  session->reader = std::thread([this, session] { reader_loop(session); });
  session->writer = std::thread([this, session] { writer_loop(session); });
  return session->id;
}

void Hub::reader_loop(std::shared_ptr<Session> s) {
  igtl::FrameReader reader;
  std::array<std::byte, 65536> buffer;
  for (;;) {
    ssize_t n = ::recv(s->fd, buffer.data(), buffer.size(), 0);
    if (n <= 0) {
      break;
    }
    reader.feed(std::span<const std::byte>(buffer.data(), static_cast<std::size_t>(n)));
    try {
      while (auto m = reader.next()) {
        dispatch_message(s->id, std::move(*m));
      }
    } catch (const igtl::CodecError& e) {
      std::cerr << "rtms: session " << s->id << " wire error: " << e.what()
                << "; closing\n";
      break;
    }
  }
  {
    std::lock_guard lk(s->mutex);
    s->draining = true;
    s->state = SessionState::closed;
  }
  ::shutdown(s->fd, SHUT_RDWR);
  s->cv.notify_all();
  dispatch_closed(*s);
}

void Hub::writer_loop(std::shared_ptr<Session> s) {
  for (;;) {
    OutboundFrame frame;
    {
      std::unique_lock lk(s->mutex);
      s->cv.wait(lk, [&] { return !s->outbound.empty() || s->draining; });
      if (s->outbound.empty()) {
        return;  // draining and nothing left
      }
      frame = std::move(s->outbound.front());
      s->outbound.pop_front();
      s->in_flight = true;
    }
    bool failed = false;
    std::size_t sent = 0;
    while (sent < frame.bytes.size()) {
      ssize_t n = ::send(s->fd, frame.bytes.data() + sent, frame.bytes.size() - sent,
                         MSG_NOSIGNAL);
      if (n <= 0) {
        if (n < 0 && errno == EINTR) {
          continue;
        }
        failed = true;
        break;
      }
      sent += static_cast<std::size_t>(n);
    }
    {
      std::lock_guard lk(s->mutex);
      s->in_flight = false;
      if (failed) {
        s->draining = true;
        s->outbound.clear();
      }
      if (s->outbound.empty()) {
        s->cv.notify_all();  // wake close_session drain wait
      }
    }
    if (failed) {
      return;
    }
  }
}

void Hub::send(uint64_t session_id, const igtl::IgtlMessage& message) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lk(mutex_);
    auto it = sessions_.find(session_id);
    if (it != sessions_.end()) {
      s = it->second;
    }
  }
  if (!s) {
    throw TransportError(TransportErrc::closed_session,
                         "unknown session " + std::to_string(session_id));
  }

  OutboundFrame frame;
  const char* implied = igtl::implied_type_name(message.body);
  frame.type_name = implied ? implied : message.header.type_name;
  frame.device_name = message.header.device_name;
  frame.bytes = igtl::encode(message);  // codec errors propagate

  std::lock_guard lk(s->mutex);
  if (s->state != SessionState::open || s->draining) {
    throw TransportError(TransportErrc::closed_session,
                         "session " + std::to_string(session_id) + " is closed");
  }
  if (s->outbound.size() >= queue_bound_ && frame.type_name == igtl::kTypeTransform) {
    // Latest-wins for pose streams: drop the oldest queued pose for the
    // same device. STATUS and POLYDATA are never dropped.
    auto it = std::find_if(s->outbound.begin(), s->outbound.end(), [&](const auto& f) {
      return f.type_name == igtl::kTypeTransform && f.device_name == frame.device_name;
    });
    if (it != s->outbound.end()) {
      s->outbound.erase(it);
    }
  }
  s->outbound.push_back(std::move(frame));
  s->cv.notify_all();
}

std::size_t Hub::broadcast(const igtl::IgtlMessage& message) {
  std::size_t reached = 0;
  for (uint64_t id : open_sessions()) {
    try {
      send(id, message);
      ++reached;
    } catch (const TransportError&) {
      // raced with a close; skip
    }
  }
  return reached;
}

std::vector<uint64_t> Hub::open_sessions() const {
  std::vector<uint64_t> out;
  std::lock_guard lk(mutex_);
  for (const auto& [id, s] : sessions_) {
    std::lock_guard sl(s->mutex);
    if (s->state == SessionState::open && !s->draining) {
      out.push_back(id);
    }
  }
  return out;
}

std::size_t Hub::session_count() const {
  return open_sessions().size();
}

SessionState Hub::session_state(uint64_t session_id) const {
  std::lock_guard lk(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    return SessionState::closed;
  }
  std::lock_guard sl(it->second->mutex);
  return it->second->state;
}

std::string Hub::peer(uint64_t session_id) const {
  std::lock_guard lk(mutex_);
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? std::string() : it->second->peer;
}

void Hub::close_session(uint64_t session_id, std::chrono::milliseconds drain_timeout) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lk(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
      return;
    }
    s = it->second;
  }
  {
    std::unique_lock lk(s->mutex);
    if (s->state == SessionState::open) {
      s->state = SessionState::closing;
    }
    s->draining = true;
    s->cv.notify_all();
    s->cv.wait_for(lk, drain_timeout,
                   [&] { return s->outbound.empty() && !s->in_flight; });
  }
  ::shutdown(s->fd, SHUT_RDWR);  // unblocks reader and any stalled send
}

void Hub::close_all() {
  std::vector<uint64_t> ids;
  {
    std::lock_guard lk(mutex_);
    for (const auto& [id, s] : sessions_) {
      ids.push_back(id);
    }
  }
  for (uint64_t id : ids) {
    close_session(id);
  }
}

void Hub::dispatch_message(uint64_t session_id, igtl::IgtlMessage message) {
  std::lock_guard lk(mutex_);
  bool prune = false;
  for (auto& [selector, weak] : subscribers_) {
    auto feed = weak.lock();
    if (!feed) {
      prune = true;
      continue;
    }
    if (selector.matches(message.header)) {
      feed->push(Delivery{session_id, EventKind::message, message});
    }
  }
  if (prune) {
    std::erase_if(subscribers_, [](const auto& p) { return p.second.expired(); });
  }
}

void Hub::dispatch_closed(Session& s) {
  if (s.closed_event_sent.exchange(true)) {
    return;
  }
  std::lock_guard lk(mutex_);
  for (auto& [selector, weak] : subscribers_) {
    if (auto feed = weak.lock()) {
      feed->push(Delivery{s.id, EventKind::session_closed, {}});
    }
  }
}

}  // namespace rtms::net
