#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "tsg/engine/event.hpp"

namespace tsg::api {

/// Which events a subscriber wants. Empty sets match everything.
struct EventFilter {
  std::set<std::string> nodes;
  std::set<std::string> kinds;
  std::set<std::string> buffers;

  bool matches(const engine::EngineEvent& e) const;
  /// Comma-separated lists, as in `?node=a,b&kind=node-error`.
  static EventFilter parse(const std::string& nodes, const std::string& kinds, const std::string& buffers);
};

struct StreamMessage {
  std::string event;  // SSE event name: the event kind, or "lagged"
  std::uint64_t id = 0;
  std::string data;   // one JSON object
};

std::string format_sse(const StreamMessage& m);

/// Fans engine events out to per-connection bounded queues. A subscriber
/// whose queue overflows gets a final "lagged" message and is dropped.
class EventHub {
 public:
  explicit EventHub(std::size_t capacity = 1024) : capacity_(capacity) {}

  class Subscription {
   public:
    /// Waits up to `timeout` for messages. Returns false once the
    /// subscription is finished and fully drained.
    bool next(std::vector<StreamMessage>& out, std::chrono::milliseconds timeout);
    bool lagged() const;

   private:
    friend class EventHub;
    EventHub* hub_ = nullptr;
    EventFilter filter_;
    std::deque<StreamMessage> queue_;
    bool finished_ = false;
    bool lagged_ = false;
  };

  /// Must be called on the engine thread so `backlog` and later publishes
  /// form one gap-free sequence.
  std::shared_ptr<Subscription> subscribe(EventFilter filter, const std::vector<engine::EngineEvent>& backlog = {});
  void unsubscribe(const std::shared_ptr<Subscription>& sub);
  void publish(const engine::EngineEvent& event);
  /// Finishes every subscription; later subscribers finish immediately.
  void close();
  std::size_t subscriber_count() const;

 private:
  bool push(Subscription& sub, const engine::EngineEvent& event);

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::shared_ptr<Subscription>> subs_;
  bool closed_ = false;
};

}  // namespace tsg::api
