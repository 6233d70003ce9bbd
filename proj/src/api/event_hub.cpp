#include "tsg/api/event_hub.hpp"

#include <algorithm>
#include <sstream>

namespace tsg::api {

namespace {

std::set<std::string> split_list(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.insert(item);
  return out;
}

}  // namespace

bool EventFilter::matches(const engine::EngineEvent& e) const {
  if (!nodes.empty() && !nodes.count(e.node)) return false;
  if (!kinds.empty() && !kinds.count(engine::to_string(e.kind))) return false;
  if (!buffers.empty() && !buffers.count(e.buffer)) return false;
  return true;
}

EventFilter EventFilter::parse(const std::string& nodes, const std::string& kinds, const std::string& buffers) {
  return {split_list(nodes), split_list(kinds), split_list(buffers)};
}

std::string format_sse(const StreamMessage& m) {
  return "id: " + std::to_string(m.id) + "\nevent: " + m.event + "\ndata: " + m.data + "\n\n";
}

bool EventHub::Subscription::next(std::vector<StreamMessage>& out, std::chrono::milliseconds timeout) {
  std::unique_lock lock(hub_->mu_);
  hub_->cv_.wait_for(lock, timeout, [&] { return !queue_.empty() || finished_; });
  while (!queue_.empty()) {
    out.push_back(std::move(queue_.front()));
    queue_.pop_front();
  }
  return !(finished_ && out.empty());
}

bool EventHub::Subscription::lagged() const {
  std::lock_guard lock(hub_->mu_);
  return lagged_;
}

bool EventHub::push(Subscription& sub, const engine::EngineEvent& event) {
  if (!sub.filter_.matches(event)) return true;
  if (sub.queue_.size() >= capacity_) {
    sub.lagged_ = true;
    sub.finished_ = true;
    sub.queue_.push_back({"lagged", event.id, R"({"kind":"lagged","dropped_from":)" + std::to_string(event.id) + "}"});
    return false;
  }
  sub.queue_.push_back({engine::to_string(event.kind), event.id, engine::to_json(event).dump()});
  return true;
}

std::shared_ptr<EventHub::Subscription> EventHub::subscribe(EventFilter filter,
                                                           const std::vector<engine::EngineEvent>& backlog) {
  auto sub = std::make_shared<Subscription>();
  sub->hub_ = this;
  sub->filter_ = std::move(filter);
  std::lock_guard lock(mu_);
  bool alive = !closed_;
  for (const auto& e : backlog)
    if (alive && !push(*sub, e)) alive = false;
  if (closed_) sub->finished_ = true;
  if (alive && !closed_) subs_.push_back(sub);
  return sub;
}

void EventHub::unsubscribe(const std::shared_ptr<Subscription>& sub) {
  std::lock_guard lock(mu_);
  subs_.erase(std::remove(subs_.begin(), subs_.end(), sub), subs_.end());
}

void EventHub::publish(const engine::EngineEvent& event) {
  {
    std::lock_guard lock(mu_);
    subs_.erase(std::remove_if(subs_.begin(), subs_.end(), [&](const auto& s) { return !push(*s, event); }),
                subs_.end());
  }
  cv_.notify_all();
}

void EventHub::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
    for (auto& s : subs_) s->finished_ = true;
    subs_.clear();
  }
  cv_.notify_all();
}

std::size_t EventHub::subscriber_count() const {
  std::lock_guard lock(mu_);
  return subs_.size();
}

}  // namespace tsg::api
