#include "tsg/engine/event.hpp"

namespace tsg::engine {

namespace {

constexpr std::pair<EventKind, const char*> kNames[] = {
    {EventKind::OutputChanged, "output-changed"}, {EventKind::TimerTick, "timer-tick"},
    {EventKind::Injected, "injected"},           {EventKind::NodeExecuted, "node-executed"},
    {EventKind::NodeError, "node-error"},        {EventKind::Lifecycle, "lifecycle"},
};

}  // namespace

const char* to_string(EventKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "?";
}

bool parse_event_kind(const std::string& text, EventKind& out) {
  for (const auto& [k, name] : kNames) {
    if (text == name) {
      out = k;
      return true;
    }
  }
  return false;
}

nlohmann::json to_json(const EngineEvent& e) {
  nlohmann::json j;
  j["id"] = e.id;
  j["kind"] = to_string(e.kind);
  j["timestamp"] = e.timestamp;
  if (!e.node.empty()) j["node"] = e.node;
  if (!e.buffer.empty()) {
    j["buffer"] = e.buffer;
    j["first"] = e.first;
    j["last"] = e.last;
  }
  if (e.kind == EventKind::OutputChanged || e.kind == EventKind::Injected) j["enqueued"] = e.enqueued;
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

std::string to_json_lines(const std::vector<EngineEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

}  // namespace tsg::engine
