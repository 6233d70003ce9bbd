#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsg/engine/buffer.hpp"

namespace tsg::engine {

enum class EventKind { OutputChanged, TimerTick, Injected, NodeExecuted, NodeError, Lifecycle };

const char* to_string(EventKind kind);
bool parse_event_kind(const std::string& text, EventKind& out);

struct EngineEvent {
  std::uint64_t id = 0;  // position in the log
  EventKind kind = EventKind::Lifecycle;
  Instant timestamp = 0;
  std::string node;
  std::string buffer;
  Seq first = 0;  // seq range [first, last] for output-changed / injected
  Seq last = 0;
  std::vector<std::string> enqueued;  // destinations appended to the queue
  std::string detail;
};

nlohmann::json to_json(const EngineEvent& event);

/// One JSON object per line.
std::string to_json_lines(const std::vector<EngineEvent>& events);

}  // namespace tsg::engine
