#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "tsg/engine/engine.hpp"
#include "tsg/graph/graph.hpp"
#include "tsg/lang/parser.hpp"
#include "tsg/nodes/builtin.hpp"

namespace tsg::testing {

inline std::string fixture(const std::string& rel) { return std::string(TSG_FIXTURE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline graph::Tsg build(const std::string& text, const graph::NodeRegistry& registry) {
  return graph::build_graph(lang::parse_document(text), registry);
}

/// Engine over a virtual clock and the built-in registry (plus anything the
/// test registers before calling `make`).
struct Harness {
  graph::NodeRegistry registry = nodes::make_builtin_registry();
  std::shared_ptr<engine::VirtualClock> clock = std::make_shared<engine::VirtualClock>();
  std::unique_ptr<engine::Engine> engine;

  engine::Engine& make(const std::string& text, engine::EngineOptions options = {}) {
    engine = std::make_unique<engine::Engine>(build(text, registry), registry, clock, options);
    return *engine;
  }

  engine::Engine& start(const std::string& text, engine::EngineOptions options = {}) {
    make(text, std::move(options)).start();
    engine->run_until_idle();
    return *engine;
  }

  /// Concatenated data records of a buffer.
  std::string data(const std::string& buffer) const {
    std::string out;
    if (const auto* b = engine->buffer(buffer))
      for (const auto& r : b->records())
        if (r.kind == engine::RecordKind::Data) out += r.text;
    return out;
  }

  std::string latest(const std::string& buffer) const {
    const auto* b = engine->buffer(buffer);
    const auto* r = b ? b->latest_data() : nullptr;
    return r ? r->text : "";
  }
};

}  // namespace tsg::testing
