#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "tsg/api/engine_loop.hpp"
#include "tsg/api/event_hub.hpp"

namespace tsg::api {

struct ApiOptions {
  std::string document_path;  // default commit target
  std::string original_text;  // written verbatim by a commit before any edit
  std::size_t event_queue_capacity = 1024;
  std::size_t page_cap = 1000;
};

nlohmann::json class_json(const graph::NodeClassSpec& spec);
nlohmann::json edge_json(const graph::Edge& edge);
nlohmann::json record_json(const engine::BufferRecord& record);
/// Nodes, edges, views, buffers, groups and the docs of every class in use.
nlohmann::json topology_json(const engine::Engine& engine, std::uint64_t revision);

/// Writes `text` to a temporary file next to `path` and renames it into
/// place. Throws std::runtime_error on failure, leaving `path` untouched.
std::size_t write_atomically(const std::string& path, const std::string& text);

/// HTTP surface under /api/v1. Every engine access is funnelled through the
/// loop's command channel.
class ApiServer {
 public:
  explicit ApiServer(EngineLoop* loop, ApiOptions options = {});
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Serves on a background thread. Port 0 picks a free port. Throws
  /// std::runtime_error when the address cannot be bound.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Binds and serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

  EventHub& hub() { return *hub_; }

 private:
  struct Impl;
  std::unique_ptr<EventHub> hub_;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace tsg::api
