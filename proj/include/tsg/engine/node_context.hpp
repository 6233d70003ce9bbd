#pragma once

#include <any>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tsg/engine/buffer.hpp"
#include "tsg/graph/registry.hpp"
#include "tsg/lang/ast.hpp"

namespace tsg::engine {

class Engine;

struct InputView {
  std::string delta;   // data that arrived since the previous execution
  bool news = false;   // any record arrived, exit records included
  std::string latest;  // most recent non-empty delta
  bool ended = false;  // an exit record arrived
};

/// Everything a node's callbacks may touch. One context per node instance;
/// it lives as long as the engine.
class NodeContext {
 public:
  NodeContext(Engine& engine, std::string id, const graph::NodeClassSpec& spec);

  const std::string& id() const { return id_; }
  const std::string& class_name() const { return spec_->class_name; }
  const graph::NodeClassSpec& spec() const { return *spec_; }
  Engine& engine() { return *engine_; }
  Instant now() const;

  // Inputs, as read when the current execution was dequeued.
  std::vector<int> connected_inputs() const;
  bool connected(int input) const;
  bool news(int input) const;
  bool any_news() const;
  bool ended(int input) const;
  /// Whether input `input` has a link in the graph, whether or not data
  /// has arrived on it.
  bool linked(int input) const;
  const std::string& delta(int input) const;
  const std::string& latest(int input) const;
  bool timer_fired() const { return timer_fired_; }

  /// Linked value when the config slot has a link that carried data,
  /// otherwise the static value, otherwise nil.
  lang::ConfigValue config(int index) const;
  bool config_set(int index) const { return !config(index).is_nil(); }
  std::string config_text(int index, const std::string& fallback = "") const;
  /// Highest config index with a static value or a link.
  int config_count() const;

  void write(int output, std::string text);
  void write_exit(int output, int code);
  /// Appends to the node's own display stream, shown by Views linked with `-->`.
  void write_display(std::string text);

  void report_error(const std::string& message);
  void schedule_timer(Instant delay_ms);

  template <typename T>
  T& state() {
    if (!state_.has_value()) state_.emplace<T>();
    return std::any_cast<T&>(state_);
  }

  using OutputFn = std::function<void(NodeContext&, std::string chunk)>;
  using ExitFn = std::function<void(NodeContext&, int code)>;
  /// Starts an external program. The callbacks run on the engine thread,
  /// between scheduler steps. Throws SpawnError.
  void spawn(const std::vector<std::string>& argv, OutputFn on_output, ExitFn on_exit);
  void stop_processes();

  const std::string& stub_dir() const;

 private:
  friend class Engine;

  Engine* engine_;
  std::string id_;
  const graph::NodeClassSpec* spec_;
  std::map<int, InputView> inputs_;
  std::map<int, lang::ConfigValue> linked_configs_;
  bool timer_fired_ = false;
  std::any state_;
};

}  // namespace tsg::engine
