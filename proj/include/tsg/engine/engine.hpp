#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "tsg/engine/buffer.hpp"
#include "tsg/engine/clock.hpp"
#include "tsg/engine/event.hpp"
#include "tsg/engine/mailbox.hpp"
#include "tsg/engine/node_context.hpp"
#include "tsg/engine/process.hpp"
#include "tsg/graph/graph.hpp"

namespace tsg::engine {

struct EngineOptions {
  std::size_t propagation_budget = 10000;  // executions per external stimulus
  bool coalesce = false;                   // drop enqueues of nodes already waiting
  std::string stub_dir;                    // tool transcripts instead of real commands
};

struct EngineReport {
  std::vector<EngineEvent> events;
  std::map<std::string, Seq> buffer_lengths;
  std::size_t errors = 0;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs a troubleshooting graph. All methods must be called from one
/// thread; other threads talk to the engine through `mailbox()`.
///
/// Scheduling follows a plain FIFO: a changed output appends every node
/// reading it through an input link to the queue, once per change. Config
/// links do not enqueue; their latest value is read when the destination
/// next executes.
class Engine {
 public:
  Engine(graph::Tsg tsg, const graph::NodeRegistry& registry, std::shared_ptr<Clock> clock,
         EngineOptions options = {});
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Creates buffers and runs every init callback in node order.
  void start();
  bool running() const { return started_ && !stopped_; }
  bool stopped() const { return stopped_; }

  /// Executes the head of the queue. False when the queue is empty.
  bool step();
  /// Steps until the queue is empty or the propagation budget runs out.
  std::size_t drain();

  /// Fires every timer due at the current clock instant, draining after each.
  void fire_due_timers();
  std::optional<Instant> next_deadline() const;
  /// Virtual clock only: moves time forward through every due timer.
  void advance_to(Instant t);
  /// Fires due timers and waits for running processes to finish, pumping
  /// the mailbox, until nothing is pending or `timeout` passes.
  /// Returns false on timeout.
  bool run_until_idle(std::chrono::milliseconds timeout = std::chrono::seconds(30));

  Mailbox& mailbox() { return mailbox_; }
  std::size_t pump() { return mailbox_.pump(); }
  std::size_t processes_pending() const { return processes_pending_; }

  /// Appends an injected record and propagates it like a node write.
  Seq inject(const std::string& buffer_id, std::string text);
  void notify_output_changed(const std::string& buffer_id, Seq first, Seq last);

  /// Runs term callbacks in reverse init order and reaps processes.
  /// Later calls return the same report.
  const EngineReport& stop();

  const graph::Edge& add_edge(graph::EdgeSource src, graph::EdgeTarget dst);
  void set_config(const std::string& node, int index, lang::ConfigValue value);

  const graph::Tsg& tsg() const { return tsg_; }
  const graph::NodeRegistry& registry() const { return *registry_; }
  Clock& clock() { return *clock_; }
  const EngineOptions& options() const { return options_; }

  const Buffer* buffer(const std::string& id) const;
  std::vector<const Buffer*> buffers() const;
  const std::vector<EngineEvent>& events() const { return events_; }
  std::vector<std::string> executed_nodes() const;
  std::size_t error_count() const { return error_count_; }
  const std::map<std::string, std::string>& node_errors() const { return node_errors_; }
  std::vector<std::string> queue() const;
  NodeContext* context(const std::string& node);

  using Listener = std::function<void(const EngineEvent&)>;
  int subscribe(Listener listener);
  void unsubscribe(int token);

 private:
  friend class NodeContext;

  struct QueueEntry {
    std::string node;
    bool timer = false;
  };

  struct Timer {
    Instant due;
    std::uint64_t order;
    std::string node;
    bool operator>(const Timer& o) const { return due != o.due ? due > o.due : order > o.order; }
  };

  struct NodeRuntime {
    const graph::NodeClassSpec* spec = nullptr;
    std::unique_ptr<NodeContext> ctx;
    bool initialized = false;
    bool init_failed = false;
    std::map<std::string, Cursor> cursors;  // input edge id -> cursor
    std::map<int, std::string> latest;
    std::vector<std::unique_ptr<ChildProcess>> processes;
  };

  EngineEvent make_event(EventKind kind, std::string node, std::string detail = {}) const;
  void emit(EngineEvent event);
  Buffer& ensure_buffer(const std::string& node, std::optional<int> output);
  Buffer* find_buffer(const std::string& id);
  void record_write(const std::string& buffer_id, Seq seq);
  void flush_writes();
  void enqueue_targets(const std::string& buffer_id, std::vector<std::string>& enqueued);
  void prepare_inputs(const std::string& node, NodeRuntime& rt, bool timer);
  void execute(const QueueEntry& entry);
  void run_callback(const std::string& node, const std::function<void(NodeContext&)>& fn);
  void fire_timer(const Timer& timer);
  void report_error(const std::string& node, const std::string& message);
  void spawn_for(const std::string& node, const std::vector<std::string>& argv, NodeContext::OutputFn on_output,
                 NodeContext::ExitFn on_exit);

  graph::Tsg tsg_;
  const graph::NodeRegistry* registry_;
  std::shared_ptr<Clock> clock_;
  EngineOptions options_;

  std::map<std::string, NodeRuntime> runtimes_;
  std::vector<std::string> init_order_;
  std::vector<std::unique_ptr<Buffer>> buffers_;
  std::map<std::string, std::size_t> buffer_index_;
  std::deque<QueueEntry> queue_;
  std::priority_queue<Timer, std::vector<Timer>, std::greater<>> timers_;
  std::uint64_t timer_order_ = 0;
  std::vector<std::pair<std::string, std::pair<Seq, Seq>>> pending_writes_;

  std::vector<EngineEvent> events_;
  std::map<int, Listener> listeners_;
  int next_listener_ = 0;
  std::size_t error_count_ = 0;
  std::map<std::string, std::string> node_errors_;

  Mailbox mailbox_;
  std::size_t processes_pending_ = 0;
  bool started_ = false;
  bool stopped_ = false;
  EngineReport report_;
};

}  // namespace tsg::engine
