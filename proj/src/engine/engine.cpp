#include "tsg/engine/engine.hpp"

#include <algorithm>
#include <thread>

namespace tsg::engine {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Engine::Engine(graph::Tsg tsg, const graph::NodeRegistry& registry, std::shared_ptr<Clock> clock,
               EngineOptions options)
    : tsg_(std::move(tsg)), registry_(&registry), clock_(std::move(clock)), options_(std::move(options)) {
  if (!clock_) clock_ = std::make_shared<VirtualClock>();
  for (const auto& n : tsg_.nodes()) {
    NodeRuntime rt;
    rt.spec = &registry_->at(n.class_name);
    rt.ctx = std::make_unique<NodeContext>(*this, n.id, *rt.spec);
    runtimes_.emplace(n.id, std::move(rt));
  }
}

Engine::~Engine() { stop(); }

EngineEvent Engine::make_event(EventKind kind, std::string node, std::string detail) const {
  EngineEvent e;
  e.kind = kind;
  e.timestamp = clock_->now();
  e.node = std::move(node);
  e.detail = std::move(detail);
  return e;
}

void Engine::emit(EngineEvent event) {
  event.id = events_.size();
  events_.push_back(std::move(event));
  const EngineEvent& stored = events_.back();
  for (auto& [token, fn] : listeners_) fn(stored);
}

int Engine::subscribe(Listener listener) {
  listeners_.emplace(next_listener_, std::move(listener));
  return next_listener_++;
}

void Engine::unsubscribe(int token) { listeners_.erase(token); }

Buffer* Engine::find_buffer(const std::string& id) {
  auto it = buffer_index_.find(id);
  return it == buffer_index_.end() ? nullptr : buffers_[it->second].get();
}

const Buffer* Engine::buffer(const std::string& id) const {
  auto it = buffer_index_.find(id);
  return it == buffer_index_.end() ? nullptr : buffers_[it->second].get();
}

std::vector<const Buffer*> Engine::buffers() const {
  std::vector<const Buffer*> out;
  for (const auto& b : buffers_) out.push_back(b.get());
  return out;
}

Buffer& Engine::ensure_buffer(const std::string& node, std::optional<int> output) {
  const std::string id = graph::buffer_id(graph::EdgeSource{node, output});
  if (Buffer* b = find_buffer(id)) return *b;
  buffer_index_[id] = buffers_.size();
  buffers_.push_back(std::make_unique<Buffer>(id, node, output));
  return *buffers_.back();
}

NodeContext* Engine::context(const std::string& node) {
  auto it = runtimes_.find(node);
  return it == runtimes_.end() ? nullptr : it->second.ctx.get();
}

std::vector<std::string> Engine::queue() const {
  std::vector<std::string> out;
  for (const auto& e : queue_) out.push_back(e.node);
  return out;
}

std::vector<std::string> Engine::executed_nodes() const {
  std::vector<std::string> out;
  for (const auto& e : events_)
    if (e.kind == EventKind::NodeExecuted) out.push_back(e.node);
  return out;
}

void Engine::report_error(const std::string& node, const std::string& message) {
  ++error_count_;
  node_errors_[node] = message;
  emit(make_event(EventKind::NodeError, node, message));
}

void Engine::start() {
  if (started_) return;
  started_ = true;
  for (const auto& plan : graph::plan_buffers(tsg_, *registry_)) ensure_buffer(plan.node, plan.output);
  for (const auto& e : tsg_.edges())
    if (!e.dst.is_config()) runtimes_.at(e.dst.node).cursors[e.id] = Cursor{e.buffer, 0};

  for (const auto& n : tsg_.nodes()) {
    NodeRuntime& rt = runtimes_.at(n.id);
    init_order_.push_back(n.id);
    try {
      rt.spec->callbacks.init(*rt.ctx);
      rt.initialized = true;
      tsg_.find_node(n.id)->state = graph::NodeState::Initialized;
      emit(make_event(EventKind::Lifecycle, n.id, "init"));
    } catch (const std::exception& ex) {
      rt.init_failed = true;
      report_error(n.id, std::string("init failed: ") + ex.what());
    }
  }
  for (const auto& n : tsg_.nodes())
    if (runtimes_.at(n.id).initialized) tsg_.find_node(n.id)->state = graph::NodeState::Running;
  // Writes made by init callbacks propagate like any other stimulus.
  flush_writes();
  drain();
}

void Engine::record_write(const std::string& buffer_id, Seq seq) {
  for (auto& [id, range] : pending_writes_) {
    if (id == buffer_id) {
      range.second = seq;
      return;
    }
  }
  pending_writes_.push_back({buffer_id, {seq, seq}});
}

void Engine::flush_writes() {
  auto pending = std::move(pending_writes_);
  pending_writes_.clear();
  for (const auto& [id, range] : pending) notify_output_changed(id, range.first, range.second);
}

void Engine::enqueue_targets(const std::string& buffer_id, std::vector<std::string>& enqueued) {
  for (const auto& e : tsg_.edges()) {
    if (e.buffer != buffer_id || e.dst.is_config()) continue;
    if (std::find(enqueued.begin(), enqueued.end(), e.dst.node) != enqueued.end()) continue;
    const NodeRuntime& rt = runtimes_.at(e.dst.node);
    if (!rt.initialized) continue;
    if (options_.coalesce) {
      const bool waiting = std::any_of(queue_.begin(), queue_.end(),
                                       [&](const QueueEntry& q) { return q.node == e.dst.node && !q.timer; });
      if (waiting) continue;
    }
    queue_.push_back({e.dst.node, false});
    enqueued.push_back(e.dst.node);
  }
}

void Engine::notify_output_changed(const std::string& buffer_id, Seq first, Seq last) {
  const Buffer* b = buffer(buffer_id);
  if (!b) throw EngineError("unknown buffer '" + buffer_id + "'");
  EngineEvent ev = make_event(EventKind::OutputChanged, b->owner());
  ev.buffer = buffer_id;
  ev.first = first;
  ev.last = last;
  enqueue_targets(buffer_id, ev.enqueued);
  emit(std::move(ev));
}

Seq Engine::inject(const std::string& buffer_id, std::string text) {
  if (!running()) throw EngineError("engine is not running");
  Buffer* b = find_buffer(buffer_id);
  if (!b) throw EngineError("unknown buffer '" + buffer_id + "'");
  const Seq seq = b->append(clock_->now(), Origin::Injected, RecordKind::Data, std::move(text));
  EngineEvent ev = make_event(EventKind::Injected, b->owner());
  ev.buffer = buffer_id;
  ev.first = ev.last = seq;
  enqueue_targets(buffer_id, ev.enqueued);
  emit(std::move(ev));
  drain();
  return seq;
}

void Engine::prepare_inputs(const std::string& node, NodeRuntime& rt, bool timer) {
  NodeContext& ctx = *rt.ctx;
  ctx.inputs_.clear();
  ctx.linked_configs_.clear();
  ctx.timer_fired_ = timer;
  for (const auto& e : tsg_.edges()) {
    if (e.dst.node != node) continue;
    const Buffer* b = buffer(e.buffer);
    if (e.dst.is_config()) {
      if (const BufferRecord* r = b ? b->latest_data() : nullptr)
        ctx.linked_configs_[e.dst.index] = lang::ConfigValue::from_text(trim(r->text));
      continue;
    }
    InputView& in = ctx.inputs_[e.dst.index];
    auto cur = rt.cursors.find(e.id);
    if (!b || cur == rt.cursors.end()) continue;
    Delta d = read_delta(*b, cur->second);
    in.delta += d.text;
    in.news = in.news || d.records > 0;
    in.ended = in.ended || d.exits > 0;
  }
  for (auto& [index, in] : ctx.inputs_) {
    if (!in.delta.empty()) rt.latest[index] = in.delta;
    in.latest = rt.latest[index];
  }
}

void Engine::execute(const QueueEntry& entry) {
  NodeRuntime& rt = runtimes_.at(entry.node);
  prepare_inputs(entry.node, rt, entry.timer);
  std::string failure;
  try {
    rt.spec->callbacks.exec(*rt.ctx);
  } catch (const std::exception& ex) {
    failure = ex.what();
  }
  emit(make_event(EventKind::NodeExecuted, entry.node, failure.empty() ? "" : "failed"));
  if (!failure.empty()) report_error(entry.node, failure);
  flush_writes();
}

bool Engine::step() {
  if (queue_.empty() || stopped_) return false;
  QueueEntry entry = std::move(queue_.front());
  queue_.pop_front();
  execute(entry);
  return true;
}

std::size_t Engine::drain() {
  std::size_t steps = 0;
  while (!queue_.empty() && !stopped_) {
    if (steps >= options_.propagation_budget) {
      const std::string head = queue_.front().node;
      queue_.clear();
      report_error(head, "propagation budget exceeded");
      break;
    }
    step();
    ++steps;
  }
  return steps;
}

void Engine::run_callback(const std::string& node, const std::function<void(NodeContext&)>& fn) {
  if (stopped_) return;
  NodeRuntime& rt = runtimes_.at(node);
  try {
    fn(*rt.ctx);
  } catch (const std::exception& ex) {
    report_error(node, ex.what());
  }
  flush_writes();
  drain();
}

void Engine::fire_timer(const Timer& timer) {
  EngineEvent ev = make_event(EventKind::TimerTick, timer.node);
  queue_.push_back({timer.node, true});
  ev.enqueued.push_back(timer.node);
  emit(std::move(ev));
  drain();
}

std::optional<Instant> Engine::next_deadline() const {
  if (timers_.empty()) return std::nullopt;
  return timers_.top().due;
}

void Engine::fire_due_timers() {
  while (running() && !timers_.empty() && timers_.top().due <= clock_->now()) {
    Timer t = timers_.top();
    timers_.pop();
    fire_timer(t);
  }
}

void Engine::advance_to(Instant t) {
  auto* vclock = dynamic_cast<VirtualClock*>(clock_.get());
  if (!vclock) throw EngineError("advance_to needs a virtual clock");
  while (running() && !timers_.empty() && timers_.top().due <= t) {
    Timer next = timers_.top();
    timers_.pop();
    vclock->set(std::max(vclock->now(), next.due));
    fire_timer(next);
    run_until_idle();
  }
  if (t > vclock->now()) vclock->set(t);
  run_until_idle();
}

bool Engine::run_until_idle(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    pump();
    fire_due_timers();
    drain();
    if (processes_pending_ == 0 && mailbox_.empty()) return true;
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return false;
    mailbox_.wait_for(std::min<std::chrono::steady_clock::duration>(deadline - now, std::chrono::milliseconds(50)));
  }
}

void Engine::spawn_for(const std::string& node, const std::vector<std::string>& argv, NodeContext::OutputFn on_output,
                       NodeContext::ExitFn on_exit) {
  NodeRuntime& rt = runtimes_.at(node);
  rt.processes.erase(std::remove_if(rt.processes.begin(), rt.processes.end(),
                                    [](const auto& p) {
                                      if (!p->finished()) return false;
                                      p->terminate(0);
                                      return true;
                                    }),
                     rt.processes.end());
  auto out = std::make_shared<NodeContext::OutputFn>(std::move(on_output));
  auto done = std::make_shared<NodeContext::ExitFn>(std::move(on_exit));
  auto proc = std::make_unique<ChildProcess>(
      argv,
      [this, node, out](std::string chunk) {
        mailbox_.post([this, node, out, chunk = std::move(chunk)] {
          run_callback(node, [&](NodeContext& ctx) { (*out)(ctx, chunk); });
        });
      },
      [this, node, done](int code) {
        mailbox_.post([this, node, done, code] {
          --processes_pending_;
          run_callback(node, [&](NodeContext& ctx) { (*done)(ctx, code); });
        });
      });
  ++processes_pending_;
  rt.processes.push_back(std::move(proc));
}

const EngineReport& Engine::stop() {
  if (stopped_ || !started_) {
    stopped_ = true;
    return report_;
  }
  queue_.clear();
  while (!timers_.empty()) timers_.pop();
  for (auto it = init_order_.rbegin(); it != init_order_.rend(); ++it) {
    NodeRuntime& rt = runtimes_.at(*it);
    if (!rt.initialized) continue;
    try {
      rt.spec->callbacks.term(*rt.ctx);
    } catch (const std::exception& ex) {
      report_error(*it, std::string("term failed: ") + ex.what());
    }
    for (auto& p : rt.processes) p->terminate();
    rt.processes.clear();
    tsg_.find_node(*it)->state = graph::NodeState::Terminated;
    emit(make_event(EventKind::Lifecycle, *it, "term"));
  }
  for (auto& [id, rt] : runtimes_) {
    for (auto& p : rt.processes) p->terminate();
    rt.processes.clear();
  }
  stopped_ = true;
  // Callbacks queued by the readers refer to processes that no longer exist.
  mailbox_.pump();
  processes_pending_ = 0;
  report_.events = events_;
  for (const auto& b : buffers_) report_.buffer_lengths[b->id()] = b->size();
  report_.errors = error_count_;
  return report_;
}

const graph::Edge& Engine::add_edge(graph::EdgeSource src, graph::EdgeTarget dst) {
  if (stopped_) throw graph::BuildError("engine stopped");
  const graph::Edge& e = graph::add_edge(tsg_, *registry_, std::move(src), std::move(dst));
  Buffer& b = ensure_buffer(e.src.node, e.src.output);
  if (!e.dst.is_config()) runtimes_.at(e.dst.node).cursors[e.id] = Cursor{b.id(), b.size()};
  return e;
}

void Engine::set_config(const std::string& node, int index, lang::ConfigValue value) {
  graph::set_config_value(tsg_, *registry_, node, index, std::move(value));
}

}  // namespace tsg::engine
