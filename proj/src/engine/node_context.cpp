#include "tsg/engine/node_context.hpp"

#include "tsg/engine/engine.hpp"

namespace tsg::engine {

namespace {
const std::string kEmpty;
}

NodeContext::NodeContext(Engine& engine, std::string id, const graph::NodeClassSpec& spec)
    : engine_(&engine), id_(std::move(id)), spec_(&spec) {}

Instant NodeContext::now() const { return engine_->clock().now(); }

std::vector<int> NodeContext::connected_inputs() const {
  std::vector<int> out;
  for (const auto& [index, in] : inputs_) out.push_back(index);
  return out;
}

bool NodeContext::connected(int input) const { return inputs_.count(input) > 0; }

bool NodeContext::news(int input) const {
  auto it = inputs_.find(input);
  return it != inputs_.end() && it->second.news;
}

bool NodeContext::any_news() const {
  for (const auto& [index, in] : inputs_)
    if (in.news) return true;
  return false;
}

bool NodeContext::ended(int input) const {
  auto it = inputs_.find(input);
  return it != inputs_.end() && it->second.ended;
}

bool NodeContext::linked(int input) const {
  for (const auto& e : engine_->tsg().edges())
    if (e.dst.node == id_ && !e.dst.is_config() && e.dst.index == input) return true;
  return false;
}

const std::string& NodeContext::delta(int input) const {
  auto it = inputs_.find(input);
  return it == inputs_.end() ? kEmpty : it->second.delta;
}

const std::string& NodeContext::latest(int input) const {
  auto it = inputs_.find(input);
  return it == inputs_.end() ? kEmpty : it->second.latest;
}

lang::ConfigValue NodeContext::config(int index) const {
  if (auto it = linked_configs_.find(index); it != linked_configs_.end()) return it->second;
  const graph::NodeInstance* node = engine_->tsg().find_node(id_);
  if (node) {
    if (auto it = node->static_configs.find(index); it != node->static_configs.end()) return it->second;
  }
  return lang::ConfigValue::nil();
}

std::string NodeContext::config_text(int index, const std::string& fallback) const {
  lang::ConfigValue v = config(index);
  return v.is_nil() ? fallback : v.text;
}

int NodeContext::config_count() const {
  int n = 0;
  if (const graph::NodeInstance* node = engine_->tsg().find_node(id_); node && !node->static_configs.empty())
    n = node->static_configs.rbegin()->first;
  if (!linked_configs_.empty()) n = std::max(n, linked_configs_.rbegin()->first);
  return n;
}

void NodeContext::write(int output, std::string text) {
  if (!spec_->accepts_output(output))
    throw std::out_of_range(id_ + " has no output " + std::to_string(output));
  Buffer& b = engine_->ensure_buffer(id_, output);
  engine_->record_write(b.id(), b.append(now(), Origin::Node, RecordKind::Data, std::move(text)));
}

void NodeContext::write_exit(int output, int code) {
  Buffer& b = engine_->ensure_buffer(id_, output);
  engine_->record_write(b.id(), b.append(now(), Origin::Node, RecordKind::Exit, "{\"exit\":" + std::to_string(code) + "}"));
}

void NodeContext::write_display(std::string text) {
  Buffer& b = engine_->ensure_buffer(id_, std::nullopt);
  engine_->record_write(b.id(), b.append(now(), Origin::Node, RecordKind::Data, std::move(text)));
}

void NodeContext::report_error(const std::string& message) { engine_->report_error(id_, message); }

void NodeContext::schedule_timer(Instant delay_ms) {
  engine_->timers_.push({now() + std::max<Instant>(delay_ms, 0), engine_->timer_order_++, id_});
}

void NodeContext::spawn(const std::vector<std::string>& argv, OutputFn on_output, ExitFn on_exit) {
  engine_->spawn_for(id_, argv, std::move(on_output), std::move(on_exit));
}

void NodeContext::stop_processes() {
  auto& procs = engine_->runtimes_.at(id_).processes;
  for (auto& p : procs) p->terminate();
}

const std::string& NodeContext::stub_dir() const { return engine_->options().stub_dir; }

}  // namespace tsg::engine
