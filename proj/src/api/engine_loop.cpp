#include "tsg/api/engine_loop.hpp"

#include <algorithm>

namespace tsg::api {

EngineLoop::EngineLoop(std::unique_ptr<engine::Engine> engine) : engine_(std::move(engine)) {}

EngineLoop::~EngineLoop() { stop(); }

void EngineLoop::start() {
  if (thread_.joinable()) throw std::logic_error("engine loop already started");
  std::promise<void> ready;
  auto started = ready.get_future();
  thread_ = std::thread([this, &ready] {
    try {
      engine_->start();
    } catch (...) {
      ready.set_exception(std::current_exception());
      return;
    }
    running_ = true;
    ready.set_value();
    run();
  });
  try {
    started.get();
  } catch (...) {
    thread_.join();
    throw;
  }
}

void EngineLoop::run() {
  using namespace std::chrono;
  while (!quit_) {
    engine_->pump();
    engine_->fire_due_timers();
    milliseconds wait(100);
    if (!engine_->clock().is_virtual()) {
      if (auto due = engine_->next_deadline())
        wait = std::clamp(milliseconds(*due - engine_->clock().now()), milliseconds(0), wait);
    }
    if (wait.count() > 0 && engine_->mailbox().empty()) engine_->mailbox().wait_for(wait);
  }
  running_ = false;
  engine_->pump();
  engine_->stop();
}

void EngineLoop::stop() {
  if (!thread_.joinable()) return;
  quit_ = true;
  engine_->mailbox().wake();
  thread_.join();
  {
    std::lock_guard lock(post_mu_);
    closed_ = true;
  }
  // Tasks posted while the loop was exiting would otherwise leave callers waiting.
  engine_->pump();
}

}  // namespace tsg::api
