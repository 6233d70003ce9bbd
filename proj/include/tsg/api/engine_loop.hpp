#pragma once

#include <atomic>
#include <future>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "tsg/engine/engine.hpp"

namespace tsg::api {

class LoopStopped : public std::runtime_error {
 public:
  LoopStopped() : std::runtime_error("engine is not running") {}
};

/// Owns an engine and drives it on a dedicated thread. Every access from
/// other threads goes through `call`, which runs on the engine thread and
/// returns the result (or rethrows).
class EngineLoop {
 public:
  explicit EngineLoop(std::unique_ptr<engine::Engine> engine);
  ~EngineLoop();

  EngineLoop(const EngineLoop&) = delete;
  EngineLoop& operator=(const EngineLoop&) = delete;

  /// Starts the engine on the loop thread and returns once init is done.
  void start();
  /// Stops the engine and joins the thread. Idempotent.
  void stop();
  bool running() const { return running_; }

  template <typename F>
  auto call(F&& f) -> std::invoke_result_t<F, engine::Engine&> {
    using R = std::invoke_result_t<F, engine::Engine&>;
    if (std::this_thread::get_id() == thread_.get_id()) return f(*engine_);
    auto task = std::make_shared<std::packaged_task<R()>>([this, fn = std::forward<F>(f)]() mutable { return fn(*engine_); });
    std::future<R> result = task->get_future();
    {
      std::lock_guard lock(post_mu_);
      if (!running_ || closed_) throw LoopStopped();
      engine_->mailbox().post([task] { (*task)(); });
    }
    return result.get();
  }

  std::uint64_t revision() const { return revision_; }
  /// Called on the engine thread after each applied mutation.
  std::uint64_t bump_revision() { return ++revision_; }

  /// Direct access; only safe before start() or after stop().
  engine::Engine& engine() { return *engine_; }

 private:
  void run();

  std::unique_ptr<engine::Engine> engine_;
  std::thread thread_;
  std::atomic<bool> running_{false};
  std::atomic<bool> quit_{false};
  std::atomic<std::uint64_t> revision_{0};
  std::mutex post_mu_;
  bool closed_ = false;
};

}  // namespace tsg::api
