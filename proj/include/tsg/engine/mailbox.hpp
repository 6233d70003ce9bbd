#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>

namespace tsg::engine {

/// Command channel into the engine thread. Any thread may post; only the
/// engine thread runs the posted work.
class Mailbox {
 public:
  using Task = std::function<void()>;

  void post(Task task) {
    {
      std::lock_guard lock(mu_);
      tasks_.push_back(std::move(task));
    }
    cv_.notify_all();
  }

  /// Runs everything queued so far. Returns the number of tasks run.
  std::size_t pump() {
    std::deque<Task> batch;
    {
      std::lock_guard lock(mu_);
      batch.swap(tasks_);
    }
    for (auto& t : batch) t();
    return batch.size();
  }

  /// Blocks until a task is queued, `wake()` is called, or the timeout elapses.
  template <typename Rep, typename Period>
  void wait_for(std::chrono::duration<Rep, Period> timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !tasks_.empty() || woken_; });
    woken_ = false;
  }

  void wake() {
    {
      std::lock_guard lock(mu_);
      woken_ = true;
    }
    cv_.notify_all();
  }

  bool empty() const {
    std::lock_guard lock(mu_);
    return tasks_.empty();
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Task> tasks_;
  bool woken_ = false;
};

}  // namespace tsg::engine
