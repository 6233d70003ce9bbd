#pragma once

#include <atomic>
#include <stdexcept>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <sys/types.h>

namespace tsg::engine {

class SpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A child process in its own process group with stdout and stderr merged
/// into one pipe. A reader thread hands output chunks and the exit code to
/// the callbacks; both run on the reader thread.
class ChildProcess {
 public:
  using OutputFn = std::function<void(std::string chunk)>;
  using ExitFn = std::function<void(int code)>;

  /// Throws SpawnError when the program cannot be started.
  ChildProcess(const std::vector<std::string>& argv, OutputFn on_output, ExitFn on_exit);
  ~ChildProcess();

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  pid_t pid() const { return pid_; }
  bool finished() const { return finished_; }

  /// SIGTERM to the group, SIGKILL after `grace_ms`, then joins the reader.
  void terminate(int grace_ms = 500);

 private:
  pid_t pid_ = -1;
  int fd_ = -1;
  std::atomic<bool> finished_{false};
  std::thread reader_;
};

/// True when `program` names an executable file, directly or via PATH.
bool program_exists(const std::string& program);

}  // namespace tsg::engine
