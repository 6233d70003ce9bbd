#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsg/engine/buffer.hpp"

namespace tsg::cli {

enum ExitCode { kOk = 0, kDocumentError = 1, kRuntimeError = 2 };

struct RunOptions {
  std::string file;
  std::string stub_dir;
  std::optional<std::string> virtual_clock;  // "t0,t1,..." in seconds
  std::optional<double> duration;            // seconds on the real clock
  std::vector<std::string> dumps;            // node ids
  std::string events_path;                   // JSON-lines event log
  bool coalesce = false;
};

/// Parses "0,5,12.5" into milliseconds. Throws std::invalid_argument on
/// malformed or decreasing entries.
std::vector<engine::Instant> parse_schedule(const std::string& text);

/// Splits "host:port" (or ":port", or "port"). Throws std::invalid_argument.
std::pair<std::string, int> parse_listen(const std::string& text);

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& file, std::ostream& out, std::ostream& err);
int cmd_dot(const std::string& file, std::ostream& out, std::ostream& err);
int cmd_recommend(const std::string& file, const std::string& repo, int k, const std::string& cache,
                  std::ostream& out, std::ostream& err);

struct ServeOptions {
  std::string file;
  std::string listen = "127.0.0.1:8080";
  std::string stub_dir;
  bool virtual_clock = false;
};

/// Serves until `stop` becomes true. `on_ready` receives the bound port.
int cmd_serve(const ServeOptions& opts, const std::atomic<bool>& stop, std::ostream& err,
              const std::function<void(int)>& on_ready = {});
int cmd_mock_controller(const std::string& fixture, const std::string& listen, const std::atomic<bool>& stop,
                        std::ostream& err, const std::function<void(int)>& on_ready = {});

}  // namespace tsg::cli
