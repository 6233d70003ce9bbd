#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "tsg/cli/commands.hpp"

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Troubleshooting graph runner"};
  app.require_subcommand(1);

  tsg::cli::RunOptions run;
  std::string virtual_clock;
  double duration = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a .tsg file and print the decision summary");
  run_cmd->add_option("file", run.file, "Graph description")->required();
  run_cmd->add_option("--stub-dir", run.stub_dir, "Replay tool transcripts from this directory");
  auto* vc_opt = run_cmd->add_option("--virtual-clock", virtual_clock, "Virtual clock schedule t0,t1,... in seconds");
  auto* dur_opt = run_cmd->add_option("--duration", duration, "Seconds to run on the real clock")->check(CLI::PositiveNumber);
  run_cmd->add_option("--dump", run.dumps, "Print the buffers of this node (repeatable)");
  run_cmd->add_option("--events", run.events_path, "Write the event log as JSON lines");
  run_cmd->add_flag("--coalesce", run.coalesce, "Skip enqueuing nodes that are already waiting");

  std::string file;
  auto* check_cmd = app.add_subcommand("check", "Lint a .tsg file");
  check_cmd->add_option("file", file, "Graph description")->required();
  auto* dot_cmd = app.add_subcommand("dot", "Print the graph in Graphviz format");
  dot_cmd->add_option("file", file, "Graph description")->required();

  tsg::cli::ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run a .tsg file behind the HTTP control API");
  serve_cmd->add_option("file", serve.file, "Graph description")->required();
  serve_cmd->add_option("--listen", serve.listen, "host:port")->capture_default_str();
  serve_cmd->add_option("--stub-dir", serve.stub_dir, "Replay tool transcripts from this directory");
  serve_cmd->add_flag("--virtual-clock", serve.virtual_clock, "Advance time only through POST /api/v1/clock");

  std::string repo = ".", cache;
  int k = 5;
  auto* rec_cmd = app.add_subcommand("recommend", "Suggest node classes from a repository of .tsg files");
  rec_cmd->add_option("file", file, "Graph being edited")->required();
  rec_cmd->add_option("--repo", repo, "Repository directory")->capture_default_str();
  rec_cmd->add_option("-k", k, "Number of suggestions")->capture_default_str()->check(CLI::PositiveNumber);
  rec_cmd->add_option("--cache", cache, "Index cache file");

  std::string fixture, listen = "127.0.0.1:8080";
  auto* mock_cmd = app.add_subcommand("mock-controller", "Serve a controller fixture in every REST dialect");
  mock_cmd->add_option("fixture", fixture, "Fixture JSON")->required();
  mock_cmd->add_option("--listen", listen, "host:port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return tsg::cli::kRuntimeError;
  }

  if (*run_cmd) {
    if (*vc_opt) run.virtual_clock = virtual_clock;
    if (*dur_opt) run.duration = duration;
    return tsg::cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*check_cmd) return tsg::cli::cmd_check(file, std::cout, std::cerr);
  if (*dot_cmd) return tsg::cli::cmd_dot(file, std::cout, std::cerr);
  if (*rec_cmd) return tsg::cli::cmd_recommend(file, repo, k, cache, std::cout, std::cerr);

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  if (*serve_cmd) return tsg::cli::cmd_serve(serve, g_stop, std::cerr);
  return tsg::cli::cmd_mock_controller(fixture, listen, g_stop, std::cerr);
}
