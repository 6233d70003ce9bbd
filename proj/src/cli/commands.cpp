#include "tsg/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "tsg/api/server.hpp"
#include "tsg/engine/engine.hpp"
#include "tsg/graph/graph.hpp"
#include "tsg/lang/parser.hpp"
#include "tsg/lang/validate.hpp"
#include "tsg/nodes/builtin.hpp"
#include "tsg/nodes/sdn.hpp"
#include "tsg/recommender/recommender.hpp"

namespace tsg::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lang::ParseError(lang::SourceSpan{}, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses, lints and builds `file`. Prints problems to `err` and returns
/// nullopt when the document is unusable.
std::optional<graph::Tsg> load(const std::string& file, const graph::NodeRegistry& registry, std::ostream& err,
                               std::string* text_out = nullptr) {
  lang::TsgDocument doc;
  try {
    const std::string text = read_file(file);
    if (text_out) *text_out = text;
    doc = lang::parse_document(text, file);
  } catch (const lang::ParseError& e) {
    err << file << ":" << e.span().line << ":" << e.span().column << ": error: " << e.message() << "\n";
    return std::nullopt;
  }
  const auto diags = lang::validate_document(doc, registry);
  for (const auto& d : diags) err << lang::format_diagnostic(d, file) << "\n";
  if (lang::has_errors(diags)) return std::nullopt;
  try {
    return graph::build_graph(doc, registry);
  } catch (const graph::BuildError& e) {
    err << file << ": error: " << e.what() << "\n";
    return std::nullopt;
  }
}

void print_buffer(const engine::Buffer& b, std::ostream& out) {
  out << "== " << b.id() << " (" << b.size() << " records)\n";
  for (const auto& r : b.records()) {
    out << r.text;
    if (!r.text.empty() && r.text.back() != '\n') out << "\n";
  }
}

}  // namespace

std::vector<engine::Instant> parse_schedule(const std::string& text) {
  std::vector<engine::Instant> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double seconds = 0;
    try {
      seconds = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size() || seconds < 0)
      throw std::invalid_argument("bad clock schedule entry '" + item + "'");
    const auto ms = static_cast<engine::Instant>(seconds * 1000.0 + 0.5);
    if (!out.empty() && ms < out.back()) throw std::invalid_argument("clock schedule must not decrease");
    out.push_back(ms);
  }
  if (out.empty()) throw std::invalid_argument("empty clock schedule");
  return out;
}

std::pair<std::string, int> parse_listen(const std::string& text) {
  const auto colon = text.rfind(':');
  std::string host = colon == std::string::npos ? "127.0.0.1" : text.substr(0, colon);
  const std::string port = colon == std::string::npos ? text : text.substr(colon + 1);
  if (host.empty()) host = "127.0.0.1";
  std::size_t used = 0;
  int p = -1;
  try {
    p = std::stoi(port, &used);
  } catch (const std::exception&) {
  }
  if (used != port.size() || p < 0 || p > 65535) throw std::invalid_argument("bad listen address '" + text + "'");
  return {host, p};
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  const graph::NodeRegistry registry = nodes::make_builtin_registry();
  std::optional<graph::Tsg> tsg = load(opts.file, registry, err);
  if (!tsg) return kDocumentError;
  for (const auto& d : opts.dumps) {
    if (!tsg->find_node(d)) {
      err << "error: --dump: unknown instance '" << d << "'\n";
      return kRuntimeError;
    }
  }
  std::vector<engine::Instant> schedule;
  if (opts.virtual_clock) {
    try {
      schedule = parse_schedule(*opts.virtual_clock);
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << "\n";
      return kRuntimeError;
    }
  }
  const bool real = opts.duration.has_value() && !opts.virtual_clock;
  std::shared_ptr<engine::Clock> clock;
  if (real) clock = std::make_shared<engine::RealClock>();
  else clock = std::make_shared<engine::VirtualClock>();

  engine::EngineOptions eo;
  eo.stub_dir = opts.stub_dir;
  eo.coalesce = opts.coalesce;
  engine::Engine eng(std::move(*tsg), registry, clock, eo);
  eng.start();
  if (real) {
    const auto end = std::chrono::steady_clock::now() + std::chrono::duration<double>(*opts.duration);
    while (std::chrono::steady_clock::now() < end) {
      eng.pump();
      eng.fire_due_timers();
      auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(end - std::chrono::steady_clock::now());
      if (auto due = eng.next_deadline()) wait = std::min(wait, std::chrono::milliseconds(std::max<engine::Instant>(0, *due - clock->now())));
      eng.mailbox().wait_for(std::clamp(wait, std::chrono::milliseconds(1), std::chrono::milliseconds(100)));
    }
    eng.pump();
  } else {
    eng.run_until_idle();
    for (engine::Instant t : schedule) eng.advance_to(t);
  }
  const engine::EngineReport& report = eng.stop();

  for (const auto& d : opts.dumps)
    for (const engine::Buffer* b : eng.buffers())
      if (b->owner() == d) print_buffer(*b, out);
  for (const auto& n : eng.tsg().nodes()) {
    if (n.class_name != "Decision-summary") continue;
    const engine::Buffer* b = eng.buffer(graph::buffer_id({n.id, 0}));
    const engine::BufferRecord* r = b ? b->latest_data() : nullptr;
    out << "== " << n.id << "\n" << (r ? r->text : std::string("(no report)\n"));
  }
  if (!opts.events_path.empty()) {
    std::ofstream ev(opts.events_path, std::ios::trunc);
    ev << engine::to_json_lines(report.events);
    if (!ev) err << "warning: cannot write " << opts.events_path << "\n";
  }
  for (const auto& [node, message] : eng.node_errors()) err << node << ": error: " << message << "\n";
  return report.errors ? kRuntimeError : kOk;
}

int cmd_check(const std::string& file, std::ostream& out, std::ostream& err) {
  const graph::NodeRegistry registry = nodes::make_builtin_registry();
  lang::TsgDocument doc;
  try {
    doc = lang::parse_document(read_file(file), file);
  } catch (const lang::ParseError& e) {
    out << file << ":" << e.span().line << ":" << e.span().column << ": error: " << e.message() << "\n";
    return kDocumentError;
  }
  const auto diags = lang::validate_document(doc, registry);
  for (const auto& d : diags) out << lang::format_diagnostic(d, file) << "\n";
  if (lang::has_errors(diags)) return kDocumentError;
  try {
    graph::build_graph(doc, registry);
  } catch (const graph::BuildError& e) {
    out << file << ": error: " << e.what() << "\n";
    return kDocumentError;
  }
  (void)err;
  return kOk;
}

int cmd_dot(const std::string& file, std::ostream& out, std::ostream& err) {
  const graph::NodeRegistry registry = nodes::make_builtin_registry();
  std::optional<graph::Tsg> tsg = load(file, registry, err);
  if (!tsg) return kDocumentError;
  out << graph::export_dot(*tsg);
  return kOk;
}

int cmd_recommend(const std::string& file, const std::string& repo, int k, const std::string& cache,
                  std::ostream& out, std::ostream& err) {
  if (k < 1) {
    err << "error: -k must be at least 1\n";
    return kRuntimeError;
  }
  const graph::NodeRegistry registry = nodes::make_builtin_registry();
  std::optional<graph::Tsg> tsg = load(file, registry, err);
  if (!tsg) return kDocumentError;
  const auto index = recommender::index_repository(recommender::find_tsg_files(repo), cache);
  for (const auto& f : index.files)
    if (!f.ok) err << "warning: " << f.path << " skipped: " << f.error << "\n";
  for (const auto& [cls, n] : recommender::recommend_nodes(index, *tsg, k)) out << cls << " " << n << "\n";
  return kOk;
}

int cmd_serve(const ServeOptions& opts, const std::atomic<bool>& stop, std::ostream& err,
              const std::function<void(int)>& on_ready) {
  std::pair<std::string, int> addr;
  try {
    addr = parse_listen(opts.listen);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  const graph::NodeRegistry registry = nodes::make_builtin_registry();
  std::string text;
  std::optional<graph::Tsg> tsg = load(opts.file, registry, err, &text);
  if (!tsg) return kDocumentError;

  engine::EngineOptions eo;
  eo.stub_dir = opts.stub_dir;
  std::shared_ptr<engine::Clock> clock;
  if (opts.virtual_clock) clock = std::make_shared<engine::VirtualClock>();
  else clock = std::make_shared<engine::RealClock>();
  api::EngineLoop loop(std::make_unique<engine::Engine>(std::move(*tsg), registry, clock, eo));

  api::ApiOptions ao;
  ao.document_path = opts.file;
  ao.original_text = text;
  std::unique_ptr<api::ApiServer> server;
  int port = 0;
  try {
    loop.start();
    server = std::make_unique<api::ApiServer>(&loop, ao);
    port = server->start(addr.first, addr.second);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    server.reset();
    loop.stop();
    return kRuntimeError;
  }
  err << "serving " << opts.file << " on http://" << addr.first << ":" << port << "/api/v1\n";
  if (on_ready) on_ready(port);
  while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server->stop();
  loop.stop();
  server.reset();
  return kOk;
}

int cmd_mock_controller(const std::string& fixture, const std::string& listen, const std::atomic<bool>& stop,
                        std::ostream& err, const std::function<void(int)>& on_ready) {
  std::pair<std::string, int> addr;
  nlohmann::json data;
  try {
    addr = parse_listen(listen);
    std::ifstream in(fixture);
    if (!in) throw std::runtime_error("cannot open " + fixture);
    data = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  nodes::MockController mock(std::move(data));
  int port = 0;
  try {
    port = mock.start(addr.first, addr.second);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  err << "mock controller on http://" << addr.first << ":" << port << "\n";
  if (on_ready) on_ready(port);
  while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  mock.stop();
  return kOk;
}

}  // namespace tsg::cli
