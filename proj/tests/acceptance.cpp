#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>

#include "doc_gen.hpp"
#include "repo_gen.hpp"
#include "sdn_support.hpp"
#include "support.hpp"
#include "tsg/api/engine_loop.hpp"
#include "tsg/api/server.hpp"
#include "tsg/lang/serializer.hpp"
#include "tsg/nodes/decision.hpp"
#include "tsg/recommender/recommender.hpp"

using namespace tsg;
using tsg::testing::fixture;
using tsg::testing::Harness;
using tsg::testing::read_text;
namespace fs = std::filesystem;

namespace {

/// Collects the first failure of a criterion.
struct Check {
  std::string failure;
  void operator()(bool ok, const std::string& what) {
    if (!ok && failure.empty()) failure = what;
  }
};

struct Criterion {
  std::string name;
  double bound_s;
  std::function<void(Check&)> body;
};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

std::set<std::string> executed_set(const engine::Engine& e) {
  const auto v = e.executed_nodes();
  return {v.begin(), v.end()};
}

bool fifo_consistent(const std::vector<engine::EngineEvent>& events) {
  std::deque<std::string> queue;
  for (const auto& e : events) {
    for (const auto& n : e.enqueued) queue.push_back(n);
    if (e.kind == engine::EventKind::NodeExecuted) {
      if (queue.empty() || queue.front() != e.node) return false;
      queue.pop_front();
    }
  }
  return queue.empty();
}

void round_trip(Check& check) {
  for (const char* name : {"topology.tsg", "everyday.tsg", "everyday_full.tsg"}) {
    const auto doc = lang::parse_document(read_text(fixture(name)));
    check(lang::parse_document(lang::serialize_document(doc)) == doc, std::string(name) + " differs after reparse");
  }
  for (std::uint32_t seed = 1; seed <= 1000; ++seed) {
    const auto doc = tsg::testing::DocumentGenerator(seed).document();
    const std::string text = lang::serialize_document(doc);
    try {
      check(lang::parse_document(text) == doc, "random document " + std::to_string(seed) + " differs");
    } catch (const lang::ParseError& e) {
      check(false, "random document " + std::to_string(seed) + ": " + e.what());
    }
  }
}

void scenario_matrix(Check& check) {
  struct Expected {
    const char* scenario;
    const char* overall;
    const char* deepest_failure;
    std::set<std::string> executed;
  };
  const std::set<std::string> a = {"ping", "ping-decision", "ds"};
  std::set<std::string> b = a;
  b.insert({"ifconfig", "ifc-decision"});
  std::set<std::string> c = b;
  c.insert({"Function-1", "host", "host-decision", "arp", "arp-decision"});
  std::set<std::string> d = c;
  d.insert({"traceroute", "trace-decision", "last-hop", "route", "route-decision", "iptables"});
  const std::vector<Expected> matrix = {{"a", "pass", "", a},
                                        {"b", "fail", "ifconfig", b},
                                        {"c", "fail", "arp", c},
                                        {"d", "fail", "traceroute", d}};
  const std::string text = read_text(fixture("everyday_full.tsg"));
  for (const auto& x : matrix) {
    Harness h;
    engine::EngineOptions opts;
    opts.stub_dir = fixture(std::string("scenarios/") + x.scenario);
    h.start(text, opts);
    const std::string table = h.latest("ds.out0");
    const std::string tag = std::string("scenario ") + x.scenario + ": ";
    check(nodes::summary_overall(table) == x.overall, tag + "OVERALL is " + nodes::summary_overall(table));
    std::string deepest;
    for (const auto& row : nodes::parse_summary(table))
      if (row.result == "fail") deepest = row.label;
    check(deepest == x.deepest_failure, tag + "deepest failing row is '" + deepest + "'");
    const auto got = executed_set(*h.engine);
    std::vector<std::string> v(got.begin(), got.end());
    check(got == x.executed, tag + "executed {" + join(v) + "}");
  }
}

void determinism(Check& check) {
  std::string chain = "src :: Clock(1); src";
  for (int i = 0; i < 10; ++i) chain += " -> n" + std::to_string(i) + " :: Function(identity)";
  chain += ";";
  std::string first;
  for (int run = 0; run < 3; ++run) {
    Harness h;
    auto& e = h.start(chain);
    e.advance_to(5000);
    e.stop();
    check(h.data("n9.out0") == "012345", "chain output is '" + h.data("n9.out0") + "'");
    check(fifo_consistent(e.events()), "chain execution order departs from the queue order");
    const std::string log = engine::to_json_lines(e.events());
    if (run == 0) first = log;
    check(log == first, "event log of run " + std::to_string(run + 1) + " differs");
  }
  for (const char* scenario : {"a", "b", "c", "d"}) {
    Harness h;
    engine::EngineOptions opts;
    opts.stub_dir = fixture(std::string("scenarios/") + scenario);
    auto& e = h.start(read_text(fixture("everyday_full.tsg")), opts);
    check(fifo_consistent(e.events()), std::string("scenario ") + scenario + " departs from the queue order");
  }
  Harness h;
  auto& e = h.start(
      "c :: Clock(1); c -> a :: Function(identity); a -> b :: Function(identity);"
      "a -> x :: Function(identity); b -> d :: Decision(join); x -> [1]d;");
  const auto order = e.executed_nodes();
  check(join(order) == "c,a,b,x,d,d", "diamond executed " + join(order));
  check(fifo_consistent(e.events()), "diamond departs from the queue order");
}

// Writes config k+1 to output k once, at t=0.
graph::NodeClassSpec multi_source() {
  graph::NodeClassSpec s;
  s.class_name = "Multi";
  s.doc = "test source";
  s.configs = {{"text", "text for output 0"}};
  s.variadic_configs = true;
  s.outputs = {{"out", "output"}};
  s.variadic_outputs = true;
  s.callbacks = {[](engine::NodeContext& ctx) { ctx.schedule_timer(0); },
                 [](engine::NodeContext& ctx) {
                   if (!ctx.timer_fired()) return;
                   for (int i = 1; i <= ctx.config_count(); ++i) ctx.write(i - 1, ctx.config_text(i));
                 },
                 [](engine::NodeContext&) {}};
  return s;
}

void decision_oracle(Check& check) {
  for (int n = 1; n <= 4; ++n) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      const std::string tag = "n=" + std::to_string(n) + " mask=" + std::to_string(mask) + ": ";
      std::vector<std::optional<std::string>> results;
      std::string texts, verifiers, links;
      for (int i = 0; i < n; ++i) {
        const bool pass = (mask >> i) & 1;
        const std::string line = (pass ? "PASS " : "FAIL ") + std::to_string(i);
        results.push_back(pass ? std::optional<std::string>(line) : std::nullopt);
        texts += (i ? ", \"" : "\"") + line + "\\nnoise\\n\"";
        verifiers += ", string-match, PASS";
        links += "m[" + std::to_string(i) + "] -> [" + std::to_string(i) + "]d;";
      }
      std::optional<std::string> oracle;
      for (const auto& r : results)
        if (r && !oracle) oracle = r;
      check(nodes::combine("or", results) == oracle, tag + "combine disagrees with the oracle");

      Harness h;
      h.registry.register_class(multi_source());
      h.start("m :: Multi(" + texts + "); d :: Decision(check" + verifiers + ");" + links);
      const auto* status = h.engine->buffer("d.out2");
      check(status->size() == 1, tag + std::to_string(status->size()) + " statuses");
      if (status->size() != 1) continue;
      const auto s = nodes::parse_status(status->at(0).text);
      check(s.pass == oracle.has_value(), tag + "status result");
      check(h.data("d.out0") == oracle.value_or(""), tag + "positive output '" + h.data("d.out0") + "'");
      check(h.data("d.out1") == (oracle ? "" : "check: verification failed\n"), tag + "negative output");
    }
  }
  Harness h;
  h.start("c :: Clock(1); c -> d :: Decision(tick, (lambda (x) (> (length x) 0)));");
  h.engine->advance_to(9000);
  check(h.engine->buffer("d.out2")->size() == 10, "clock-driven decision emitted " +
                                                      std::to_string(h.engine->buffer("d.out2")->size()) +
                                                      " statuses for 10 evaluations");
}

void recommender_oracle(Check& check) {
  const fs::path root = fs::temp_directory_path() / ("tsg-acceptance-" + std::to_string(::getpid()));
  for (std::uint32_t seed = 1; seed <= 100; ++seed) {
    const fs::path dir = root / std::to_string(seed);
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto repo = tsg::testing::make_repo(seed, dir);
    const auto index = recommender::index_repository(recommender::find_tsg_files(dir.string()));
    const std::string tag = "repository " + std::to_string(seed) + ": ";
    check(index.counts == repo.counts, tag + "counts differ from the generator");
    std::mt19937 rng(seed);
    for (int q = 0; q < 5; ++q) {
      std::set<std::string> current;
      for (const auto& c : repo.classes)
        if (rng() % 3 == 0) current.insert(c);
      const int k = 1 + static_cast<int>(rng() % 8);
      std::vector<recommender::Suggestion> want;
      for (const auto& [name, count] : repo.counts)
        if (!current.count(name)) want.emplace_back(name, count);
      std::stable_sort(want.begin(), want.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
      if (want.size() > static_cast<std::size_t>(k)) want.resize(static_cast<std::size_t>(k));
      check(recommender::recommend_nodes(index, current, k) == want, tag + "suggestions differ from the recount");
    }
  }
  fs::remove_all(root);
}

void sdn_pipeline(Check& check) {
  const auto data = tsg::testing::controller_fixture();
  nodes::MockController mock(data);
  const std::string address = "127.0.0.1:" + std::to_string(mock.start());
  const std::size_t expected = tsg::testing::brute_force_flow_count(data, "10.0.0.1", "10.0.0.2");
  check(expected > 0, "fixture has no matching entries");
  for (const char* dialect : {"SDN", "Floodlight", "POX", "ODL"}) {
    const std::size_t rows = nodes::table_rows(tsg::testing::run_pipeline(dialect, address));
    check(rows == expected, std::string(dialect) + ": " + std::to_string(rows) + " rows, expected " +
                                std::to_string(expected));
  }
  mock.stop();
}

void injection_equivalence(Check& check) {
  const std::string text = read_text(fixture("everyday_full.tsg"));
  for (const char* scenario : {"a", "b", "c", "d"}) {
    engine::EngineOptions opts;
    opts.stub_dir = fixture(std::string("scenarios/") + scenario);
    Harness produced;
    produced.start(text, opts);
    const auto* ping_out = produced.engine->buffer("ping.out0");
    std::string transcript;
    for (const auto& r : ping_out->records())
      if (r.kind == engine::RecordKind::Data) transcript += r.text;

    // Same graph, but the probe is replaced by a node that never writes.
    std::string quiet = text;
    const std::string decl = "ping :: Ping(localhost, 125.0.1.254);";
    quiet.replace(quiet.find(decl), decl.size(), "ping :: Function(identity);");
    Harness injected;
    injected.make(quiet, opts).start();
    injected.engine->inject("ping.out0", transcript);
    injected.engine->run_until_idle();

    auto downstream = [](const engine::Engine& e) {
      auto s = executed_set(e);
      s.erase("ping");
      return s;
    };
    const std::string tag = std::string("scenario ") + scenario + ": ";
    {
      std::vector<std::string> p, q;
      for (const auto& n : downstream(*produced.engine)) p.push_back(n);
      for (const auto& n : downstream(*injected.engine)) q.push_back(n);
      check(p == q, tag + "execution sets differ: {" + join(p) + "} vs {" + join(q) + "}");
    }
    check(produced.latest("ds.out0") == injected.latest("ds.out0"), tag + "summaries differ");
    const auto* in_rec = injected.engine->buffer("ping.out0");
    check(ping_out->at(0).origin == engine::Origin::Node, tag + "produced record not marked as node output");
    check(in_rec->size() >= 1 && in_rec->at(0).origin == engine::Origin::Injected,
          tag + "injected record not marked as injected");
  }
}

void commit_fidelity(Check& check) {
  const std::string original = read_text(fixture("everyday.tsg"));
  const fs::path path = fs::temp_directory_path() / ("tsg-commit-" + std::to_string(::getpid()) + ".tsg");
  const graph::NodeRegistry registry = nodes::make_builtin_registry();
  api::EngineLoop loop(std::make_unique<engine::Engine>(tsg::testing::build(original, registry), registry,
                                                        std::make_shared<engine::VirtualClock>()));
  loop.start();
  api::ApiOptions options;
  options.original_text = original;
  options.document_path = path.string();
  api::ApiServer server(&loop, options);
  httplib::Client client("127.0.0.1", server.start());
  auto post = [&](const std::string& where, const nlohmann::json& body) {
    auto res = client.Post(where, body.dump(), "application/json");
    return res ? res->status : 0;
  };
  check(post("/api/v1/edges", {{"src", {{"node", "Function-1"}, {"output", 1}}},
                               {"dst", {{"node", "ds"}, {"index", 3}}}}) == 201,
        "edge edit rejected");
  auto put = client.Put("/api/v1/nodes/ping/config/3", nlohmann::json{{"value", 5}}.dump(), "application/json");
  check(put && put->status == 200, "config edit rejected");
  check(post("/api/v1/commit", nlohmann::json::object()) == 200, "commit failed");

  const auto reloaded = graph::build_graph(lang::parse_file(path.string()), registry);
  const bool same = loop.call([&](engine::Engine& e) { return graph::equivalent(e.tsg(), reloaded); });
  check(same, "reloaded graph differs from the running graph");
  check(!graph::equivalent(reloaded, tsg::testing::build(original, registry)), "edits missing from the committed file");
  server.stop();
  loop.stop();
  fs::remove(path);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"parser round-trip", 5, round_trip},
      {"everyday-example scenario matrix", 10, scenario_matrix},
      {"scheduler determinism", 2, determinism},
      {"decision oracle", 2, decision_oracle},
      {"recommender oracle", 5, recommender_oracle},
      {"sdn pipeline", 5, sdn_pipeline},
      {"injection equivalence", 2, injection_equivalence},
      {"commit fidelity", 2, commit_fidelity},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(check);
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (check.failure.empty() && secs >= c.bound_s)
      check.failure = "over the " + std::to_string(static_cast<int>(c.bound_s)) + " s bound";
    const bool ok = check.failure.empty();
    failed += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << c.name << " (" << std::fixed << std::setprecision(3) << secs << " s, bound "
              << c.bound_s << " s)";
    if (!ok) std::cout << ": " << check.failure;
    std::cout << "\n";
  }
  return failed ? 1 : 0;
}
