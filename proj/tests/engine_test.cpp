#include <doctest.h>

#include <chrono>
#include <deque>

#include "support.hpp"

using namespace tsg;
using namespace tsg::engine;
using tsg::testing::Harness;

namespace {

graph::NodeClassSpec test_class(std::string name, graph::NodeCallbacks cb) {
  graph::NodeClassSpec s;
  s.class_name = std::move(name);
  s.doc = "test node";
  s.inputs = {{"in", "input"}};
  s.variadic_inputs = true;
  s.configs = {{"text", "text to emit"}};
  s.outputs = {{"out", "output"}};
  s.callbacks = std::move(cb);
  return s;
}

void noop(NodeContext&) {}

// Writes the concatenated deltas of its inputs.
void register_test_classes(graph::NodeRegistry& r) {
  r.register_class(test_class("Relay", {noop,
                                        [](NodeContext& ctx) {
                                          std::string text;
                                          for (int i : ctx.connected_inputs())
                                            if (ctx.news(i)) text += ctx.delta(i);
                                          if (!text.empty()) ctx.write(0, text);
                                        },
                                        noop}));
  // Emits its config text once at t=0.
  r.register_class(test_class("Emit", {[](NodeContext& ctx) { ctx.schedule_timer(0); },
                                       [](NodeContext& ctx) {
                                         if (ctx.timer_fired() && ctx.config_set(1)) ctx.write(0, ctx.config_text(1));
                                       },
                                       noop}));
  r.register_class(test_class("Broken", {[](NodeContext&) { throw std::runtime_error("no device"); },
                                         [](NodeContext& ctx) { ctx.write(0, "should not run"); }, noop}));
  r.register_class(test_class("Throws", {noop, [](NodeContext&) { throw std::runtime_error("boom"); }, noop}));
}

struct TestHarness : Harness {
  TestHarness() { register_test_classes(registry); }
};

// Replays the `enqueued` lists of the event log as a FIFO and checks that
// every node-executed event pops the expected head.
bool fifo_consistent(const std::vector<EngineEvent>& events) {
  std::deque<std::string> queue;
  for (const EngineEvent& e : events) {
    for (const std::string& n : e.enqueued) queue.push_back(n);
    if (e.kind == EventKind::NodeExecuted) {
      if (queue.empty() || queue.front() != e.node) return false;
      queue.pop_front();
    }
  }
  return queue.empty();
}

std::vector<std::string> data_records(const Engine& engine, const std::string& buffer) {
  std::vector<std::string> out;
  for (const auto& r : engine.buffer(buffer)->records())
    if (r.kind == RecordKind::Data) out.push_back(r.text);
  return out;
}

}  // namespace

TEST_CASE("clock ticks under the virtual clock") {
  Harness h;
  auto& e = h.start("c :: Clock(5); c -> v;");
  e.advance_to(12000);
  CHECK(data_records(e, "c.out0") == std::vector<std::string>{"0", "1", "2"});
  CHECK(e.next_deadline() == 15000);
  const auto& recs = e.buffer("c.out0")->records();
  CHECK(recs[1].timestamp == 5000);
  CHECK(recs[1].seq == 1);
}

TEST_CASE("chain propagates in order") {
  TestHarness h;
  auto& e = h.start("s :: Emit(hello); s -> a :: Relay() -> b :: Relay() -> c :: Relay();");
  CHECK(e.executed_nodes() == std::vector<std::string>{"s", "a", "b", "c"});
  CHECK(h.data("c.out0") == "hello");
}

TEST_CASE("diamond executes the join once per changed input") {
  TestHarness h;
  auto& e = h.start(
      "c :: Clock(1); c -> a :: Relay(); a -> b :: Relay(); a -> x :: Relay();"
      "b -> d :: Relay(); x -> [1]d;");
  CHECK(e.executed_nodes() == std::vector<std::string>{"c", "a", "b", "x", "d", "d"});
  CHECK(fifo_consistent(e.events()));
  CHECK(data_records(e, "d.out0") == std::vector<std::string>{"00"});
}

TEST_CASE("propagation budget stops a cycle") {
  TestHarness h;
  EngineOptions opts;
  opts.propagation_budget = 50;
  auto& e = h.make("a :: Relay(); b :: Relay(); a -> b; b -> a;", opts);
  e.start();
  e.inject("a.out0", "x");
  CHECK(e.queue().empty());
  CHECK(e.executed_nodes().size() == 50);
  CHECK(e.error_count() == 1);
  CHECK(e.node_errors().begin()->second == "propagation budget exceeded");
}

TEST_CASE("a node whose init failed is never executed") {
  TestHarness h;
  auto& e = h.start("s :: Emit(hi); s -> bad :: Broken() -> after :: Relay();");
  CHECK(e.node_errors().at("bad") == "init failed: no device");
  CHECK(e.executed_nodes() == std::vector<std::string>{"s"});
  CHECK(e.buffer("bad.out0")->empty());
}

TEST_CASE("an exec exception is reported and the engine continues") {
  TestHarness h;
  auto& e = h.start("s :: Emit(hi); s -> t :: Throws(); s -> r :: Relay();");
  CHECK(e.node_errors().at("t") == "boom");
  CHECK(h.data("r.out0") == "hi");
}

TEST_CASE("config links are read lazily and do not enqueue") {
  TestHarness h;
  auto& e = h.start("s :: Emit(cfg); s -> [-1]t :: Emit(); d :: Emit(go); d -> r :: Relay();");
  const auto executed = e.executed_nodes();
  CHECK(std::count(executed.begin(), executed.end(), "t") == 1);  // its own timer only
  CHECK(e.context("t")->config_text(1) == "cfg");
}

TEST_CASE("injection is equivalent to the producer writing the record") {
  const std::string downstream = " -> f :: Filter(ok) -> r :: Relay(); src -> t :: Tee(/dev/null);";
  TestHarness produced;
  auto& a = produced.start("src :: Emit(\"ok 1\\nbad\\nok 2\\n\");" "src" + downstream);
  TestHarness injected;
  auto& b = injected.start("src :: Emit();" "src" + downstream);
  const Seq seq = b.inject("src.out0", "ok 1\nbad\nok 2\n");
  b.run_until_idle();
  CHECK(seq == 0);
  CHECK(b.buffer("src.out0")->at(0).origin == Origin::Injected);
  for (const char* buf : {"f.out0", "r.out0", "t.out0"}) {
    CAPTURE(buf);
    CHECK(data_records(a, buf) == data_records(b, buf));
  }
  auto tail = [](std::vector<std::string> v) {
    v.erase(std::remove(v.begin(), v.end(), "src"), v.end());
    return v;
  };
  CHECK(tail(a.executed_nodes()) == tail(b.executed_nodes()));
}

TEST_CASE("inject rejects unknown buffers") {
  Harness h;
  auto& e = h.start("c :: Clock(1); c -> v;");
  CHECK_THROWS(e.inject("nope.out0", "x"));
}

TEST_CASE("identical runs produce identical event logs") {
  auto run = [] {
    Harness h;
    EngineOptions opts;
    opts.stub_dir = tsg::testing::fixture("scenarios/d");
    h.make(tsg::testing::read_text(tsg::testing::fixture("everyday_full.tsg")), opts).start();
    h.engine->run_until_idle();
    h.engine->stop();
    return to_json_lines(h.engine->events());
  };
  const std::string first = run();
  CHECK(first.size() > 1000);
  CHECK(run() == first);
}

TEST_CASE("the event log is FIFO-consistent on the full everyday graph") {
  for (const char* scenario : {"a", "b", "c", "d"}) {
    CAPTURE(scenario);
    Harness h;
    EngineOptions opts;
    opts.stub_dir = tsg::testing::fixture(std::string("scenarios/") + scenario);
    auto& e = h.start(tsg::testing::read_text(tsg::testing::fixture("everyday_full.tsg")), opts);
    CHECK(fifo_consistent(e.events()));
  }
}

TEST_CASE("coalescing drops duplicate waiting entries") {
  TestHarness h;
  EngineOptions opts;
  opts.coalesce = true;
  auto& e = h.start(
      "c :: Clock(1); c -> a :: Relay(); a -> b :: Relay(); a -> x :: Relay();"
      "b -> d :: Relay(); x -> [1]d;",
      opts);
  CHECK(e.executed_nodes() == std::vector<std::string>{"c", "a", "b", "x", "d"});
  CHECK(fifo_consistent(e.events()));
}

TEST_CASE("runtime edges see only later records") {
  TestHarness h;
  auto& e = h.start("a :: Relay(); b :: Relay(); v :: View(); a -> v;");
  e.inject("a.out0", "early");
  e.add_edge({"a", 0}, {"b", lang::PortKind::Input, 0});
  e.inject("a.out0", "late");
  CHECK(h.data("b.out0") == "late");
}

TEST_CASE("stop is idempotent and runs term callbacks once") {
  Harness h;
  auto& e = h.start("c :: Clock(1); c -> v;");
  const EngineReport& first = e.stop();
  const EngineReport& second = e.stop();
  CHECK(&first == &second);
  CHECK(e.stopped());
  CHECK_FALSE(e.running());
  CHECK(first.buffer_lengths.at("c.out0") == 1);
}

TEST_CASE("stop reaps running processes") {
  Harness h;
  h.make("x :: Command(nil, \"sleep 30\");").start();
  CHECK_FALSE(h.engine->run_until_idle(std::chrono::milliseconds(200)));
  CHECK(h.engine->processes_pending() == 1);
  const auto t0 = std::chrono::steady_clock::now();
  h.engine->stop();
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(3));
  CHECK(h.engine->processes_pending() == 0);
}

TEST_CASE("real processes stream into buffers") {
  Harness h;
  auto& e = h.make("x :: Command(nil, \"printf 'a\\nb\\n'; exit 3\");");
  e.start();
  REQUIRE(e.run_until_idle(std::chrono::seconds(10)));
  CHECK(h.data("x.out0") == "a\nb\n");
  const auto& recs = e.buffer("x.out0")->records();
  REQUIRE_FALSE(recs.empty());
  CHECK(recs.back().kind == RecordKind::Exit);
  CHECK(recs.back().text == "{\"exit\":3}");
}
