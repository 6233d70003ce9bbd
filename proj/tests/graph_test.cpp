#include <doctest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "tsg/lang/serializer.hpp"

using namespace tsg;
using namespace tsg::graph;
using tsg::testing::fixture;
using tsg::testing::read_text;

namespace {

const NodeRegistry& registry() {
  static const NodeRegistry r = nodes::make_builtin_registry();
  return r;
}

Tsg load(const std::string& name) { return tsg::testing::build(read_text(fixture(name)), registry()); }

std::vector<std::string> ids(const std::vector<Neighbor>& ns) {
  std::vector<std::string> out;
  for (const auto& n : ns) out.push_back(n.node->id);
  return out;
}

Tsg reparse(const Tsg& g) {
  return build_graph(lang::parse_document(lang::serialize_document(g.document())), registry());
}

}  // namespace

TEST_CASE("small example resolves to four nodes, four edges, three buffers") {
  Tsg g = load("topology.tsg");
  REQUIRE(g.nodes().size() == 4);
  CHECK(g.nodes()[0].id == "Clock-1");
  CHECK(g.nodes()[1].id == "t");
  CHECK(g.nodes()[2].id == "Graph-1");
  CHECK(g.nodes()[3].class_name == "View");
  CHECK(g.edges().size() == 4);
  const auto buffers = plan_buffers(g, registry());
  std::set<std::string> got;
  for (const auto& b : buffers) got.insert(b.id);
  CHECK(got == std::set<std::string>{"Clock-1.out0", "t.out0", "Graph-1.self"});

  const auto view = g.views();
  REQUIRE(view.size() == 1);
  REQUIRE(view[0].slots.size() == 2);
  CHECK(g.find_edge(view[0].slots[0])->src.is_self());
  CHECK(g.find_edge(view[0].slots[1])->src.node == "t");
}

TEST_CASE("dot export styles config and self links") {
  const std::string dot = export_dot(load("everyday.tsg"));
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto p = dot.find(needle); p != std::string::npos; p = dot.find(needle, p + 1)) ++n;
    return n;
  };
  CHECK(count("style=dashed") == 1);
  CHECK(count("style=dotted") == 0);
  CHECK(count("style=solid") == 9);
  CHECK(dot.find("\"Function-1\" -> \"arp\" [style=dashed, taillabel=\"0\", headlabel=\"-2\"]") != std::string::npos);
  CHECK(export_dot(load("topology.tsg")).find("\"Graph-1\" -> \"view\" [style=dotted") != std::string::npos);
}

TEST_CASE("semantic groups") {
  auto groups = semantic_groups(load("everyday.tsg"), registry());
  CHECK(groups["decisions"] == std::vector<std::string>{"ping-decision", "ifc-decision", "arp-decision", "ds"});
  CHECK(groups["views"].empty());
  CHECK(groups["nodes"].size() == 8);
  auto fig = semantic_groups(load("topology.tsg"), registry());
  CHECK(fig["views"] == std::vector<std::string>{"view"});
}

TEST_CASE("neighbors are ordered by port") {
  Tsg g = load("everyday.tsg");
  CHECK(ids(neighbors(g, "ping-decision", Direction::Forward)) == std::vector<std::string>{"ifconfig", "ds"});
  CHECK(ids(neighbors(g, "arp", Direction::Backward)) == std::vector<std::string>{"Function-1", "Function-1"});
  auto back = neighbors(g, "arp", Direction::Backward);
  CHECK_FALSE(back[0].edge->dst.is_config());
  CHECK(back[1].edge->dst.is_config());
  CHECK(ids(neighbors(g, "ds", Direction::Backward)) ==
        std::vector<std::string>{"ping-decision", "ifc-decision", "arp-decision"});
  CHECK_THROWS_AS(neighbors(g, "nope", Direction::Forward), BuildError);
}

TEST_CASE("edges leaving one output share a buffer") {
  Tsg g = load("everyday_full.tsg");
  std::set<std::string> buffers;
  for (const Edge& e : g.edges())
    if (e.src.node == "traceroute" && e.src.output == 1) buffers.insert(e.buffer);
  CHECK(buffers == std::set<std::string>{"traceroute.out1"});
}

TEST_CASE("build errors") {
  auto fails = [](const std::string& text) {
    try {
      tsg::testing::build(text, registry());
    } catch (const BuildError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(fails("x :: Nope();") == "unknown node class 'Nope'");
  CHECK(fails("a :: Clock(1); a :: Clock(2);") == "duplicate instance name 'a'");
  CHECK(fails("ghost -> v;") == "unknown instance 'ghost'");
  CHECK(fails("c :: Clock(1); c --> t :: Tee(x);").find("must target a View") != std::string::npos);
  CHECK(fails("c :: Clock(1); c[3] -> v;").find("output index 3 out of range") == 0);
}

TEST_CASE("undeclared link targets become views") {
  Tsg g = tsg::testing::build("c :: Clock(1); c -> v; c -> [3]v;", registry());
  REQUIRE(g.find_node("v"));
  CHECK(g.find_node("v")->class_name == "View");
}

TEST_CASE("add_edge records the link in the document") {
  Tsg g = load("everyday.tsg");
  const Edge& e = add_edge(g, registry(), {"Function-1", 1}, {"ds", lang::PortKind::Input, 3});
  CHECK(e.buffer == "Function-1.out1");
  const std::string text = lang::serialize_document(g.document());
  CHECK(text.find("Function-1 :: Function(ifconfig-get-interfaces, 'input-0)") != std::string::npos);
  CHECK(text.find("Function-1[1] -> [3]ds;") != std::string::npos);
  CHECK(equivalent(reparse(g), g));

  CHECK_THROWS_AS(add_edge(g, registry(), {"ping", 5}, {"ds", lang::PortKind::Input, 0}), BuildError);
  CHECK_THROWS_AS(add_edge(g, registry(), {"ping", 0}, {"arp", lang::PortKind::Config, 9}), BuildError);
  CHECK_THROWS_AS(add_edge(g, registry(), {"ping", std::nullopt}, {"ds", lang::PortKind::Input, 0}), BuildError);
  CHECK_THROWS_AS(add_edge(g, registry(), {"nobody", 0}, {"ds", lang::PortKind::Input, 0}), BuildError);
}

TEST_CASE("set_config_value updates instance and document") {
  Tsg g = load("everyday.tsg");
  set_config_value(g, registry(), "ping", 2, lang::ConfigValue::from_text("10.9.9.9"));
  CHECK(g.find_node("ping")->static_configs.at(2) == lang::ConfigValue::bare("10.9.9.9"));
  CHECK(lang::serialize_document(g.document()).find("ping :: Ping(localhost, 10.9.9.9);") != std::string::npos);
  set_config_value(g, registry(), "Function-1", 2, lang::ConfigValue::from_text("input-1"));
  CHECK(equivalent(reparse(g), g));
  CHECK_THROWS_AS(set_config_value(g, registry(), "ping", 9, lang::ConfigValue::nil()), BuildError);
  CHECK_THROWS_AS(set_config_value(g, registry(), "nobody", 1, lang::ConfigValue::nil()), BuildError);
}

TEST_CASE("equivalent ignores edge ids but not links or configs") {
  Tsg a = load("everyday_full.tsg");
  Tsg b = load("everyday_full.tsg");
  CHECK(equivalent(a, b));
  add_edge(b, registry(), {"ping", 0}, {"ds", lang::PortKind::Input, 7});
  CHECK_FALSE(equivalent(a, b));
  Tsg c = load("everyday_full.tsg");
  set_config_value(c, registry(), "ping", 3, lang::ConfigValue::from_text("5"));
  CHECK_FALSE(equivalent(a, c));
}

TEST_CASE("random edits always serialize to an equivalent document") {
  std::mt19937 rng(7);
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int round = 0; round < 40; ++round) {
    Tsg g = load("everyday_full.tsg");
    const int edits = pick(1, 6);
    for (int k = 0; k < edits; ++k) {
      const auto& nodes = g.nodes();
      const NodeInstance& src = nodes[static_cast<std::size_t>(pick(0, static_cast<int>(nodes.size()) - 1))];
      const NodeInstance& dst = nodes[static_cast<std::size_t>(pick(0, static_cast<int>(nodes.size()) - 1))];
      const NodeClassSpec& s = registry().at(src.class_name);
      const NodeClassSpec& d = registry().at(dst.class_name);
      if (pick(0, 2) == 0 && !d.configs.empty()) {
        const int idx = pick(1, static_cast<int>(d.configs.size()));
        set_config_value(g, registry(), dst.id, idx, lang::ConfigValue::from_text("v" + std::to_string(k)));
      } else if (!s.outputs.empty() && (d.variadic_inputs || !d.inputs.empty())) {
        const int out = pick(0, static_cast<int>(s.outputs.size()) - 1);
        const int in = d.variadic_inputs ? pick(0, 9) : pick(0, static_cast<int>(d.inputs.size()) - 1);
        add_edge(g, registry(), {src.id, out}, {dst.id, lang::PortKind::Input, in});
      }
    }
    CAPTURE(lang::serialize_document(g.document()));
    CHECK(equivalent(reparse(g), g));
  }
}
