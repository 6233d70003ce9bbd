#include <doctest.h>

#include "sdn_support.hpp"

using namespace tsg;
using namespace tsg::nodes;
using tsg::testing::Harness;

namespace {

constexpr Dialect kDialects[] = {Dialect::Sdn, Dialect::Floodlight, Dialect::Pox, Dialect::Odl};

struct Controller {
  nlohmann::json fixture = tsg::testing::controller_fixture();
  MockController mock{fixture};
  int port = mock.start();
  std::string address() const { return "127.0.0.1:" + std::to_string(port); }
};

HttpResult call(const Controller& c, Dialect d, const ControllerCall& cc) {
  const std::string auth = d == Dialect::Odl ? "admin:admin" : "";
  return http_request("http://" + c.address() + cc.path, cc.method, cc.body, "application/json", auth);
}

}  // namespace

TEST_CASE("url parsing") {
  auto t = parse_url("http://h:81/a/b");
  CHECK(t.base == "http://h:81");
  CHECK(t.path == "/a/b");
  t = parse_url("h", 8080);
  CHECK(t.base == "http://h:8080");
  CHECK(t.path == "/");
  CHECK(parse_url("https://h/x").base == "https://h:443");
  CHECK_THROWS_AS(parse_url("http://"), std::invalid_argument);
}

TEST_CASE("controller addresses") {
  CHECK(controller_base("", Dialect::Sdn) == "http://localhost:8080");
  CHECK(controller_base("nil", Dialect::Pox) == "http://localhost:8000");
  CHECK(controller_base("c1", Dialect::Odl) == "http://c1:8181");
  CHECK(controller_base("c1:9", Dialect::Floodlight) == "http://c1:9");
  CHECK(std::string(dialect_suffix(Dialect::Floodlight)) == "Floodlight");
}

TEST_CASE("dpid spellings round-trip") {
  const std::string canonical = "00:00:00:00:00:00:01:0a";
  CHECK(dpid_to_dialect(canonical, Dialect::Odl) == "openflow:266");
  CHECK(dpid_to_dialect(canonical, Dialect::Pox) == "00-00-00-00-01-0a");
  CHECK(dpid_to_dialect(canonical, Dialect::Floodlight) == canonical);
  for (Dialect d : kDialects) CHECK(dpid_from_dialect(dpid_to_dialect(canonical, d), d) == canonical);
}

TEST_CASE("every dialect reads switches, flows and links from the mock controller") {
  Controller c;
  std::vector<std::string> switches;
  for (const auto& s : c.fixture["switches"]) switches.push_back(s["dpid"]);
  for (Dialect d : kDialects) {
    CAPTURE(std::string(dialect_suffix(d)));
    const HttpResult dp = call(c, d, dpids_call(d));
    REQUIRE(dp.status == 200);
    std::vector<std::string> native;
    for (const auto& s : switches) native.push_back(dpid_to_dialect(s, d));
    CHECK(parse_dpids(d, dp.body) == native);

    for (const std::string& dpid : switches) {
      const HttpResult fl = call(c, d, flows_call(d, dpid));
      REQUIRE(fl.status == 200);
      const auto lines = parse_flows(d, dpid, fl.body);
      const auto& expected = c.fixture["flows"][dpid];
      REQUIRE(lines.size() == expected.size());
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto e = parse_flow_line(lines[i]);
        REQUIRE(e);
        CHECK(e->get("dpid") == dpid);
        CHECK(e->get("nw_src") == expected[i]["nw_src"].get<std::string>());
        CHECK(e->get("nw_dst") == expected[i]["nw_dst"].get<std::string>());
        CHECK(e->get("actions") == expected[i]["actions"].get<std::string>());
      }
    }

    if (d == Dialect::Pox) {
      CHECK_THROWS(topology_call(d));
      continue;
    }
    const HttpResult tp = call(c, d, topology_call(d));
    REQUIRE(tp.status == 200);
    const auto links = parse_topology(d, tp.body);
    REQUIRE(links.size() == c.fixture["links"].size());
    CHECK(links[0] == "src=" + dpid_to_dialect(switches[0], d) + ",src_port=2,dst=" + dpid_to_dialect(switches[1], d) +
                           ",dst_port=2");
  }
}

TEST_CASE("unknown switches are errors") {
  Controller c;
  for (Dialect d : {Dialect::Sdn, Dialect::Floodlight, Dialect::Odl})
    CHECK(call(c, d, flows_call(d, "00:00:00:00:00:00:00:09")).status == 404);
  Harness h;
  h.start("s :: Flow-stat-SDN(" + c.address() + ", 00:00:00:00:00:00:00:09);");
  CHECK(h.data("s.out0").rfind("ERROR: ", 0) == 0);
  CHECK(h.engine->node_errors().count("s"));
}

TEST_CASE("flow pipeline renders the brute-force entry count for every dialect") {
  Controller c;
  const std::size_t expected = tsg::testing::brute_force_flow_count(c.fixture, "10.0.0.1", "10.0.0.2");
  CHECK(expected == 3);
  for (const char* d : {"SDN", "Floodlight", "POX", "ODL"}) {
    CAPTURE(d);
    const std::string table = tsg::testing::run_pipeline(d, c.address());
    CHECK(table_rows(table) == expected);
  }
}

TEST_CASE("topology feeds the graph view") {
  Controller c;
  Harness h;
  h.start("t :: Topology-Floodlight(" + c.address() + "); t -> g :: Graph() --> view;");
  const std::string dot = h.data("g.self");
  CHECK(dot.find("graph topology") != std::string::npos);
  CHECK(dot.find("00:00:00:00:00:00:00:01") != std::string::npos);
}

TEST_CASE("rest-api node") {
  Controller c;
  Harness h;
  h.start("ok :: Rest-api(\"http://" + c.address() + "/dpids\");"
          "down :: Rest-api(\"http://127.0.0.1:1/dpids\");"
          "bad :: Rest-api();");
  CHECK(h.data("ok.out1") == "200");
  CHECK(nlohmann::json::parse(h.data("ok.out0")).size() == 2);
  CHECK(h.data("down.out1") == "0");
  CHECK(h.data("down.out0").rfind("ERROR: ", 0) == 0);
  CHECK(h.engine->node_errors().at("bad").rfind("init failed", 0) == 0);
}

TEST_CASE("rest-api posts the body input") {
  Controller c;
  Harness h;
  h.start("b :: Clock(1); b[0, 0] -> [0, 1]r :: Rest-api(\"http://" + c.address() + "/OF/\", POST);");
  CHECK(h.latest("r.out1") == "400");
  h.engine->inject("b.out0", R"({"method":"get_switches","params":{},"id":1})");
  h.engine->run_until_idle();
  CHECK(h.latest("r.out1") == "200");
  CHECK(h.latest("r.out0").find("result") != std::string::npos);
}
