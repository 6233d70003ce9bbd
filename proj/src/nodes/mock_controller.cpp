#include <httplib.h>

#include <stdexcept>
#include <thread>

#include "tsg/nodes/sdn.hpp"

namespace tsg::nodes {

using nlohmann::json;

namespace {

std::vector<std::string> split_actions(const std::string& actions) {
  std::vector<std::string> out;
  std::stringstream ss(actions);
  for (std::string a; std::getline(ss, a, ';');)
    if (!a.empty() && a != "drop") out.push_back(a);
  return out;
}

std::string field(const json& flow, const char* key) {
  const std::string v = flow.value(key, "");
  return v == "*" ? "" : v;
}

std::string port_of(const std::string& action) {
  const auto colon = action.find(':');
  return colon == std::string::npos ? "" : action.substr(colon + 1);
}

void reply(httplib::Response& res, const json& body) { res.set_content(body.dump(), "application/json"); }

void not_found(httplib::Response& res, const std::string& what) {
  res.status = 404;
  reply(res, json{{"error", what}});
}

}  // namespace

struct MockController::Impl {
  json fixture;
  httplib::Server server;
  std::thread thread;

  const json* flows_for(const std::string& canonical) const {
    if (!fixture.contains("flows") || !fixture["flows"].is_object()) return nullptr;
    const json& flows = fixture["flows"];
    for (auto it = flows.begin(); it != flows.end(); ++it)
      if (dpid_from_dialect(it.key(), Dialect::Sdn) == canonical) return &it.value();
    return nullptr;
  }

  bool known(const std::string& canonical) const {
    for (const auto& s : fixture.value("switches", json::array()))
      if (dpid_from_dialect(s.at("dpid").get<std::string>(), Dialect::Sdn) == canonical) return true;
    return flows_for(canonical) != nullptr;
  }

  json flows_json(const std::string& canonical, Dialect d) const {
    const json* flows = flows_for(canonical);
    const json list = flows ? *flows : json::array();
    json out = json::array();
    for (const auto& f : list) {
      const std::string src = field(f, "nw_src"), dst = field(f, "nw_dst");
      const auto acts = split_actions(f.value("actions", ""));
      const int priority = f.value("priority", 0);
      if (d == Dialect::Floodlight) {
        json match = json::object();
        if (!src.empty()) match["ipv4_src"] = src;
        if (!dst.empty()) match["ipv4_dst"] = dst;
        std::string joined;
        for (const auto& a : acts) {
          const auto colon = a.find(':');
          joined += (joined.empty() ? "" : ",") + (colon == std::string::npos ? a : a.substr(0, colon) + "=" + a.substr(colon + 1));
        }
        json e = {{"priority", std::to_string(priority)}, {"match", match}};
        if (!joined.empty()) e["instructions"] = {{"instruction_apply_actions", {{"actions", joined}}}};
        out.push_back(e);
      } else if (d == Dialect::Pox) {
        json match = json::object();
        if (!src.empty()) match["nw_src"] = src;
        if (!dst.empty()) match["nw_dst"] = dst;
        json actions = json::array();
        for (const auto& a : acts) {
          if (a.rfind("output:", 0) == 0) actions.push_back({{"type", "OFPAT_OUTPUT"}, {"port", std::stoi(port_of(a))}});
          else actions.push_back({{"type", a}});
        }
        out.push_back({{"priority", priority}, {"match", match}, {"actions", actions}});
      } else if (d == Dialect::Odl) {
        json match = json::object();
        auto host = [](const std::string& ip) { return ip.find('/') == std::string::npos ? ip + "/32" : ip; };
        if (!src.empty()) match["ipv4-source"] = host(src);
        if (!dst.empty()) match["ipv4-destination"] = host(dst);
        json actions = json::array();
        int order = 0;
        for (const auto& a : acts)
          actions.push_back({{"order", order++}, {"output-action", {{"output-node-connector", port_of(a)}}}});
        json e = {{"id", "flow" + std::to_string(out.size())}, {"priority", priority}, {"match", match}};
        if (!actions.empty())
          e["instructions"] = {{"instruction", json::array({{{"order", 0}, {"apply-actions", {{"action", actions}}}}})}};
        out.push_back(e);
      } else {
        out.push_back(f);
      }
    }
    return out;
  }

  json switches_json(Dialect d) const {
    json out = json::array();
    for (const auto& s : fixture.value("switches", json::array())) {
      const std::string dpid = dpid_to_dialect(s.at("dpid").get<std::string>(), d);
      if (d == Dialect::Floodlight) out.push_back({{"switchDPID", dpid}});
      else if (d == Dialect::Odl) out.push_back({{"id", dpid}});
      else out.push_back({{"dpid", dpid}, {"name", s.value("name", "")}});
    }
    return out;
  }

  json links_json(Dialect d) const {
    json out = json::array();
    for (const auto& l : fixture.value("links", json::array())) {
      const std::string src = dpid_to_dialect(l.at("src").get<std::string>(), d);
      const std::string dst = dpid_to_dialect(l.at("dst").get<std::string>(), d);
      const int sp = l.at("src_port").get<int>(), dp = l.at("dst_port").get<int>();
      if (d == Dialect::Floodlight) {
        out.push_back({{"src-switch", src}, {"src-port", sp}, {"dst-switch", dst}, {"dst-port", dp}, {"type", "internal"}});
      } else if (d == Dialect::Odl) {
        out.push_back({{"link-id", src + ":" + std::to_string(sp)},
                       {"source", {{"source-node", src}, {"source-tp", src + ":" + std::to_string(sp)}}},
                       {"destination", {{"dest-node", dst}, {"dest-tp", dst + ":" + std::to_string(dp)}}}});
      } else {
        out.push_back({{"src", src}, {"src_port", sp}, {"dst", dst}, {"dst_port", dp}});
      }
    }
    return out;
  }

  void routes() {
    server.Get("/dpids", [this](const httplib::Request&, httplib::Response& res) { reply(res, switches_json(Dialect::Sdn)); });
    server.Get(R"(/flowstats/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      serve_flows(req.matches[1], Dialect::Sdn, res, [](json flows) { return json{{"flows", flows}}; });
    });
    server.Get("/topology", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, json{{"links", links_json(Dialect::Sdn)}});
    });

    server.Get("/wm/core/controller/switches/json", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, switches_json(Dialect::Floodlight));
    });
    server.Get(R"(/wm/core/switch/([^/]+)/flow/json)", [this](const httplib::Request& req, httplib::Response& res) {
      serve_flows(req.matches[1], Dialect::Floodlight, res, [](json flows) { return json{{"flows", flows}}; });
    });
    server.Get("/wm/topology/links/json", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, links_json(Dialect::Floodlight));
    });

    server.Post("/OF/", [this](const httplib::Request& req, httplib::Response& res) {
      json call;
      try {
        call = json::parse(req.body);
        if (!call.is_object()) throw std::invalid_argument("not an object");
      } catch (const std::exception&) {
        res.status = 400;
        reply(res, json{{"error", "malformed JSON-RPC request"}});
        return;
      }
      const json id = call.value("id", json(nullptr));
      const std::string method = call.value("method", "");
      if (method == "get_switches") {
        reply(res, json{{"result", switches_json(Dialect::Pox)}, {"id", id}});
      } else if (method == "get_flow_stats") {
        const std::string dpid = call.value("/params/dpid"_json_pointer, std::string());
        std::string canonical;
        try {
          canonical = dpid_from_dialect(dpid, Dialect::Pox);
        } catch (const std::exception&) {
        }
        if (canonical.empty() || !known(canonical)) {
          reply(res, json{{"error", {{"code", 0}, {"message", "No switch " + dpid}}}, {"id", id}});
          return;
        }
        reply(res, json{{"result", {{"dpid", dpid}, {"flowstats", flows_json(canonical, Dialect::Pox)}}}, {"id", id}});
      } else {
        reply(res, json{{"error", {{"code", -32601}, {"message", "unknown method " + method}}}, {"id", id}});
      }
    });

    server.Get("/restconf/operational/opendaylight-inventory:nodes", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, json{{"nodes", {{"node", switches_json(Dialect::Odl)}}}});
    });
    server.Get(R"(/restconf/operational/opendaylight-inventory:nodes/node/([^/]+)/table/0)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 serve_flows(req.matches[1], Dialect::Odl, res, [](json flows) {
                   return json{{"flow-node-inventory:table", json::array({{{"id", 0}, {"flow", flows}}})}};
                 });
               });
    server.Get("/restconf/operational/network-topology:network-topology", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, json{{"network-topology",
                       {{"topology", json::array({{{"topology-id", "flow:1"}, {"link", links_json(Dialect::Odl)}}})}}}});
    });
  }

  template <typename Wrap>
  void serve_flows(const std::string& dpid, Dialect d, httplib::Response& res, Wrap wrap) {
    std::string canonical;
    try {
      canonical = dpid_from_dialect(dpid, d);
    } catch (const std::exception&) {
      not_found(res, "malformed DPID " + dpid);
      return;
    }
    if (!known(canonical)) {
      not_found(res, "unknown switch " + dpid);
      return;
    }
    reply(res, wrap(flows_json(canonical, d)));
  }
};

MockController::MockController(json fixture) : impl_(std::make_unique<Impl>()) {
  impl_->fixture = std::move(fixture);
  impl_->routes();
}

MockController::~MockController() { stop(); }

int MockController::start(const std::string& host, int port) {
  if (impl_->thread.joinable()) throw std::runtime_error("mock controller already running");
  port_ = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) {
    port_ = 0;
    throw std::runtime_error("cannot bind mock controller to " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void MockController::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

bool MockController::listen(const std::string& host, int port) {
  port_ = port;
  return impl_->server.listen(host, port);
}

}  // namespace tsg::nodes
