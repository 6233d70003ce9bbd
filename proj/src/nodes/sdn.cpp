#include "tsg/nodes/sdn.hpp"

#include <httplib.h>

#include <cstdio>
#include <regex>
#include <stdexcept>

#include "tsg/engine/node_context.hpp"

namespace tsg::nodes {

using engine::NodeContext;
using nlohmann::json;

HttpTarget parse_url(const std::string& url, int default_port) {
  static const std::regex re(R"(^(?:(https?)://)?([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw std::invalid_argument("malformed URL '" + url + "'");
  const std::string scheme = m[1].matched ? m[1].str() : "http";
  const int port = m[3].matched ? std::stoi(m[3].str()) : (scheme == "https" ? 443 : default_port);
  return {scheme + "://" + m[2].str() + ":" + std::to_string(port), m[4].matched ? m[4].str() : "/"};
}

HttpResult http_request(const std::string& url, const std::string& method, const std::string& body,
                        const std::string& content_type, const std::string& basic_auth) {
  HttpResult out;
  HttpTarget t;
  try {
    t = parse_url(url);
  } catch (const std::exception& e) {
    out.error = e.what();
    return out;
  }
  if (t.base.rfind("https", 0) == 0) {
    out.error = "https is not supported";
    return out;
  }
  httplib::Client cli(t.base);
  cli.set_connection_timeout(3, 0);
  cli.set_read_timeout(10, 0);
  if (!basic_auth.empty()) {
    const auto colon = basic_auth.find(':');
    cli.set_basic_auth(basic_auth.substr(0, colon), colon == std::string::npos ? "" : basic_auth.substr(colon + 1));
  }
  httplib::Result res;
  if (method == "GET") res = cli.Get(t.path);
  else if (method == "POST") res = cli.Post(t.path, body, content_type);
  else if (method == "PUT") res = cli.Put(t.path, body, content_type);
  else if (method == "DELETE") res = cli.Delete(t.path, body, content_type);
  else {
    out.error = "unsupported method '" + method + "'";
    return out;
  }
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

const char* dialect_suffix(Dialect d) {
  switch (d) {
    case Dialect::Sdn: return "SDN";
    case Dialect::Floodlight: return "Floodlight";
    case Dialect::Pox: return "POX";
    case Dialect::Odl: return "ODL";
  }
  return "?";
}

int default_port(Dialect d) {
  switch (d) {
    case Dialect::Pox: return 8000;
    case Dialect::Odl: return 8181;
    default: return 8080;
  }
}

std::string controller_base(const std::string& controller, Dialect d) {
  const std::string c = controller.empty() || controller == "nil" ? "localhost" : controller;
  return parse_url(c, default_port(d)).base;
}

namespace {

std::uint64_t dpid_value(const std::string& text) {
  std::string hex;
  for (char c : text)
    if (std::isxdigit(static_cast<unsigned char>(c))) hex += c;
  if (hex.empty()) throw std::invalid_argument("bad DPID '" + text + "'");
  return std::stoull(hex, nullptr, 16);
}

std::string hex_bytes(std::uint64_t v, int bytes, char sep) {
  std::string out;
  for (int i = bytes - 1; i >= 0; --i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned>((v >> (8 * i)) & 0xff));
    out += buf;
    if (i) out += sep;
  }
  return out;
}

std::string str(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string strip_prefix_len(std::string s) {
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "/32") == 0) s.resize(s.size() - 3);
  return s;
}

std::string flow_line(const std::string& dpid, const std::string& src, const std::string& dst,
                      const std::string& actions) {
  return "dpid=" + dpid + ",nw_src=" + (src.empty() ? "*" : src) + ",nw_dst=" + (dst.empty() ? "*" : dst) +
         ",actions=" + (actions.empty() ? "drop" : actions);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

}  // namespace

std::string dpid_to_dialect(const std::string& canonical, Dialect d) {
  const std::uint64_t v = dpid_value(canonical);
  switch (d) {
    case Dialect::Pox: return hex_bytes(v, 6, '-');
    case Dialect::Odl: return "openflow:" + std::to_string(v);
    default: return hex_bytes(v, 8, ':');
  }
}

std::string dpid_from_dialect(const std::string& text, Dialect d) {
  if (d == Dialect::Odl) {
    const auto colon = text.rfind(':');
    return hex_bytes(std::stoull(text.substr(colon == std::string::npos ? 0 : colon + 1)), 8, ':');
  }
  return hex_bytes(dpid_value(text), 8, ':');
}

ControllerCall dpids_call(Dialect d) {
  switch (d) {
    case Dialect::Floodlight: return {"GET", "/wm/core/controller/switches/json", ""};
    case Dialect::Pox: return {"POST", "/OF/", R"({"method":"get_switches","id":1})"};
    case Dialect::Odl: return {"GET", "/restconf/operational/opendaylight-inventory:nodes", ""};
    default: return {"GET", "/dpids", ""};
  }
}

ControllerCall flows_call(Dialect d, const std::string& dpid) {
  switch (d) {
    case Dialect::Floodlight: return {"GET", "/wm/core/switch/" + dpid + "/flow/json", ""};
    case Dialect::Pox:
      return {"POST", "/OF/", json{{"method", "get_flow_stats"}, {"params", {{"dpid", dpid}}}, {"id", 1}}.dump()};
    case Dialect::Odl:
      return {"GET", "/restconf/operational/opendaylight-inventory:nodes/node/" + dpid + "/table/0", ""};
    default: return {"GET", "/flowstats/" + dpid, ""};
  }
}

ControllerCall topology_call(Dialect d) {
  switch (d) {
    case Dialect::Floodlight: return {"GET", "/wm/topology/links/json", ""};
    case Dialect::Odl: return {"GET", "/restconf/operational/network-topology:network-topology", ""};
    case Dialect::Pox: throw std::invalid_argument("POX has no topology call");
    default: return {"GET", "/topology", ""};
  }
}

std::vector<std::string> parse_dpids(Dialect d, const std::string& body) {
  const json j = json::parse(body);
  std::vector<std::string> out;
  switch (d) {
    case Dialect::Floodlight:
      for (const auto& s : j) out.push_back(s.at("switchDPID").get<std::string>());
      break;
    case Dialect::Pox:
      for (const auto& s : j.at("result")) out.push_back(s.at("dpid").get<std::string>());
      break;
    case Dialect::Odl:
      for (const auto& n : j.at("nodes").at("node")) out.push_back(n.at("id").get<std::string>());
      break;
    default:
      for (const auto& s : j) out.push_back(s.at("dpid").get<std::string>());
  }
  return out;
}

std::vector<std::string> parse_flows(Dialect d, const std::string& dpid, const std::string& body) {
  const json j = json::parse(body);
  std::vector<std::string> out;
  switch (d) {
    case Dialect::Floodlight:
      for (const auto& f : j.at("flows")) {
        const json& m = f.value("match", json::object());
        std::string actions;
        if (f.contains("instructions") && f["instructions"].contains("instruction_apply_actions"))
          actions = f["instructions"]["instruction_apply_actions"].value("actions", "");
        std::vector<std::string> acts;
        std::stringstream ss(actions);
        for (std::string a; std::getline(ss, a, ',');) {
          const auto eq = a.find('=');
          acts.push_back(eq == std::string::npos ? a : a.substr(0, eq) + ":" + a.substr(eq + 1));
        }
        out.push_back(flow_line(dpid, m.value("ipv4_src", ""), m.value("ipv4_dst", ""), join(acts, ";")));
      }
      break;
    case Dialect::Pox:
      for (const auto& f : j.at("result").at("flowstats")) {
        const json& m = f.value("match", json::object());
        std::vector<std::string> acts;
        for (const auto& a : f.value("actions", json::array())) {
          if (a.value("type", "") == "OFPAT_OUTPUT") acts.push_back("output:" + str(a.at("port")));
          else acts.push_back(a.value("type", "unknown"));
        }
        out.push_back(flow_line(dpid, m.value("nw_src", ""), m.value("nw_dst", ""), join(acts, ";")));
      }
      break;
    case Dialect::Odl:
      for (const auto& table : j.at("flow-node-inventory:table")) {
        for (const auto& f : table.value("flow", json::array())) {
          const json& m = f.value("match", json::object());
          std::vector<std::string> acts;
          if (f.contains("instructions")) {
            for (const auto& ins : f["instructions"].value("instruction", json::array())) {
              if (!ins.contains("apply-actions")) continue;
              for (const auto& a : ins["apply-actions"].value("action", json::array()))
                if (a.contains("output-action"))
                  acts.push_back("output:" + str(a["output-action"].at("output-node-connector")));
            }
          }
          out.push_back(flow_line(dpid, strip_prefix_len(m.value("ipv4-source", "")),
                                  strip_prefix_len(m.value("ipv4-destination", "")), join(acts, ";")));
        }
      }
      break;
    default:
      for (const auto& f : j.at("flows"))
        out.push_back(flow_line(dpid, f.value("nw_src", ""), f.value("nw_dst", ""), f.value("actions", "")));
  }
  return out;
}

std::vector<std::string> parse_topology(Dialect d, const std::string& body) {
  const json j = json::parse(body);
  std::vector<std::string> out;
  auto line = [](const std::string& s, const std::string& sp, const std::string& t, const std::string& tp) {
    return "src=" + s + ",src_port=" + sp + ",dst=" + t + ",dst_port=" + tp;
  };
  switch (d) {
    case Dialect::Floodlight:
      for (const auto& l : j)
        out.push_back(line(str(l.at("src-switch")), str(l.at("src-port")), str(l.at("dst-switch")), str(l.at("dst-port"))));
      break;
    case Dialect::Odl:
      for (const auto& topo : j.at("network-topology").at("topology")) {
        for (const auto& l : topo.value("link", json::array())) {
          const std::string stp = l.at("source").at("source-tp").get<std::string>();
          const std::string dtp = l.at("destination").at("dest-tp").get<std::string>();
          out.push_back(line(l.at("source").at("source-node").get<std::string>(), stp.substr(stp.rfind(':') + 1),
                             l.at("destination").at("dest-node").get<std::string>(), dtp.substr(dtp.rfind(':') + 1)));
        }
      }
      break;
    case Dialect::Pox:
      throw std::invalid_argument("POX has no topology call");
    default:
      for (const auto& l : j.at("links"))
        out.push_back(line(str(l.at("src")), str(l.at("src_port")), str(l.at("dst")), str(l.at("dst_port"))));
  }
  return out;
}

namespace {

void noop(NodeContext&) {}

bool should_run(NodeContext& ctx) { return ctx.timer_fired() || ctx.news(0); }

void init_trigger(NodeContext& ctx) {
  if (!ctx.linked(0)) ctx.schedule_timer(0);
}

void fail(NodeContext& ctx, const std::string& reason) {
  ctx.write(0, "ERROR: " + reason + "\n");
  ctx.report_error(reason);
}

std::string auth_for(Dialect d) { return d == Dialect::Odl ? "admin:admin" : ""; }

/// Runs a controller call and hands the 200 body to `parse`.
void controller_exec(NodeContext& ctx, Dialect d, const ControllerCall& call,
                     const std::function<std::vector<std::string>(const std::string&)>& parse) {
  std::string base;
  try {
    base = controller_base(ctx.config_text(1), d);
  } catch (const std::exception& e) {
    fail(ctx, e.what());
    return;
  }
  const HttpResult r = http_request(base + call.path, call.method, call.body, "application/json", auth_for(d));
  if (r.status != 200) {
    fail(ctx, r.status == 0 ? r.error : "HTTP " + std::to_string(r.status) + " from " + call.path);
    return;
  }
  std::vector<std::string> lines;
  try {
    lines = parse(r.body);
  } catch (const std::exception& e) {
    fail(ctx, std::string("unexpected controller response: ") + e.what());
    return;
  }
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  ctx.write(0, out);
}

}  // namespace

graph::NodeCallbacks rest_api_callbacks() {
  graph::NodeCallbacks cb;
  cb.init = [](NodeContext& ctx) {
    const std::string method = ctx.config_text(2, "GET");
    if (method != "GET" && method != "POST" && method != "PUT" && method != "DELETE")
      throw std::invalid_argument("unsupported method '" + method + "'");
    parse_url(ctx.config_text(1));
    init_trigger(ctx);
  };
  cb.exec = [](NodeContext& ctx) {
    if (!should_run(ctx)) return;
    const std::string body = ctx.linked(1) ? ctx.latest(1) : "";
    const HttpResult r = http_request(ctx.config_text(1), ctx.config_text(2, "GET"), body,
                                      ctx.config_text(3, "application/json"));
    if (r.status == 0) {
      ctx.write(0, "ERROR: " + r.error + "\n");
      ctx.write(1, "0");
      ctx.report_error(r.error);
      return;
    }
    ctx.write(0, r.body);
    ctx.write(1, std::to_string(r.status));
  };
  cb.term = noop;
  return cb;
}

graph::NodeCallbacks dpids_callbacks(Dialect d) {
  return {init_trigger,
          [d](NodeContext& ctx) {
            if (!should_run(ctx)) return;
            controller_exec(ctx, d, dpids_call(d), [d](const std::string& body) { return parse_dpids(d, body); });
          },
          noop};
}

graph::NodeCallbacks flow_stat_callbacks(Dialect d) {
  return {init_trigger,
          [d](NodeContext& ctx) {
            if (!should_run(ctx)) return;
            const std::string dpid = ctx.config_text(2);
            if (dpid.empty()) {
              fail(ctx, "no DPID configured");
              return;
            }
            controller_exec(ctx, d, flows_call(d, dpid),
                            [d, dpid](const std::string& body) { return parse_flows(d, dpid, body); });
          },
          noop};
}

graph::NodeCallbacks topology_callbacks(Dialect d) {
  return {init_trigger,
          [d](NodeContext& ctx) {
            if (!should_run(ctx)) return;
            controller_exec(ctx, d, topology_call(d), [d](const std::string& body) { return parse_topology(d, body); });
          },
          noop};
}

}  // namespace tsg::nodes
