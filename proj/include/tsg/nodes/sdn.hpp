#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsg/graph/registry.hpp"

namespace tsg::nodes {

struct HttpResult {
  int status = 0;  // 0 when the request never got a response
  std::string body;
  std::string error;
};

struct HttpTarget {
  std::string base;  // scheme://host:port
  std::string path;  // starts with '/'
};

/// Splits `http://host:port/path`; a missing scheme means http and a
/// missing port means `default_port`. Throws std::invalid_argument.
HttpTarget parse_url(const std::string& url, int default_port = 80);

/// Blocking request with short timeouts. Never throws.
HttpResult http_request(const std::string& url, const std::string& method, const std::string& body = "",
                        const std::string& content_type = "application/json",
                        const std::string& basic_auth = "");

/// Controller REST dialects: the generic mock layout, Floodlight, POX's
/// openflow.webservice and OpenDaylight RESTCONF.
enum class Dialect { Sdn, Floodlight, Pox, Odl };

const char* dialect_suffix(Dialect d);  // "SDN", "Floodlight", "POX", "ODL"
int default_port(Dialect d);

/// Controller config values are `host`, `host:port` or a full URL.
std::string controller_base(const std::string& controller, Dialect d);

/// Conversions between the canonical `00:00:00:00:00:00:00:01` form and
/// the dialect's own DPID spelling.
std::string dpid_to_dialect(const std::string& canonical, Dialect d);
std::string dpid_from_dialect(const std::string& text, Dialect d);

struct ControllerCall {
  std::string method;
  std::string path;
  std::string body;
};

ControllerCall dpids_call(Dialect d);
ControllerCall flows_call(Dialect d, const std::string& dpid);
ControllerCall topology_call(Dialect d);

std::vector<std::string> parse_dpids(Dialect d, const std::string& body);
/// One `dpid=..,nw_src=..,nw_dst=..,actions=..` line per flow. Wildcards
/// are `*`; several actions are joined with `;`.
std::vector<std::string> parse_flows(Dialect d, const std::string& dpid, const std::string& body);
/// One `src=..,src_port=..,dst=..,dst_port=..` line per link.
std::vector<std::string> parse_topology(Dialect d, const std::string& body);

graph::NodeCallbacks rest_api_callbacks();
graph::NodeCallbacks dpids_callbacks(Dialect d);
graph::NodeCallbacks flow_stat_callbacks(Dialect d);
graph::NodeCallbacks topology_callbacks(Dialect d);

/// HTTP server answering every dialect's paths from one fixture:
/// `{"switches": [{"dpid", "name"}], "flows": {dpid: [{"nw_src", "nw_dst",
/// "actions", "priority"}]}, "links": [{"src", "src_port", "dst", "dst_port"}]}`
/// with canonical DPIDs.
class MockController {
 public:
  explicit MockController(nlohmann::json fixture);
  ~MockController();

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port; throws std::runtime_error on failure.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  int port() const { return port_; }
  /// Blocks serving on the calling thread.
  bool listen(const std::string& host, int port);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace tsg::nodes
