#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tsg/engine/node_context.hpp"
#include "tsg/graph/registry.hpp"

namespace tsg::nodes {

enum class ParseMode { Raw, LineFiltered };

/// How a wrapper node builds and post-processes its command.
///
/// Template tokens: `{N}` config N (required), `{N?}` config N or nothing,
/// `{N?-x}` the flag `-x` followed by config N when set, `{N*}` config N
/// split on blanks, `{N=v}` config N or `v`. Other tokens are literal.
struct ToolSpec {
  std::vector<std::string> argv;
  int host_config = 1;
  ParseMode mode = ParseMode::Raw;
  // LineFiltered: keep lines for which filter(line, config[filter_config]) holds.
  std::function<bool(const std::string& line, const std::string& target)> filter;
  int filter_config = 2;
  // Runs on the complete output once the command finishes.
  std::function<void(engine::NodeContext& ctx, const std::string& output)> extract;
};

/// Throws std::invalid_argument when a required placeholder is unset.
std::vector<std::string> expand_template(const std::vector<std::string>& tmpl, const engine::NodeContext& ctx);

/// Local for nil/localhost, `sh -c` for "loopback", ssh otherwise.
std::vector<std::string> wrap_transport(const std::string& host, const std::vector<std::string>& argv);

std::string shell_quote(const std::string& arg);

/// "Success <target>" when the last responding hop is the target,
/// "LastHop <address>" for another last responding hop, "LastHop none"
/// when no hop answered. `parsed` is false when no hop line was found in
/// non-empty text.
std::string traceroute_status(const std::string& trace, const std::string& target, bool* parsed = nullptr);

/// A `route -n` line whose destination/genmask covers the target address.
bool route_covers(const std::string& line, const std::string& target);

/// Stub transcript lookup: `<dir>/<Class>.<instance>.txt`, then
/// `<dir>/<Class>.default.txt`. Empty when neither exists.
std::string find_stub(const std::string& dir, const std::string& class_name, const std::string& instance);

/// Life-cycle callbacks shared by every wrapper node. The node runs when
/// input 0 receives a record, or once after init when input 0 is not linked.
graph::NodeCallbacks tool_callbacks(ToolSpec spec);

}  // namespace tsg::nodes
