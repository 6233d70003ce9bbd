#include "tsg/nodes/builtin.hpp"

#include <regex>

#include "tsg/engine/node_context.hpp"
#include "tsg/nodes/decision.hpp"
#include "tsg/nodes/functions.hpp"
#include "tsg/nodes/sdn.hpp"
#include "tsg/nodes/text_nodes.hpp"
#include "tsg/nodes/tools.hpp"

namespace tsg::nodes {

using graph::ConfigDoc;
using graph::NodeClassSpec;
using graph::PortDoc;

namespace {

const PortDoc kEnable{"enable", "Any new record starts a run; without a link the node runs once at start-up"};
const ConfigDoc kHost{"host", "Where to run the command: nil or localhost, loopback, or an ssh host"};

NodeClassSpec tool(std::string name, std::string doc, std::vector<ConfigDoc> configs, ToolSpec spec,
                   std::vector<PortDoc> extra_outputs = {}) {
  NodeClassSpec s;
  s.class_name = std::move(name);
  s.doc = std::move(doc);
  s.inputs = {kEnable};
  s.configs = std::move(configs);
  s.outputs = {{"output", "Command output followed by an {\"exit\":N} record"}};
  for (auto& o : extra_outputs) s.outputs.push_back(std::move(o));
  s.callbacks = tool_callbacks(std::move(spec));
  return s;
}

ToolSpec argv(std::vector<std::string> a) {
  ToolSpec t;
  t.argv = std::move(a);
  return t;
}

void add_tools(graph::NodeRegistry& r) {
  r.register_class(tool("Arp", "Queries the ARP cache with the arp command.",
                        {kHost, {"interface", "Restrict the listing to this interface"}, {"options", "Extra arp flags, blank separated"}},
                        argv({"arp", "{3*}", "{2?-i}"})));

  r.register_class(tool("Command", "Runs an arbitrary shell command line.",
                        {kHost, {"command", "Shell command line", true}}, argv({"sh", "-c", "{2}"})));

  r.register_class(tool("Host", "Performs a DNS lookup with the host command.",
                        {kHost, {"name", "Name or address to look up", true}, {"server", "DNS server to ask"}},
                        argv({"host", "{2}", "{3?}"})));

  r.register_class(tool("Ifconfig", "Lists interface configuration with ifconfig.",
                        {kHost, {"interface", "Show only this interface"}}, argv({"ifconfig", "{2?}"})));

  r.register_class(tool("Iperf", "Measures throughput towards an iperf server.",
                        {kHost, {"server", "iperf server address", true}, {"options", "Extra iperf flags, blank separated"}},
                        argv({"iperf", "-c", "{2}", "{3*}"})));

  ToolSpec iptables = argv({"iptables", "-L", "-n"});
  iptables.mode = ParseMode::LineFiltered;
  iptables.filter = [](const std::string& line, const std::string& target) {
    return target.empty() || line.find(target) != std::string::npos;
  };
  r.register_class(tool("Iptables", "Lists firewall rules that mention the target address.",
                        {kHost, {"target", "Address to look for; unset keeps every rule"}}, std::move(iptables)));

  ToolSpec ping = argv({"ping", "-c", "{3=3}", "{2}"});
  ping.extract = [](engine::NodeContext& ctx, const std::string& output) {
    static const std::regex loss(R"(([\d.]+)% packet loss)");
    std::smatch m;
    if (std::regex_search(output, m, loss)) ctx.write(1, m[1].str() + "\n");
  };
  r.register_class(tool("Ping", "Wraps the ping command.",
                        {kHost, {"address", "Address to ping", true}, {"count", "Number of probes, default 3"}},
                        std::move(ping), {{"loss", "Packet loss percentage once the run finishes"}}));

  ToolSpec route = argv({"route", "-n"});
  route.mode = ParseMode::LineFiltered;
  route.filter = [](const std::string& line, const std::string& target) {
    return target.empty() || route_covers(line, target);
  };
  r.register_class(tool("Route", "Shows the routing table entries that cover the target address.",
                        {kHost, {"target", "Address the routes must cover; unset keeps the header and all routes"}},
                        std::move(route)));

  ToolSpec trace = argv({"traceroute", "-n", "{2}"});
  trace.extract = [](engine::NodeContext& ctx, const std::string& output) {
    bool parsed = true;
    ctx.write(1, traceroute_status(output, ctx.config_text(2), &parsed) + "\n");
    if (!parsed) ctx.report_error("unparseable trace");
  };
  r.register_class(tool("Traceroute", "Wraps the traceroute command and reports the last hop.",
                        {kHost, {"target", "Destination address", true}}, std::move(trace),
                        {{"last-hop", "\"Success <target>\", \"LastHop <address>\" or \"LastHop none\""}}));
}

NodeClassSpec plain(std::string name, std::string doc, std::vector<PortDoc> in, std::vector<ConfigDoc> cfg,
                    std::vector<PortDoc> out, graph::NodeCallbacks cb) {
  NodeClassSpec s;
  s.class_name = std::move(name);
  s.doc = std::move(doc);
  s.inputs = std::move(in);
  s.configs = std::move(cfg);
  s.outputs = std::move(out);
  s.callbacks = std::move(cb);
  return s;
}

void add_logic(graph::NodeRegistry& r) {
  r.register_class(plain("Clock", "Emits a tick counter every period.", {}, {{"period", "Seconds between ticks", true}},
                         {{"tick", "0, 1, 2, ..."}}, clock_callbacks()));

  NodeClassSpec dec = plain(
      "Decision", "Verifies each input and combines the verdicts into a pass or fail branch.",
      {{"input", "Data to verify; verifier k judges input k"}},
      {{"label", "Name shown in statuses and summaries"},
       {"verifier", "Named function, expression, or nil for pass-through"},
       {"extra", "Extra argument for the verifier"}},
      {{"positive", "Combined result when the decision passes"},
       {"negative", "\"label: detail\" when the decision fails"},
       {"status", "One JSON status line per evaluation"}},
      decision_callbacks());
  dec.variadic_inputs = dec.variadic_configs = true;
  r.register_class(std::move(dec));

  NodeClassSpec sum = plain("Decision-summary", "Tabulates the latest status of every connected Decision.",
                            {{"status", "Status output of a Decision"}}, {}, {{"table", "Summary table ending in OVERALL"}},
                            summary_callbacks());
  sum.variadic_inputs = true;
  r.register_class(std::move(sum));

  NodeClassSpec fn = plain(
      "Function", "Applies a named function or expression to its inputs.", {{"input", "Argument text"}},
      {{"function", "Function name or expression", true},
       {"selector", "Which input feeds the function: input, input-N or 'input-N"},
       {"mode", "single (default) or lines: line i of the result goes to output i"}},
      {{"output", "Function result; nothing when the result is false"}}, function_callbacks());
  fn.variadic_inputs = fn.variadic_outputs = true;
  r.register_class(std::move(fn));
}

void add_text(graph::NodeRegistry& r) {
  r.register_class(plain("Filter", "Marks incoming lines that match a regular expression.", {{"input", "Text to scan"}},
                         {{"pattern", "ECMAScript regular expression", true}}, {{"output", "Input with matches marked >>> <<<"}},
                         filter_callbacks()));

  NodeClassSpec fsf = plain("Flow-space-filter", "Keeps flow entries inside a source and destination flow space.",
                            {{"flows", "Flow dump, one key=value entry per line"}},
                            {{"nw_src", "Source address or CIDR; nil matches anything"},
                             {"nw_dst", "Destination address or CIDR; nil matches anything"}},
                            {{"output", "Matching entries, verbatim"}, {"summary", "\"N dropped\""}},
                            flow_space_filter_callbacks());
  fsf.variadic_inputs = true;
  r.register_class(std::move(fsf));

  NodeClassSpec fmt = plain("Format", "Fills a template with the latest value of each input.", {{"input", "Value for {N}"}},
                            {{"template", "Text with {N} placeholders", true}}, {{"output", "Filled template"}},
                            format_callbacks());
  fmt.variadic_inputs = true;
  r.register_class(std::move(fmt));

  r.register_class(plain("Json-filter", "Extracts the values of a key from a JSON document.", {{"input", "JSON document"}},
                         {{"key", "Key or dot path", true}}, {{"output", "One value per line in document order"}},
                         json_filter_callbacks()));

  r.register_class(plain("Tee", "Forwards its input and appends it to a file.", {{"input", "Text"}},
                         {{"path", "File to append to", true}}, {{"output", "Input, unchanged"}}, tee_callbacks()));

  NodeClassSpec table = plain("Table-view", "Renders key=value lines as a text table, one section per input.",
                              {{"input", "key=value lines"}}, {}, {{"table", "Rendered table"}}, table_view_callbacks());
  table.variadic_inputs = true;
  r.register_class(std::move(table));

  NodeClassSpec graph = plain("Graph", "Draws src/dst link lines as a Graphviz graph on its display.",
                              {{"links", "Topology lines"}}, {}, {}, graph_view_callbacks());
  graph.variadic_inputs = true;
  r.register_class(std::move(graph));

  r.register_class(plain("Rest-api", "Performs an HTTP request.", {kEnable, {"body", "Request body"}},
                         {{"url", "Request URL", true},
                          {"method", "GET (default), POST, PUT or DELETE"},
                          {"content-type", "Body content type, default application/json"}},
                         {{"body", "Response body"}, {"status", "HTTP status, 0 on transport failure"}},
                         rest_api_callbacks()));
}

void add_sdn(graph::NodeRegistry& r) {
  const ConfigDoc controller{"controller", "Controller host, host:port or URL"};
  for (Dialect d : {Dialect::Sdn, Dialect::Floodlight, Dialect::Pox, Dialect::Odl}) {
    const std::string suffix = dialect_suffix(d);
    r.register_class(plain("Dpids-" + suffix, "Lists the switches known to a " + suffix + " controller.", {kEnable},
                           {controller}, {{"dpids", "One DPID per line"}}, dpids_callbacks(d)));
    r.register_class(plain("Flow-stat-" + suffix, "Dumps the flow table of one switch from a " + suffix + " controller.",
                           {kEnable}, {controller, {"dpid", "Switch DPID in the controller's spelling", true}},
                           {{"flows", "dpid=..,nw_src=..,nw_dst=..,actions=.. lines"}}, flow_stat_callbacks(d)));
    if (d == Dialect::Pox) continue;
    r.register_class(plain("Topology-" + suffix, "Lists inter-switch links known to a " + suffix + " controller.",
                           {kEnable}, {controller}, {{"links", "src=..,src_port=..,dst=..,dst_port=.. lines"}},
                           topology_callbacks(d)));
  }
}

}  // namespace

void register_builtin_nodes(graph::NodeRegistry& registry) {
  add_tools(registry);
  add_logic(registry);
  add_text(registry);
  add_sdn(registry);
}

graph::NodeRegistry make_builtin_registry() {
  graph::NodeRegistry r;
  register_builtin_nodes(r);
  return r;
}

}  // namespace tsg::nodes
