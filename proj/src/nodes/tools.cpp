#include "tsg/nodes/tools.hpp"

#include <arpa/inet.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "tsg/nodes/functions.hpp"

namespace tsg::nodes {

namespace fs = std::filesystem;
using engine::NodeContext;

std::vector<std::string> expand_template(const std::vector<std::string>& tmpl, const NodeContext& ctx) {
  static const std::regex placeholder(R"(^\{(\d+)([?*=]?)(.*)\}$)");
  std::vector<std::string> out;
  for (const std::string& tok : tmpl) {
    std::smatch m;
    if (!std::regex_match(tok, m, placeholder)) {
      out.push_back(tok);
      continue;
    }
    const int index = std::stoi(m[1].str());
    const std::string mode = m[2].str();
    const std::string extra = m[3].str();
    const bool set = ctx.config_set(index);
    const std::string value = ctx.config_text(index);
    if (mode.empty()) {
      if (!set) throw std::invalid_argument(ctx.spec().config_name(index) + " (config " + std::to_string(index) + ") is not set");
      out.push_back(value);
    } else if (mode == "?") {
      if (!set) continue;
      if (!extra.empty()) out.push_back(extra);
      out.push_back(value);
    } else if (mode == "*") {
      if (!set) continue;
      std::istringstream words(value);
      for (std::string w; words >> w;) out.push_back(w);
    } else {
      out.push_back(set ? value : extra);
    }
  }
  return out;
}

std::string shell_quote(const std::string& arg) {
  if (!arg.empty() && arg.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-./:=,@%+") ==
                          std::string::npos)
    return arg;
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::vector<std::string> wrap_transport(const std::string& host, const std::vector<std::string>& argv) {
  if (host.empty() || host == "nil" || host == "localhost") return argv;
  std::string line;
  for (const auto& a : argv) {
    if (!line.empty()) line += ' ';
    line += shell_quote(a);
  }
  if (host == "loopback") return {"sh", "-c", line};
  return {"ssh", "-o", "BatchMode=yes", "-o", "ConnectTimeout=5", host, line};
}

std::string traceroute_status(const std::string& trace, const std::string& target, bool* parsed) {
  static const std::regex hop(R"(^\s*(\d+)\s+(.*)$)");
  static const std::regex address(R"((\d{1,3}(?:\.\d{1,3}){3}|[0-9A-Fa-f]*:[0-9A-Fa-f:]+))");
  bool any_hop = false;
  std::string last;
  for (const std::string& line : split_lines(trace)) {
    std::smatch m;
    if (!std::regex_match(line, m, hop)) continue;
    any_hop = true;
    const std::string rest = m[2].str();
    std::smatch a;
    if (std::regex_search(rest, a, address)) last = a[1].str();
  }
  if (parsed) *parsed = any_hop || trace.find_first_not_of(" \t\r\n") == std::string::npos;
  if (last.empty()) return "LastHop none";
  if (last == target) return "Success " + target;
  return "LastHop " + last;
}

bool route_covers(const std::string& line, const std::string& target) {
  std::istringstream in(line);
  std::string dest, gateway, mask;
  if (!(in >> dest >> gateway >> mask)) return false;
  in_addr d{}, g{}, t{};
  if (dest == "default") dest = "0.0.0.0";
  if (inet_pton(AF_INET, dest.c_str(), &d) != 1 || inet_pton(AF_INET, mask.c_str(), &g) != 1 ||
      inet_pton(AF_INET, target.c_str(), &t) != 1)
    return false;
  return (t.s_addr & g.s_addr) == d.s_addr;
}

std::string find_stub(const std::string& dir, const std::string& class_name, const std::string& instance) {
  for (const std::string& name : {class_name + "." + instance + ".txt", class_name + ".default.txt"}) {
    fs::path p = fs::path(dir) / name;
    if (fs::exists(p)) return p.string();
  }
  return "";
}

namespace {

struct ToolState {
  bool running = false;
  std::string output;
};

void finish(const ToolSpec& spec, NodeContext& ctx, const std::string& output, int code, bool streamed) {
  if (spec.mode == ParseMode::LineFiltered) {
    const std::string target = ctx.config_text(spec.filter_config);
    std::string kept;
    for (const std::string& line : split_lines(output))
      if (spec.filter(line, target)) kept += line + "\n";
    if (!kept.empty()) ctx.write(0, kept);
  } else if (!streamed && !output.empty()) {
    ctx.write(0, output);
  }
  if (spec.extract) spec.extract(ctx, output);
  ctx.write_exit(0, code);
}

void fail(NodeContext& ctx, const std::string& reason) {
  ctx.write(0, "ERROR: " + reason + "\n");
  ctx.report_error(reason);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void run(const ToolSpec& spec, NodeContext& ctx) {
  auto& st = ctx.state<ToolState>();
  if (st.running) return;

  std::vector<std::string> argv;
  try {
    argv = expand_template(spec.argv, ctx);
  } catch (const std::exception& e) {
    fail(ctx, e.what());
    return;
  }

  if (!ctx.stub_dir().empty()) {
    const std::string path = find_stub(ctx.stub_dir(), ctx.class_name(), ctx.id());
    if (path.empty()) {
      fail(ctx, "no stub transcript for " + ctx.class_name() + "." + ctx.id());
      return;
    }
    int code = 0;
    const std::string exit_path = path.substr(0, path.size() - 4) + ".exit";
    if (fs::exists(exit_path)) code = std::stoi("0" + read_file(exit_path));
    finish(spec, ctx, read_file(path), code, false);
    return;
  }

  const std::vector<std::string> command = wrap_transport(ctx.config_text(spec.host_config), argv);
  st.output.clear();
  st.running = true;
  const bool stream = spec.mode == ParseMode::Raw;
  try {
    ctx.spawn(
        command,
        [stream](NodeContext& c, std::string chunk) {
          c.state<ToolState>().output += chunk;
          if (stream) c.write(0, std::move(chunk));
        },
        [spec, stream](NodeContext& c, int code) {
          auto& s = c.state<ToolState>();
          s.running = false;
          finish(spec, c, s.output, code, stream);
        });
  } catch (const std::exception& e) {
    st.running = false;
    fail(ctx, e.what());
  }
}

}  // namespace

graph::NodeCallbacks tool_callbacks(ToolSpec spec) {
  auto shared = std::make_shared<ToolSpec>(std::move(spec));
  graph::NodeCallbacks cb;
  cb.init = [](NodeContext& ctx) {
    ctx.state<ToolState>();
    if (!ctx.linked(0)) ctx.schedule_timer(0);
  };
  cb.exec = [shared](NodeContext& ctx) {
    if (ctx.timer_fired() || ctx.news(0)) run(*shared, ctx);
  };
  cb.term = [](NodeContext& ctx) { ctx.stop_processes(); };
  return cb;
}

}  // namespace tsg::nodes
