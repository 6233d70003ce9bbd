#include "tsg/nodes/functions.hpp"

#include <algorithm>
#include <regex>

namespace tsg::nodes {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    start = end + 1;
  }
  return out;
}

namespace {

std::string arg(const std::vector<std::string>& args, std::size_t i) { return i < args.size() ? args[i] : ""; }

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

std::vector<InterfaceInfo> parse_ifconfig(const std::string& text) {
  // "eth0: flags=4163<UP,BROADCAST,RUNNING,MULTICAST>  mtu 1500"
  static const std::regex modern(R"(^([A-Za-z0-9_.:@-]+?):?\s+flags=\d+<([^>]*)>)");
  // "eth0      Link encap:Ethernet  HWaddr ..." followed by "UP BROADCAST RUNNING ..."
  static const std::regex legacy(R"(^([A-Za-z0-9_.:@-]+)\s+Link encap:)");
  static const std::regex legacy_flags(R"(^\s+(UP\s|UP$))");
  std::vector<InterfaceInfo> out;
  bool in_legacy = false;
  for (const std::string& line : split_lines(text)) {
    std::smatch m;
    if (std::regex_search(line, m, modern)) {
      const std::string flags = "," + m[2].str() + ",";
      out.push_back({m[1].str(), flags.find(",UP,") != std::string::npos});
      in_legacy = false;
    } else if (std::regex_search(line, m, legacy)) {
      out.push_back({m[1].str(), false});
      in_legacy = true;
    } else if (in_legacy && std::regex_search(line, legacy_flags)) {
      out.back().up = true;
    } else if (line.empty()) {
      in_legacy = false;
    }
  }
  return out;
}

namespace {

std::optional<std::string> string_match(const std::vector<std::string>& args) {
  std::regex re(arg(args, 1));
  for (const std::string& line : split_lines(arg(args, 0)))
    if (std::regex_search(line, re)) return line;
  return std::nullopt;
}

std::optional<std::string> check_interfaces(const std::vector<std::string>& args) {
  const std::vector<std::string> excluded(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  for (const InterfaceInfo& i : parse_ifconfig(arg(args, 0))) {
    if (!i.up) continue;
    if (std::find(excluded.begin(), excluded.end(), i.name) != excluded.end()) continue;
    return arg(args, 0);
  }
  return std::nullopt;
}

std::optional<std::string> get_interfaces(const std::vector<std::string>& args) {
  std::string out;
  for (const InterfaceInfo& i : parse_ifconfig(arg(args, 0))) {
    if (i.name == "lo") continue;
    if (!out.empty()) out += '\n';
    out += i.name;
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<std::string> validate_host(const std::vector<std::string>& args) {
  static const std::regex address(R"(has (IPv6 )?address \S+)");
  for (const std::string& line : split_lines(arg(args, 0)))
    if (std::regex_search(line, address)) return line;
  return std::nullopt;
}

std::optional<std::string> last_hop(const std::vector<std::string>& args) {
  static const std::regex status(R"((Success|LastHop)\s+(\S+))");
  std::optional<std::string> found;
  for (const std::string& line : split_lines(arg(args, 0))) {
    std::smatch m;
    if (std::regex_search(line, m, status)) found = m[2].str();
  }
  if (!found || *found == "none") return std::nullopt;
  return found;
}

const std::map<std::string, NamedFunction>& table() {
  static const std::map<std::string, NamedFunction> fns = {
      {"identity", [](const std::vector<std::string>& a) -> std::optional<std::string> { return arg(a, 0); }},
      {"non-empty",
       [](const std::vector<std::string>& a) -> std::optional<std::string> {
         if (blank(arg(a, 0))) return std::nullopt;
         return arg(a, 0);
       }},
      {"string-match", string_match},
      {"ifconfig-check-interfaces", check_interfaces},
      {"ifconfig-get-interfaces", get_interfaces},
      {"validate", validate_host},
      {"traceroute-last-hop", last_hop},
  };
  return fns;
}

}  // namespace

const NamedFunction* find_function(const std::string& name) {
  auto it = table().find(name);
  return it == table().end() ? nullptr : &it->second;
}

std::vector<std::string> function_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : table()) out.push_back(name);
  return out;
}

}  // namespace tsg::nodes
