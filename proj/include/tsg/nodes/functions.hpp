#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tsg::nodes {

/// A named text function. Arguments are the selected input texts followed
/// by any extra configuration arguments. `nullopt` is the false signal.
using NamedFunction = std::function<std::optional<std::string>(const std::vector<std::string>& args)>;

/// Built-in functions usable from Function and Decision nodes:
///   identity                   first argument unchanged
///   non-empty                  the argument when it holds non-blank text
///   string-match TEXT RE       first line of TEXT matching RE
///   ifconfig-check-interfaces TEXT [EXCLUDED...]
///                              TEXT when an interface other than the
///                              excluded ones is up
///   ifconfig-get-interfaces TEXT
///                              interface names except lo, one per line
///   validate TEXT              the first address line of `host` output
///   traceroute-last-hop TEXT   the address in "Success A" / "LastHop A"
const NamedFunction* find_function(const std::string& name);
std::vector<std::string> function_names();

/// Interfaces in ifconfig output (net-tools and BSD/iproute-style headers)
/// with their UP flag, in order of appearance.
struct InterfaceInfo {
  std::string name;
  bool up = false;
};
std::vector<InterfaceInfo> parse_ifconfig(const std::string& text);

std::vector<std::string> split_lines(const std::string& text);

}  // namespace tsg::nodes
