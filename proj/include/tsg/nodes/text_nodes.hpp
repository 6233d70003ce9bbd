#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsg/graph/registry.hpp"

namespace tsg::nodes {

/// Lines matching `re` are wrapped as `>>> line <<<`.
std::string mark_lines(const std::string& text, const std::regex& re);

/// Replaces `{N}` with values[N]. Indices without a value are collected
/// in `missing` and left in place.
std::string fill_template(const std::string& tmpl, const std::map<int, std::string>& values,
                          std::vector<int>* missing = nullptr);
std::vector<int> template_indices(const std::string& tmpl);

/// Values of every member whose key path ends with `path` (dot separated),
/// in document order. Strings are returned bare, everything else as JSON.
std::vector<std::string> json_extract(const nlohmann::ordered_json& doc, const std::string& path);

/// One `key=value,key=value` flow-table entry.
struct FlowEntry {
  std::string raw;
  std::vector<std::pair<std::string, std::string>> fields;  // in line order
  std::string get(const std::string& key) const;
};

/// Nullopt when some field lacks `=`.
std::optional<FlowEntry> parse_flow_line(const std::string& line);

struct FlowFilterResult {
  std::vector<std::string> kept;  // raw lines, in input order
  std::size_t dropped = 0;        // unparseable lines
};

/// Keeps entries whose nw_src matches `src` and nw_dst matches `dst`. Empty
/// criteria match anything; criteria with a `/` are IPv4 prefixes.
FlowFilterResult flow_space_filter(const std::string& dump, const std::string& src, const std::string& dst);

/// Fixed-width table of key=value entries: columns are the union of keys
/// in first-seen order. One section per input.
std::string render_table(const std::vector<std::pair<std::string, std::string>>& sections);
/// Data rows in a table made by render_table.
std::size_t table_rows(const std::string& table);

graph::NodeCallbacks clock_callbacks();
graph::NodeCallbacks function_callbacks();
graph::NodeCallbacks filter_callbacks();
graph::NodeCallbacks format_callbacks();
graph::NodeCallbacks tee_callbacks();
graph::NodeCallbacks json_filter_callbacks();
graph::NodeCallbacks flow_space_filter_callbacks();
graph::NodeCallbacks table_view_callbacks();
graph::NodeCallbacks graph_view_callbacks();

}  // namespace tsg::nodes
