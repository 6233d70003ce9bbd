#include "tsg/nodes/text_nodes.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tsg/engine/engine.hpp"
#include "tsg/nodes/decision.hpp"
#include "tsg/nodes/expr.hpp"
#include "tsg/nodes/functions.hpp"

namespace tsg::nodes {

using engine::NodeContext;

namespace {

void noop(NodeContext&) {}

std::string strip_quote(std::string s) {
  if (!s.empty() && s.front() == '\'') s.erase(0, 1);
  return s;
}

// News on an input means its delta is the current value, even when empty.
std::string current(const NodeContext& ctx, int input) { return ctx.news(input) ? ctx.delta(input) : ctx.latest(input); }

}  // namespace

std::string mark_lines(const std::string& text, const std::regex& re) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    const bool newline = end != std::string::npos;
    if (!newline) end = text.size();
    const std::string line = text.substr(start, end - start);
    out += std::regex_search(line, re) ? ">>> " + line + " <<<" : line;
    if (newline) out += '\n';
    start = end + 1;
  }
  return out;
}

std::vector<int> template_indices(const std::string& tmpl) {
  static const std::regex ph(R"(\{(\d+)\})");
  std::vector<int> out;
  for (auto it = std::sregex_iterator(tmpl.begin(), tmpl.end(), ph); it != std::sregex_iterator(); ++it)
    out.push_back(std::stoi((*it)[1].str()));
  return out;
}

std::string fill_template(const std::string& tmpl, const std::map<int, std::string>& values, std::vector<int>* missing) {
  static const std::regex ph(R"(\{(\d+)\})");
  std::string out;
  auto last = tmpl.cbegin();
  for (auto it = std::sregex_iterator(tmpl.begin(), tmpl.end(), ph); it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    out.append(last, m[0].first);
    const int index = std::stoi(m[1].str());
    if (auto v = values.find(index); v != values.end()) {
      out += v->second;
    } else {
      out += m[0].str();
      if (missing) missing->push_back(index);
    }
    last = m[0].second;
  }
  out.append(last, tmpl.cend());
  return out;
}

namespace {

// `keys` holds the object keys from the root to `v`; array positions add
// nothing, so "a.b" also reaches {"a":[{"b":1}]}.
void walk(const nlohmann::ordered_json& v, const std::vector<std::string>& parts, std::vector<std::string>& keys,
          std::vector<std::string>& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      keys.push_back(it.key());
      if (keys.size() >= parts.size() && std::equal(parts.begin(), parts.end(), keys.end() - parts.size()))
        out.push_back(it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
      walk(it.value(), parts, keys, out);
      keys.pop_back();
    }
  } else if (v.is_array()) {
    for (const auto& e : v) walk(e, parts, keys, out);
  }
}

}  // namespace

std::vector<std::string> json_extract(const nlohmann::ordered_json& doc, const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string p; std::getline(ss, p, '.');)
    if (!p.empty()) parts.push_back(p);
  std::vector<std::string> out;
  std::vector<std::string> keys;
  if (!parts.empty()) walk(doc, parts, keys, out);
  return out;
}

std::string FlowEntry::get(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return v;
  return "";
}

std::optional<FlowEntry> parse_flow_line(const std::string& line) {
  FlowEntry e;
  e.raw = line;
  std::stringstream ss(line);
  for (std::string field; std::getline(ss, field, ',');) {
    const auto eq = field.find('=');
    if (eq == std::string::npos || eq == 0) return std::nullopt;
    e.fields.emplace_back(field.substr(0, eq), field.substr(eq + 1));
  }
  if (e.fields.empty()) return std::nullopt;
  return e;
}

namespace {

bool address_matches(std::string value, const std::string& criterion) {
  if (criterion.empty() || criterion == "nil") return true;
  if (value.size() > 3 && value.compare(value.size() - 3, 3, "/32") == 0) value.resize(value.size() - 3);
  const auto slash = criterion.find('/');
  if (slash == std::string::npos) return value == criterion;
  in_addr net{}, addr{};
  const int bits = std::stoi(criterion.substr(slash + 1));
  if (inet_pton(AF_INET, criterion.substr(0, slash).c_str(), &net) != 1) return false;
  if (inet_pton(AF_INET, value.c_str(), &addr) != 1) return false;
  const std::uint32_t mask = bits <= 0 ? 0 : bits >= 32 ? 0xffffffffu : ~((1u << (32 - bits)) - 1);
  return (ntohl(addr.s_addr) & mask) == (ntohl(net.s_addr) & mask);
}

}  // namespace

FlowFilterResult flow_space_filter(const std::string& dump, const std::string& src, const std::string& dst) {
  FlowFilterResult r;
  for (const std::string& line : split_lines(dump)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto entry = parse_flow_line(line);
    if (!entry) {
      ++r.dropped;
      continue;
    }
    if (address_matches(entry->get("nw_src"), src) && address_matches(entry->get("nw_dst"), dst))
      r.kept.push_back(line);
  }
  return r;
}

std::string render_table(const std::vector<std::pair<std::string, std::string>>& sections) {
  std::string out;
  for (const auto& [name, text] : sections) {
    std::vector<FlowEntry> entries;
    for (const std::string& line : split_lines(text)) {
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      auto e = parse_flow_line(line);
      if (!e) e = FlowEntry{line, {{"line", line}}};
      entries.push_back(std::move(*e));
    }
    std::vector<std::string> columns;
    for (const auto& e : entries)
      for (const auto& [k, v] : e.fields)
        if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    std::vector<std::size_t> width;
    for (const auto& c : columns) {
      std::size_t w = c.size();
      for (const auto& e : entries) w = std::max(w, e.get(c).size());
      width.push_back(w);
    }
    out += "== " + name + " (" + std::to_string(entries.size()) + " entries)\n";
    if (entries.empty()) continue;
    auto row = [&](auto cell) {
      std::size_t used = columns.size();
      while (used > 1 && cell(used - 1).empty()) --used;
      std::string line;
      for (std::size_t i = 0; i < used; ++i) {
        std::string v = cell(i);
        line += v + std::string(width[i] - v.size(), ' ');
        line += i + 1 < used ? " | " : "";
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      return line + "\n";
    };
    out += row([&](std::size_t i) { return columns[i]; });
    std::string sep;
    for (std::size_t i = 0; i < columns.size(); ++i) sep += std::string(width[i] + (i ? 2 : 1), '-') + (i + 1 < columns.size() ? "+" : "");
    out += sep + "\n";
    for (const auto& e : entries) out += row([&](std::size_t i) { return e.get(columns[i]); });
  }
  return out;
}

std::size_t table_rows(const std::string& table) {
  std::size_t rows = 0;
  bool body = false;
  for (const std::string& line : split_lines(table)) {
    if (line.rfind("== ", 0) == 0) {
      body = false;
    } else if (!body && !line.empty() && line.find_first_not_of("-+") == std::string::npos) {
      body = true;
    } else if (body) {
      ++rows;
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

struct ClockState {
  std::uint64_t count = 0;
  engine::Instant period_ms = 0;
};

void clock_init(NodeContext& ctx) {
  const std::string text = ctx.config_text(1);
  double seconds = 0;
  std::size_t used = 0;
  try {
    seconds = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !(seconds > 0) || !std::isfinite(seconds))
    throw std::invalid_argument("period must be a positive number of seconds, got '" + text + "'");
  auto& st = ctx.state<ClockState>();
  st.period_ms = std::max<engine::Instant>(1, std::llround(seconds * 1000));
  ctx.schedule_timer(0);
}

void clock_exec(NodeContext& ctx) {
  if (!ctx.timer_fired()) return;
  auto& st = ctx.state<ClockState>();
  ctx.write(0, std::to_string(st.count++));
  ctx.schedule_timer(st.period_ms);
}

struct FunctionSpec {
  std::optional<ExprProgram> program;
  const NamedFunction* named = nullptr;
  std::optional<int> selected;  // data input; nullopt selects the first input with news
  bool lines = false;
};

FunctionSpec function_spec(const NodeContext& ctx) {
  FunctionSpec f;
  const lang::ConfigValue fn = ctx.config(1);
  if (fn.is_nil()) throw std::invalid_argument("Function needs a function name or expression");
  if (fn.kind == lang::ConfigValue::Kind::SExpr || fn.text.front() == '(') {
    f.program = parse_expr(fn.text);
  } else {
    f.named = find_function(fn.text);
    if (!f.named) throw std::invalid_argument("unknown function '" + fn.text + "'");
  }
  if (ctx.config_set(2)) {
    const std::string sel = strip_quote(ctx.config_text(2));
    if (sel == "input") f.selected = 0;
    else if (sel.rfind("input-", 0) == 0) f.selected = std::stoi(sel.substr(6));
    else throw std::invalid_argument("bad input selector '" + sel + "'");
  }
  const std::string mode = ctx.config_text(3, "single");
  if (mode != "single" && mode != "lines") throw std::invalid_argument("bad mode '" + mode + "'");
  f.lines = mode == "lines";
  return f;
}

void function_exec(NodeContext& ctx) {
  if (ctx.linked(0) ? !ctx.news(0) : !ctx.any_news()) return;
  const FunctionSpec f = function_spec(ctx);
  int data = 0;
  if (f.selected) {
    data = *f.selected;
  } else {
    for (int i : ctx.connected_inputs()) {
      if (ctx.news(i)) {
        data = i;
        break;
      }
    }
  }
  std::optional<std::string> result;
  if (f.program) {
    std::vector<std::string> inputs;
    const auto connected = ctx.connected_inputs();
    const int top = std::max(data, connected.empty() ? 0 : connected.back());
    for (int i = 0; i <= top; ++i) inputs.push_back(current(ctx, i));
    result = eval_expr(*f.program, inputs, static_cast<std::size_t>(data));
  } else {
    result = (*f.named)({current(ctx, data)});
  }
  if (!result) return;
  if (!f.lines) {
    ctx.write(0, *result);
    return;
  }
  const auto lines = split_lines(*result);
  for (std::size_t i = 0; i < lines.size(); ++i) ctx.write(static_cast<int>(i), lines[i]);
}

void function_init(NodeContext& ctx) { function_spec(ctx); }

struct FilterState {
  std::regex re;
};

void filter_init(NodeContext& ctx) {
  try {
    ctx.state<FilterState>().re = std::regex(ctx.config_text(1));
  } catch (const std::regex_error& e) {
    throw std::invalid_argument("bad pattern '" + ctx.config_text(1) + "': " + e.what());
  }
}

void filter_exec(NodeContext& ctx) {
  const std::string& text = ctx.delta(0);
  if (text.empty()) return;
  ctx.write(0, mark_lines(text, ctx.state<FilterState>().re));
}

void format_exec(NodeContext& ctx) {
  if (!ctx.any_news()) return;
  const std::string tmpl = ctx.config_text(1);
  std::map<int, std::string> values;
  for (int i : ctx.connected_inputs()) values[i] = ctx.latest(i);
  std::vector<int> missing;
  std::string out = fill_template(tmpl, values, &missing);
  if (!missing.empty())
    throw std::invalid_argument("placeholder {" + std::to_string(missing.front()) + "} refers to an unconnected input");
  ctx.write(0, std::move(out));
}

void tee_exec(NodeContext& ctx) {
  const std::string& text = ctx.delta(0);
  if (text.empty()) return;
  ctx.write(0, text);
  const std::string path = ctx.config_text(1);
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (out) out << text;
  if (!out || !out.flush()) ctx.report_error("cannot write to '" + path + "'");
}

void json_filter_exec(NodeContext& ctx) {
  if (!ctx.news(0)) return;
  const std::string& text = ctx.delta(0);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return;
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const std::exception& e) {
    ctx.write(0, std::string("ERROR: ") + e.what() + "\n");
    ctx.report_error(std::string("malformed JSON: ") + e.what());
    return;
  }
  const auto values = json_extract(doc, ctx.config_text(1));
  if (values.empty()) return;
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "\n" : "") + values[i];
  ctx.write(0, out);
}

void flow_filter_exec(NodeContext& ctx) {
  if (!ctx.any_news()) return;
  const std::string src = ctx.config_text(1);
  const std::string dst = ctx.config_text(2);
  std::string kept;
  std::size_t dropped = 0;
  for (int i : ctx.connected_inputs()) {
    FlowFilterResult r = flow_space_filter(ctx.latest(i), src, dst);
    for (const auto& line : r.kept) kept += line + "\n";
    dropped += r.dropped;
  }
  if (!kept.empty()) ctx.write(0, kept);
  ctx.write(1, std::to_string(dropped) + " dropped");
}

void table_exec(NodeContext& ctx) {
  if (!ctx.any_news()) return;
  std::vector<std::pair<std::string, std::string>> sections;
  for (int i : ctx.connected_inputs()) sections.emplace_back("input-" + std::to_string(i), ctx.latest(i));
  const std::string table = render_table(sections);
  ctx.write(0, table);
}

void graph_exec(NodeContext& ctx) {
  if (!ctx.any_news()) return;
  std::string dot = "graph topology {\n";
  for (int i : ctx.connected_inputs()) {
    for (const std::string& line : split_lines(ctx.latest(i))) {
      auto e = parse_flow_line(line);
      if (!e || e->get("src").empty() || e->get("dst").empty()) continue;
      dot += "  \"" + e->get("src") + "\" -- \"" + e->get("dst") + "\";\n";
    }
  }
  dot += "}\n";
  ctx.write_display(dot);
}

}  // namespace

graph::NodeCallbacks clock_callbacks() { return {clock_init, clock_exec, noop}; }
graph::NodeCallbacks function_callbacks() { return {function_init, function_exec, noop}; }
graph::NodeCallbacks filter_callbacks() { return {filter_init, filter_exec, noop}; }
graph::NodeCallbacks format_callbacks() { return {noop, format_exec, noop}; }
graph::NodeCallbacks tee_callbacks() { return {noop, tee_exec, noop}; }
graph::NodeCallbacks json_filter_callbacks() { return {noop, json_filter_exec, noop}; }
graph::NodeCallbacks flow_space_filter_callbacks() { return {noop, flow_filter_exec, noop}; }
graph::NodeCallbacks table_view_callbacks() { return {noop, table_exec, noop}; }
graph::NodeCallbacks graph_view_callbacks() { return {noop, graph_exec, noop}; }

}  // namespace tsg::nodes
