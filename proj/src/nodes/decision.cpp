#include "tsg/nodes/decision.hpp"

#include <regex>
#include <sstream>
#include <stdexcept>

#include "tsg/engine/engine.hpp"
#include "tsg/nodes/functions.hpp"

namespace tsg::nodes {

using engine::NodeContext;

namespace {

constexpr std::string_view kCombinePrefix = "combine=";

Verifier make_verifier(const lang::ConfigValue& v) {
  Verifier out;
  if (v.is_nil()) return out;
  if (v.kind == lang::ConfigValue::Kind::SExpr || (!v.text.empty() && v.text.front() == '(')) {
    out.kind = Verifier::Kind::Expr;
    try {
      out.program = parse_expr(v.text);
    } catch (const ExprError& e) {
      throw std::invalid_argument("bad verifier expression: " + std::string(e.what()));
    }
    return out;
  }
  if (!find_function(v.text)) throw std::invalid_argument("unknown function '" + v.text + "'");
  out.kind = Verifier::Kind::Named;
  out.name = v.text;
  return out;
}

std::string first_line(const std::string& text, std::size_t max = 120) {
  std::string line = text.substr(0, text.find('\n'));
  if (line.size() > max) line = line.substr(0, max) + "...";
  return line;
}

}  // namespace

DecisionConfig parse_decision_config(const std::vector<lang::ConfigValue>& args) {
  DecisionConfig cfg;
  std::vector<lang::ConfigValue> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  if (!args.empty() && !args[0].is_nil()) cfg.label = args[0].text;
  if (!rest.empty() && rest.back().text.rfind(kCombinePrefix, 0) == 0) {
    cfg.combiner = rest.back().text.substr(kCombinePrefix.size());
    rest.pop_back();
    if (cfg.combiner != "or" && cfg.combiner != "and")
      throw std::invalid_argument("unknown combiner '" + cfg.combiner + "'");
  }
  for (std::size_t i = 0; i < rest.size(); i += 2) {
    Verifier v = make_verifier(rest[i]);
    if (i + 1 < rest.size() && !rest[i + 1].is_nil()) v.extra.push_back(rest[i + 1].text);
    cfg.verifiers.push_back(std::move(v));
  }
  return cfg;
}

Verification verify(const Verifier& verifier, const std::string& text) {
  Verification out;
  try {
    switch (verifier.kind) {
      case Verifier::Kind::PassThrough:
        out.result = text;
        break;
      case Verifier::Kind::Named: {
        std::vector<std::string> args{text};
        args.insert(args.end(), verifier.extra.begin(), verifier.extra.end());
        out.result = (*find_function(verifier.name))(args);
        break;
      }
      case Verifier::Kind::Expr:
        out.result = eval_expr(verifier.program, {text});
        break;
    }
  } catch (const std::exception& e) {
    out.result.reset();
    out.error = e.what();
  }
  return out;
}

std::optional<std::string> combine(const std::string& combiner, const std::vector<std::optional<std::string>>& results) {
  if (combiner == "and") {
    if (results.empty()) return std::nullopt;
    for (const auto& r : results)
      if (!r) return std::nullopt;
    return results.back();
  }
  for (const auto& r : results)
    if (r) return r;
  return std::nullopt;
}

nlohmann::json to_json(const DecisionStatus& s) {
  return {{"label", s.label},
          {"result", s.pass ? "pass" : "fail"},
          {"detail", s.detail},
          {"seq", s.seq},
          {"timestamp", s.timestamp}};
}

DecisionStatus parse_status(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  DecisionStatus s;
  s.label = j.at("label").get<std::string>();
  const std::string result = j.at("result").get<std::string>();
  if (result != "pass" && result != "fail") throw std::invalid_argument("bad result '" + result + "'");
  s.pass = result == "pass";
  s.detail = j.value("detail", "");
  s.seq = j.value("seq", std::uint64_t{0});
  s.timestamp = j.value("timestamp", std::int64_t{0});
  return s;
}

SummaryRow overall_row(const std::vector<SummaryRow>& rows) {
  SummaryRow o{"OVERALL", "pending", ""};
  bool reported = false;
  std::string failing;
  for (const auto& r : rows) {
    if (r.result == "pending") continue;
    reported = true;
    if (r.result != "pass") failing += (failing.empty() ? "" : ",") + r.label;
  }
  if (reported) {
    o.result = failing.empty() ? "pass" : "fail";
    o.detail = failing;
  }
  return o;
}

std::string render_summary(const std::vector<SummaryRow>& rows) {
  std::vector<SummaryRow> all = rows;
  all.push_back(overall_row(rows));
  std::size_t wl = 8, wr = 7;
  for (const auto& r : all) {
    wl = std::max(wl, r.label.size());
    wr = std::max(wr, r.result.size());
  }
  auto line = [&](const std::string& flag, const std::string& a, const std::string& b, const std::string& c) {
    std::string out = flag + " " + a + std::string(wl - a.size() + 2, ' ') + b;
    if (!c.empty()) out += std::string(wr - b.size() + 2, ' ') + c;
    return out + "\n";
  };
  std::string out = line(" ", "DECISION", "RESULT", "DETAIL");
  for (const auto& r : all) {
    const bool bad = r.result == "fail" || r.result == "invalid";
    out += line(bad ? "!" : " ", r.label, r.result, r.detail);
  }
  return out;
}

std::vector<SummaryRow> parse_summary(const std::string& table) {
  static const std::regex row(R"(^[ !] (\S+)\s+(\S+)(?:\s+(.*))?$)");
  std::vector<SummaryRow> out;
  const auto lines = split_lines(table);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_match(lines[i], m, row)) continue;
    if (m[1].str() == "OVERALL") break;
    out.push_back({m[1].str(), m[2].str(), m[3].str()});
  }
  return out;
}

std::string summary_overall(const std::string& table) {
  static const std::regex overall(R"(^[ !] OVERALL\s+(\S+))");
  for (const auto& line : split_lines(table)) {
    std::smatch m;
    if (std::regex_search(line, m, overall)) return m[1].str();
  }
  return "";
}

namespace {

struct DecisionState {
  std::map<int, std::optional<std::string>> results;
  std::map<int, std::string> errors;
  std::map<int, bool> mid_run;  // data seen on this input since its last exit record
  std::uint64_t seq = 0;
};

std::vector<lang::ConfigValue> config_args(const NodeContext& ctx) {
  std::vector<lang::ConfigValue> args;
  for (int i = 1; i <= ctx.config_count(); ++i) args.push_back(ctx.config(i));
  return args;
}

void decision_exec(NodeContext& ctx) {
  if (!ctx.any_news()) return;
  const DecisionConfig cfg = parse_decision_config(config_args(ctx));
  auto& st = ctx.state<DecisionState>();

  bool evaluated = false;
  for (int i : ctx.connected_inputs()) {
    if (!ctx.news(i)) continue;
    const std::string& text = ctx.delta(i);
    if (text.empty() && ctx.ended(i) && st.mid_run[i]) {
      // The run's data was already judged; the exit record only closes it.
      st.mid_run[i] = false;
      continue;
    }
    st.mid_run[i] = !text.empty() && !ctx.ended(i);
    const Verifier v = static_cast<std::size_t>(i) < cfg.verifiers.size() ? cfg.verifiers[i] : Verifier{};
    Verification r = verify(v, text);
    st.results[i] = r.result;
    st.errors[i] = r.error;
    evaluated = true;
  }
  if (!evaluated) return;

  std::vector<std::optional<std::string>> ordered;
  std::string error;
  for (int i : ctx.connected_inputs()) {
    ordered.push_back(st.results.count(i) ? st.results[i] : std::nullopt);
    if (error.empty() && !st.errors[i].empty()) error = st.errors[i];
  }
  const std::optional<std::string> combined = combine(cfg.combiner, ordered);

  DecisionStatus status;
  status.label = cfg.label.empty() ? ctx.id() : cfg.label;
  status.seq = st.seq++;
  status.timestamp = ctx.now();
  status.pass = combined.has_value();
  if (combined) {
    status.detail = first_line(*combined);
    ctx.write(0, *combined);
  } else {
    status.detail = error.empty() ? "verification failed" : "error: " + error;
    ctx.write(1, status.label + ": " + status.detail + "\n");
  }
  ctx.write(2, to_json(status).dump() + "\n");
}

std::string last_line(const std::string& text) {
  const auto lines = split_lines(text);
  for (auto it = lines.rbegin(); it != lines.rend(); ++it)
    if (!it->empty()) return *it;
  return "";
}

std::string source_of(NodeContext& ctx, int input) {
  for (const auto& e : ctx.engine().tsg().edges())
    if (e.dst.node == ctx.id() && !e.dst.is_config() && e.dst.index == input) return e.src.node;
  return "input-" + std::to_string(input);
}

void summary_exec(NodeContext& ctx) {
  std::vector<SummaryRow> rows;
  for (int i : ctx.connected_inputs()) {
    const std::string latest = last_line(ctx.latest(i));
    if (latest.empty()) {
      rows.push_back({source_of(ctx, i), "pending", ""});
      continue;
    }
    try {
      const DecisionStatus s = parse_status(latest);
      rows.push_back({s.label, s.pass ? "pass" : "fail", s.detail});
    } catch (const std::exception&) {
      rows.push_back({source_of(ctx, i), "invalid", first_line(latest)});
    }
  }
  ctx.write(0, render_summary(rows));
}

void noop(NodeContext&) {}

}  // namespace

graph::NodeCallbacks decision_callbacks() {
  return {[](NodeContext& ctx) { parse_decision_config(config_args(ctx)); }, decision_exec, noop};
}

graph::NodeCallbacks summary_callbacks() { return {noop, summary_exec, noop}; }

}  // namespace tsg::nodes
