#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsg/graph/registry.hpp"
#include "tsg/lang/ast.hpp"
#include "tsg/nodes/expr.hpp"

namespace tsg::nodes {

struct Verifier {
  enum class Kind { PassThrough, Named, Expr };
  Kind kind = Kind::PassThrough;
  std::string name;
  ExprProgram program;
  std::vector<std::string> extra;
};

/// Config 1 is the label; then a (verifier, extra) pair per input; a final
/// `combine=<fn>` argument picks the combiner (`or` when absent).
struct DecisionConfig {
  std::string label;
  std::vector<Verifier> verifiers;  // verifiers[i] checks input i
  std::string combiner = "or";
};

/// Throws std::invalid_argument on an unknown function or a malformed
/// expression.
DecisionConfig parse_decision_config(const std::vector<lang::ConfigValue>& args);

struct Verification {
  std::optional<std::string> result;  // nullopt when the check failed
  std::string error;                  // evaluation error, if any
};

Verification verify(const Verifier& verifier, const std::string& text);

/// `or`: the first non-false result in input order. `and`: the last result
/// when every one passed.
std::optional<std::string> combine(const std::string& combiner, const std::vector<std::optional<std::string>>& results);

struct DecisionStatus {
  std::string label;
  bool pass = false;
  std::string detail;
  std::uint64_t seq = 0;
  std::int64_t timestamp = 0;
};

nlohmann::json to_json(const DecisionStatus& status);
/// Throws on anything that is not a status object.
DecisionStatus parse_status(const std::string& text);

struct SummaryRow {
  std::string label;
  std::string result;  // pass, fail, pending or invalid
  std::string detail;
};

/// OVERALL is "pending" when no row has reported, otherwise "pass" when
/// every reporting row passed and "fail" when not.
SummaryRow overall_row(const std::vector<SummaryRow>& rows);

/// Fixed-width table; failing rows are flagged with `!` and the last row
/// is OVERALL.
std::string render_summary(const std::vector<SummaryRow>& rows);

/// The OVERALL result in a rendered table, or empty when absent.
std::string summary_overall(const std::string& table);
/// Rows of a rendered table, OVERALL excluded.
std::vector<SummaryRow> parse_summary(const std::string& table);

graph::NodeCallbacks decision_callbacks();
graph::NodeCallbacks summary_callbacks();

}  // namespace tsg::nodes
