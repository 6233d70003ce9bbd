#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsg::nodes {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SNode;

/// A parsed s-expression over integers, strings, symbols (`input`,
/// `input-N`, `t`, `nil`, lambda parameters) and the operators length,
/// string-match, >, <, >=, <=, =, not, and, or and lambda.
struct ExprProgram {
  std::shared_ptr<const SNode> root;
  std::string source;
};

/// Throws ExprError on malformed text or a lambda without exactly one
/// parameter.
ExprProgram parse_expr(std::string_view text);

/// `nullopt` is the false signal. Other results are rendered as text:
/// true as "t", integers in decimal, strings as they are. A program that
/// evaluates to a lambda is applied to the selected input. `input` is the
/// selected input; `input-N` is input N. Throws ExprError on type errors.
std::optional<std::string> eval_expr(const ExprProgram& program, const std::vector<std::string>& inputs,
                                     std::size_t selected = 0);

}  // namespace tsg::nodes
