#pragma once

#include <string>
#include <vector>

#include "tsg/graph/registry.hpp"
#include "tsg/lang/ast.hpp"

namespace tsg::lang {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;
};

/// Lints a document against the registry: unknown classes, duplicate
/// instance names, out-of-range port indices, unequal port-list lengths in
/// one linking expression, and `-->` aimed at something other than a View.
/// Missing required configuration arguments are reported as warnings.
std::vector<Diagnostic> validate_document(const TsgDocument& doc, const graph::NodeRegistry& registry);

bool has_errors(const std::vector<Diagnostic>& diags);

std::string format_diagnostic(const Diagnostic& d, const std::string& source_name);

}  // namespace tsg::lang
