#pragma once

#include <string>

#include "tsg/lang/ast.hpp"

namespace tsg::lang {

/// Canonical text: one statement per line, single spaces around link
/// operators, `, ` between list items. Port lists are printed only where
/// the author wrote them.
std::string serialize_document(const TsgDocument& doc);

std::string serialize_statement(const Statement& st);
std::string serialize_value(const ConfigValue& value);
std::string serialize_ports(const std::vector<PortRef>& ports);

}  // namespace tsg::lang
