#pragma once

#include <string>
#include <string_view>

#include "tsg/lang/ast.hpp"

namespace tsg::lang {

/// Parses `.tsg` text. Throws ParseError with the offending span.
TsgDocument parse_document(std::string_view text, std::string source_name = "<input>");

/// Reads and parses a file; I/O failures surface as ParseError at offset 0.
TsgDocument parse_file(const std::string& path);

}  // namespace tsg::lang
