#include "tsg/lang/ast.hpp"

#include <cctype>

namespace tsg::lang {

namespace {

std::string span_prefix(const SourceSpan& span) {
  return std::to_string(span.line) + ":" + std::to_string(span.column) + ": ";
}

bool integer_text(const std::string& s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// True when `s` survives the unquoted-argument lexer unchanged: no
// separators, no leading/trailing or repeated whitespace, no quotes.
bool safe_bare(const std::string& s) {
  if (s.empty()) return false;
  if (std::isspace(static_cast<unsigned char>(s.front())) || std::isspace(static_cast<unsigned char>(s.back())))
    return false;
  bool prev_space = false;
  for (char c : s) {
    if (c == ',' || c == '(' || c == ')' || c == '"') return false;
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (space && (c != ' ' || prev_space)) return false;
    prev_space = space;
  }
  return true;
}

bool balanced_sexpr(const std::string& s) {
  if (s.empty() || s.front() != '(') return false;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '(') ++depth;
    else if (c == ')' && --depth < 0) return false;
    else if (c == '\n' || c == '\t' || c == '\r') return false;
    else if (c == ',' && depth == 0) return false;
  }
  return depth == 0 && !in_string && s.back() == ')' && s.find("  ") == std::string::npos;
}

}  // namespace

ConfigValue ConfigValue::from_text(const std::string& text) {
  if (text == "nil") return nil();
  if (integer_text(text)) return {Kind::Integer, text};
  if (balanced_sexpr(text)) return {Kind::SExpr, text};
  if (safe_bare(text)) return bare(text);
  return quoted(text);
}

bool operator==(const NodeDecl& a, const NodeDecl& b) {
  return a.name == b.name && a.class_name == b.class_name && a.args == b.args;
}

bool operator==(const Endpoint& a, const Endpoint& b) {
  return a.target == b.target && a.input_ports == b.input_ports && a.output_ports == b.output_ports;
}

bool operator==(const LinkChain& a, const LinkChain& b) {
  return a.endpoints == b.endpoints && a.ops == b.ops;
}

bool operator==(const TsgDocument& a, const TsgDocument& b) { return a.statements == b.statements; }

ParseError::ParseError(SourceSpan span, const std::string& message)
    : std::runtime_error(span_prefix(span) + message), span_(span), message_(message) {}

std::vector<const NodeDecl*> collect_declarations(const TsgDocument& doc) {
  std::vector<const NodeDecl*> out;
  for (const Statement& st : doc.statements) {
    if (const auto* decl = std::get_if<NodeDecl>(&st)) {
      out.push_back(decl);
      continue;
    }
    for (const Endpoint& ep : std::get<LinkChain>(st).endpoints)
      if (const NodeDecl* d = ep.decl()) out.push_back(d);
  }
  return out;
}

}  // namespace tsg::lang
