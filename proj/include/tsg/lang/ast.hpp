#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tsg::lang {

struct SourceSpan {
  std::size_t start = 0;  // byte offset
  std::size_t end = 0;    // byte offset, exclusive
  int line = 1;
  int column = 1;
};

/// A configuration argument as written in the source. `text` holds the
/// unquoted, unescaped content; for s-expressions it is the balanced blob
/// with internal whitespace collapsed.
struct ConfigValue {
  enum class Kind { Bare, Quoted, Integer, Nil, SExpr };

  Kind kind = Kind::Nil;
  std::string text;

  static ConfigValue nil() { return {Kind::Nil, "nil"}; }
  static ConfigValue bare(std::string t) { return {Kind::Bare, std::move(t)}; }
  static ConfigValue quoted(std::string t) { return {Kind::Quoted, std::move(t)}; }

  /// Classifies free-form text the same way the parser classifies an
  /// unquoted argument, quoting it when it would not survive a reparse.
  static ConfigValue from_text(const std::string& text);

  bool is_nil() const { return kind == Kind::Nil; }

  friend bool operator==(const ConfigValue&, const ConfigValue&) = default;
};

enum class PortKind { Output, Input, Config };

struct PortRef {
  PortKind kind = PortKind::Input;
  int index = 0;  // Config ports are 1-based, the rest 0-based

  friend bool operator==(const PortRef&, const PortRef&) = default;
};

struct NodeDecl {
  std::optional<std::string> name;
  std::string class_name;
  std::vector<ConfigValue> args;
  SourceSpan span;
};

struct Endpoint {
  std::variant<std::string, NodeDecl> target;
  // nullopt means no brackets were written (implicit port 0).
  std::optional<std::vector<PortRef>> input_ports;
  std::optional<std::vector<PortRef>> output_ports;
  SourceSpan span;

  bool is_reference() const { return std::holds_alternative<std::string>(target); }
  const std::string* reference() const { return std::get_if<std::string>(&target); }
  const NodeDecl* decl() const { return std::get_if<NodeDecl>(&target); }
};

enum class LinkOp { Link, SelfLink };  // "->" and "-->"

struct LinkChain {
  std::vector<Endpoint> endpoints;
  std::vector<LinkOp> ops;  // ops.size() == endpoints.size() - 1
  SourceSpan span;
};

using Statement = std::variant<NodeDecl, LinkChain>;

struct TsgDocument {
  std::vector<Statement> statements;
  std::string source_name;
};

// Structural equality: source spans and the source name are ignored.
bool operator==(const NodeDecl& a, const NodeDecl& b);
bool operator==(const Endpoint& a, const Endpoint& b);
bool operator==(const LinkChain& a, const LinkChain& b);
bool operator==(const TsgDocument& a, const TsgDocument& b);

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, const std::string& message);

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

/// Instance names bound anywhere in the document (standalone and inline
/// declarations), in order of appearance.
std::vector<const NodeDecl*> collect_declarations(const TsgDocument& doc);

}  // namespace tsg::lang
