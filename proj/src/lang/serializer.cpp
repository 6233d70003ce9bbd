#include "tsg/lang/serializer.hpp"

namespace tsg::lang {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string decl_text(const NodeDecl& d) {
  std::string out;
  if (d.name) out += *d.name + " :: ";
  out += d.class_name + "(";
  for (std::size_t i = 0; i < d.args.size(); ++i) {
    if (i) out += ", ";
    out += serialize_value(d.args[i]);
  }
  out += ")";
  return out;
}

std::string endpoint_text(const Endpoint& ep) {
  std::string out;
  if (ep.input_ports) out += serialize_ports(*ep.input_ports);
  if (const auto* ref = ep.reference()) out += *ref;
  else out += decl_text(*ep.decl());
  if (ep.output_ports) out += serialize_ports(*ep.output_ports);
  return out;
}

}  // namespace

std::string serialize_value(const ConfigValue& value) {
  switch (value.kind) {
    case ConfigValue::Kind::Nil: return "nil";
    case ConfigValue::Kind::Quoted: return quote(value.text);
    case ConfigValue::Kind::Bare:
    case ConfigValue::Kind::Integer:
    case ConfigValue::Kind::SExpr: return value.text;
  }
  return value.text;
}

std::string serialize_ports(const std::vector<PortRef>& ports) {
  std::string out = "[";
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (i) out += ", ";
    if (ports[i].kind == PortKind::Config) out += "-";
    out += std::to_string(ports[i].index);
  }
  out += "]";
  return out;
}

std::string serialize_statement(const Statement& st) {
  if (const auto* decl = std::get_if<NodeDecl>(&st)) return decl_text(*decl) + ";";
  const auto& chain = std::get<LinkChain>(st);
  std::string out = endpoint_text(chain.endpoints.front());
  for (std::size_t i = 0; i < chain.ops.size(); ++i) {
    out += chain.ops[i] == LinkOp::Link ? " -> " : " --> ";
    out += endpoint_text(chain.endpoints[i + 1]);
  }
  return out + ";";
}

std::string serialize_document(const TsgDocument& doc) {
  std::string out;
  for (const Statement& st : doc.statements) out += serialize_statement(st) + "\n";
  return out;
}

}  // namespace tsg::lang
