#include <doctest.h>

#include "doc_gen.hpp"
#include "support.hpp"
#include "tsg/lang/lexer.hpp"
#include "tsg/lang/serializer.hpp"
#include "tsg/lang/validate.hpp"

using namespace tsg;
using namespace tsg::lang;
using tsg::testing::fixture;
using tsg::testing::read_text;

namespace {

std::vector<TokenKind> kinds(const std::string& text) {
  std::vector<TokenKind> out;
  for (const Token& t : tokenize(text)) out.push_back(t.kind);
  return out;
}

std::string parse_error(const std::string& text) {
  try {
    parse_document(text);
  } catch (const ParseError& e) {
    return e.message();
  }
  return "";
}

std::vector<std::string> errors(const std::string& text) {
  static const graph::NodeRegistry registry = nodes::make_builtin_registry();
  std::vector<std::string> out;
  for (const Diagnostic& d : validate_document(parse_document(text), registry))
    if (d.severity == Severity::Error) out.push_back(d.message);
  return out;
}

}  // namespace

TEST_CASE("lexer distinguishes arrows, ports and arguments") {
  using K = TokenKind;
  CHECK(kinds("a[1] --> [0, -2]b;") == std::vector<K>{K::Identifier, K::LBracket, K::Integer, K::RBracket,
                                                       K::SelfArrow, K::LBracket, K::Integer, K::Comma, K::Minus,
                                                       K::Integer, K::RBracket, K::Identifier, K::Semicolon, K::End});
  CHECK(kinds("x :: Ping(host, \"a b\", 3, (f x));") ==
        std::vector<K>{K::Identifier, K::ColonColon, K::Identifier, K::LParen, K::Word, K::Comma, K::String, K::Comma,
                       K::Integer, K::Comma, K::SExpr, K::RParen, K::Semicolon, K::End});
}

TEST_CASE("comments are skipped outside argument lists only") {
  auto doc = parse_document("// header\nx :: Command(nil, http://h/p); // trailing\n");
  REQUIRE(doc.statements.size() == 1);
  const auto& d = std::get<NodeDecl>(doc.statements[0]);
  CHECK(d.args[1] == ConfigValue::bare("http://h/p"));
}

TEST_CASE("argument kinds") {
  auto doc = parse_document("x :: F(nil, -12, \"q\\\"s\", bare word, (lambda  (x)\n  x), 'input-0);");
  const auto& args = std::get<NodeDecl>(doc.statements[0]).args;
  REQUIRE(args.size() == 6);
  CHECK(args[0].kind == ConfigValue::Kind::Nil);
  CHECK(args[1] == ConfigValue{ConfigValue::Kind::Integer, "-12"});
  CHECK(args[2] == ConfigValue::quoted("q\"s"));
  CHECK(args[3] == ConfigValue::bare("bare word"));
  CHECK(args[4] == ConfigValue{ConfigValue::Kind::SExpr, "(lambda (x) x)"});
  CHECK(args[5] == ConfigValue::bare("'input-0"));
}

TEST_CASE("chain structure and port lists") {
  auto doc = parse_document("a[1, 0] -> [0, -2]b :: Arp() -> c;");
  const auto& chain = std::get<LinkChain>(doc.statements[0]);
  REQUIRE(chain.endpoints.size() == 3);
  CHECK(*chain.endpoints[0].output_ports == std::vector<PortRef>{{PortKind::Output, 1}, {PortKind::Output, 0}});
  CHECK(*chain.endpoints[1].input_ports == std::vector<PortRef>{{PortKind::Input, 0}, {PortKind::Config, 2}});
  CHECK(chain.endpoints[1].decl()->name == "b");
  CHECK(*chain.endpoints[2].reference() == "c");
  CHECK_FALSE(chain.endpoints[2].input_ports.has_value());
}

TEST_CASE("spans point at the offending text") {
  try {
    parse_document("a -> b;\nc :: Ping(x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.message() == "unclosed argument list");
    CHECK(e.span().line == 3);
  }
  auto doc = parse_document("a -> b;\n  c :: Ping();");
  const auto& d = std::get<NodeDecl>(doc.statements[1]);
  CHECK(d.span.line == 2);
  CHECK(d.span.column == 3);
  CHECK(d.span.start == 10);
}

TEST_CASE("parse errors") {
  CHECK(parse_error("x :: Ping(a, b") == "unclosed argument list");
  CHECK(parse_error("a -> [-0]b;") == "configuration index must be 1 or greater");
  CHECK(parse_error("a[0] --> v;") == "'-->' links the node itself and cannot take a left port list");
  CHECK(parse_error("a --> [-1]v;") == "'-->' cannot target a configuration argument");
  CHECK(parse_error("a -> b") == "missing ';' at end of statement");
  CHECK(parse_error("x :: Ping(a,,b);") == "empty argument");
  CHECK(parse_error("a -> [0, 1b;") != "");
  CHECK(parse_error("a -> []b;") == "empty port list");
  CHECK(parse_error("[0]a -> b;") == "input port list on the first node of a statement");
  CHECK(parse_error("a -> b[0];") == "output port list on the last node of a statement");
  CHECK(parse_error("Ping(x);") == "anonymous node declaration must be part of a linking expression");
  CHECK(parse_error("a;") == "expected a node declaration or a linking expression");
  CHECK(parse_error("x :: F(\"open);") == "unterminated string");
  CHECK(parse_error("a -> b[-1] -> c;") == "configuration index in an output port list");
}

TEST_CASE("serializer golden output") {
  CHECK(serialize_document(parse_document("Clock(5) -> t :: Topology-SDN(localhost)\n  -> Graph() --> view;\n"
                                          "t[0] -> [1]view;")) ==
        "Clock(5) -> t :: Topology-SDN(localhost) -> Graph() --> view;\nt[0] -> [1]view;\n");
  CHECK(serialize_document(parse_document("x::F( a ,\"b\\n\" , nil,(g  h));")) == "x :: F(a, \"b\\n\", nil, (g h));\n");
  CHECK(serialize_document(parse_document("x :: F;")) == "x :: F();\n");
  CHECK(serialize_value(ConfigValue::from_text("a, b")) == "\"a, b\"");
  CHECK(serialize_value(ConfigValue::from_text("17")) == "17");
  CHECK(serialize_value(ConfigValue::from_text("nil")) == "nil");
}

TEST_CASE("fixtures round-trip through the serializer") {
  for (const char* name : {"topology.tsg", "everyday.tsg", "everyday_full.tsg"}) {
    CAPTURE(name);
    const TsgDocument doc = parse_document(read_text(fixture(name)));
    const std::string once = serialize_document(doc);
    CHECK(parse_document(once) == doc);
    CHECK(serialize_document(parse_document(once)) == once);
  }
}

TEST_CASE("random documents round-trip through the serializer") {
  for (std::uint32_t seed = 1; seed <= 500; ++seed) {
    tsg::testing::DocumentGenerator gen(seed);
    const TsgDocument doc = gen.document();
    const std::string text = serialize_document(doc);
    CAPTURE(text);
    TsgDocument back;
    REQUIRE_NOTHROW(back = parse_document(text));
    CHECK(back == doc);
    CHECK(serialize_document(back) == text);
  }
}

TEST_CASE("from_text values survive a reparse unchanged") {
  tsg::testing::DocumentGenerator gen(99);
  for (int i = 0; i < 2000; ++i) {
    const std::string raw = gen.random_text();
    const ConfigValue v = ConfigValue::from_text(raw);
    CAPTURE(raw);
    if (v.kind != ConfigValue::Kind::Nil) CHECK(v.text == raw);
    const auto doc = parse_document("x :: F(" + serialize_value(v) + ");");
    CHECK(std::get<NodeDecl>(doc.statements[0]).args.at(0) == v);
  }
}

TEST_CASE("identifiers") {
  CHECK(is_identifier("ping-decision"));
  CHECK(is_identifier("Flow-stat-SDN"));
  CHECK(is_identifier("n_1"));
  CHECK_FALSE(is_identifier("a-"));
  CHECK_FALSE(is_identifier("1a"));
  CHECK_FALSE(is_identifier(""));
}

TEST_CASE("validation reports port and class problems") {
  CHECK(errors("p :: Ping(localhost, h); v :: View(); p[7] -> v;") ==
        std::vector<std::string>{"output index 7 out of range for Ping (2 declared)"});
  CHECK(errors("p :: Ping(localhost, h); p[0, 1] -> [0]v;") ==
        std::vector<std::string>{"port list arity mismatch 2 vs 1"});
  CHECK(errors("x :: Nope();") == std::vector<std::string>{"unknown node class 'Nope'"});
  CHECK(errors("a :: Clock(1); a :: Clock(2);") == std::vector<std::string>{"duplicate instance name 'a'"});
  CHECK(errors("ghost -> v;") == std::vector<std::string>{"unknown instance 'ghost'"});
  CHECK(errors("c :: Clock(1); c --> t :: Tee(x);") == std::vector<std::string>{"'-->' target 't' is not a View"});
  CHECK(errors("c :: Clock(1); c -> [-4]p :: Ping(localhost, h);") ==
        std::vector<std::string>{"config index -4 out of range for Ping"});
  CHECK(errors("c :: Clock(1); c -> [4]p :: Ping(localhost, h);") ==
        std::vector<std::string>{"input index 4 out of range for Ping"});
  CHECK(errors("c :: Clock(1, 2, 3);").size() == 1);
}

TEST_CASE("missing required configuration is a warning unless linked") {
  static const graph::NodeRegistry registry = nodes::make_builtin_registry();
  auto diags = validate_document(parse_document("f :: Filter(); c :: Clock(1); c -> f;"), registry);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].severity == Severity::Warning);
  CHECK_FALSE(has_errors(diags));
  CHECK(validate_document(parse_document("f :: Filter(); c :: Clock(1); c -> [-1]f;"), registry).empty());
  CHECK(format_diagnostic(diags[0], "x.tsg").rfind("x.tsg:1:1: warning: ", 0) == 0);
}

TEST_CASE("fixtures validate cleanly") {
  static const graph::NodeRegistry registry = nodes::make_builtin_registry();
  for (const char* name : {"topology.tsg", "everyday.tsg", "everyday_full.tsg"}) {
    CAPTURE(name);
    CHECK(validate_document(parse_file(fixture(name)), registry).empty());
  }
}
