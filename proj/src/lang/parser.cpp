#include "tsg/lang/parser.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tsg/lang/lexer.hpp"

namespace tsg::lang {

namespace {

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.end = b.end;
  return s;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string source_name)
      : toks_(std::move(tokens)), source_name_(std::move(source_name)) {}

  TsgDocument run() {
    TsgDocument doc;
    doc.source_name = source_name_;
    while (peek().kind != TokenKind::End) doc.statements.push_back(statement());
    return doc;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string source_name_;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  const Token& previous() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
  bool accept(TokenKind kind) {
    if (peek().kind != kind) return false;
    take();
    return true;
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const { throw ParseError(at.span, msg); }

  const Token& expect(TokenKind kind, const char* what) {
    if (peek().kind != kind)
      fail(peek(), std::string("expected ") + what + ", found " + to_string(peek().kind));
    return take();
  }

  Statement statement() {
    const Token& first = peek();
    LinkChain chain;
    chain.endpoints.push_back(endpoint());
    while (peek().kind == TokenKind::Arrow || peek().kind == TokenKind::SelfArrow) {
      const Token& op_tok = take();
      const LinkOp op = op_tok.kind == TokenKind::Arrow ? LinkOp::Link : LinkOp::SelfLink;
      if (op == LinkOp::SelfLink && chain.endpoints.back().output_ports)
        fail(op_tok, "'-->' links the node itself and cannot take a left port list");
      chain.ops.push_back(op);
      Endpoint right = endpoint();
      if (op == LinkOp::SelfLink && right.input_ports) {
        for (const PortRef& p : *right.input_ports)
          if (p.kind == PortKind::Config) fail(op_tok, "'-->' cannot target a configuration argument");
      }
      chain.endpoints.push_back(std::move(right));
    }
    if (peek().kind != TokenKind::Semicolon) {
      if (peek().kind == TokenKind::End) fail(peek(), "missing ';' at end of statement");
      fail(peek(), std::string("missing ';' before ") + to_string(peek().kind));
    }
    const Token& semi = take();
    chain.span = join(first.span, semi.span);

    if (chain.endpoints.front().input_ports)
      throw ParseError(chain.endpoints.front().span, "input port list on the first node of a statement");
    if (chain.endpoints.back().output_ports)
      throw ParseError(chain.endpoints.back().span, "output port list on the last node of a statement");

    if (chain.endpoints.size() == 1) {
      Endpoint& only = chain.endpoints.front();
      if (only.is_reference())
        throw ParseError(only.span, "expected a node declaration or a linking expression");
      NodeDecl decl = std::get<NodeDecl>(std::move(only.target));
      if (!decl.name)
        throw ParseError(decl.span, "anonymous node declaration must be part of a linking expression");
      return decl;
    }
    return chain;
  }

  Endpoint endpoint() {
    Endpoint ep;
    const Token& first = peek();
    if (peek().kind == TokenKind::LBracket) ep.input_ports = port_list(false);

    const Token& name = expect(TokenKind::Identifier, "a node name");
    if (accept(TokenKind::ColonColon)) {
      NodeDecl decl;
      decl.name = name.text;
      const Token& cls = expect(TokenKind::Identifier, "a class name after '::'");
      decl.class_name = cls.text;
      if (peek().kind == TokenKind::LParen) decl.args = arguments();
      decl.span = join(name.span, previous().span);
      ep.target = std::move(decl);
    } else if (peek().kind == TokenKind::LParen) {
      NodeDecl decl;
      decl.class_name = name.text;
      decl.args = arguments();
      decl.span = join(name.span, previous().span);
      ep.target = std::move(decl);
    } else {
      ep.target = name.text;
    }

    if (peek().kind == TokenKind::LBracket) ep.output_ports = port_list(true);
    ep.span = join(first.span, previous().span);
    return ep;
  }

  std::vector<ConfigValue> arguments() {
    expect(TokenKind::LParen, "'('");
    std::vector<ConfigValue> args;
    if (accept(TokenKind::RParen)) return args;
    while (true) {
      const Token& t = take();
      switch (t.kind) {
        case TokenKind::String: args.push_back({ConfigValue::Kind::Quoted, t.text}); break;
        case TokenKind::Integer: args.push_back({ConfigValue::Kind::Integer, t.text}); break;
        case TokenKind::SExpr: args.push_back({ConfigValue::Kind::SExpr, t.text}); break;
        case TokenKind::Word:
          args.push_back(t.text == "nil" ? ConfigValue::nil() : ConfigValue::bare(t.text));
          break;
        default: fail(t, "expected an argument");
      }
      if (accept(TokenKind::RParen)) return args;
      expect(TokenKind::Comma, "',' or ')'");
    }
  }

  std::vector<PortRef> port_list(bool output_side) {
    take();  // '['
    std::vector<PortRef> ports;
    if (peek().kind == TokenKind::RBracket) fail(peek(), "empty port list");
    while (true) {
      if (peek().kind == TokenKind::End) fail(peek(), "unclosed port list");
      bool config = false;
      if (peek().kind == TokenKind::Minus) {
        const Token& minus = take();
        if (output_side) fail(minus, "configuration index in an output port list");
        config = true;
      }
      if (peek().kind == TokenKind::End) fail(peek(), "unclosed port list");
      const Token& num = expect(TokenKind::Integer, "a port index");
      int index = 0;
      try {
        index = std::stoi(num.text);
      } catch (const std::exception&) {
        fail(num, "port index out of range");
      }
      if (config) {
        if (index == 0) fail(num, "configuration index must be 1 or greater");
        ports.push_back({PortKind::Config, index});
      } else {
        ports.push_back({output_side ? PortKind::Output : PortKind::Input, index});
      }
      if (accept(TokenKind::RBracket)) break;
      if (peek().kind == TokenKind::End) fail(peek(), "unclosed port list");
      if (peek().kind != TokenKind::Comma) fail(peek(), std::string("unbalanced '['; expected ']' before ") + to_string(peek().kind));
      take();
    }
    return ports;
  }
};

}  // namespace

TsgDocument parse_document(std::string_view text, std::string source_name) {
  return Parser(tokenize(text), std::move(source_name)).run();
}

TsgDocument parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(SourceSpan{}, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path);
}

}  // namespace tsg::lang
