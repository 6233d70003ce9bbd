#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tsg/lang/ast.hpp"

namespace tsg::lang {

enum class TokenKind {
  Identifier,
  Integer,
  String,  // quoted argument
  Word,    // unquoted argument that is not an integer or s-expression
  SExpr,   // balanced parenthesized argument
  ColonColon,
  Arrow,      // ->
  SelfArrow,  // -->
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Semicolon,
  Minus,
  End,
};

const char* to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourceSpan span;
};

/// Splits `.tsg` source into tokens. Text between a class name's `(` and the
/// matching `)` is lexed as arguments: quoted strings, integers, balanced
/// s-expressions, or bare words. `//` starts a comment outside argument lists.
/// The returned stream always ends with an End token.
std::vector<Token> tokenize(std::string_view source);

bool is_identifier(std::string_view text);

}  // namespace tsg::lang
