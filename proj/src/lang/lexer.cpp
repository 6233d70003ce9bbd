#include "tsg/lang/lexer.hpp"

#include <cctype>

namespace tsg::lang {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_integer_text(std::string_view s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (true) {
      skip_trivia();
      if (at_end()) break;
      lex_one();
    }
    out_.push_back(Token{TokenKind::End, "", here(pos_)});
    return std::move(out_);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
  std::vector<Token> out_;

  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  SourceSpan here(std::size_t start) const {
    return SourceSpan{start, start, line_, static_cast<int>(start - line_start_) + 1};
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void emit(TokenKind kind, SourceSpan span, std::string text) {
    span.end = pos_;
    out_.push_back(Token{kind, std::move(text), span});
  }

  void skip_whitespace() {
    while (!at_end() && is_space(peek())) advance();
  }

  void skip_trivia() {
    while (true) {
      skip_whitespace();
      if (peek() == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
        continue;
      }
      return;
    }
  }

  void lex_one() {
    const std::size_t start = pos_;
    const SourceSpan span = here(start);
    const char c = peek();

    if (ident_start(c)) {
      advance();
      while (!at_end()) {
        if (ident_char(peek())) {
          advance();
        } else if (peek() == '-' && ident_char(peek(1))) {
          advance();
        } else {
          break;
        }
      }
      emit(TokenKind::Identifier, span, std::string(src_.substr(start, pos_ - start)));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
      emit(TokenKind::Integer, span, std::string(src_.substr(start, pos_ - start)));
      return;
    }
    switch (c) {
      case ':':
        if (peek(1) != ':') throw ParseError(span, "expected '::'");
        advance();
        advance();
        emit(TokenKind::ColonColon, span, "::");
        return;
      case '-':
        if (peek(1) == '-' && peek(2) == '>') {
          advance();
          advance();
          advance();
          emit(TokenKind::SelfArrow, span, "-->");
        } else if (peek(1) == '>') {
          advance();
          advance();
          emit(TokenKind::Arrow, span, "->");
        } else {
          advance();
          emit(TokenKind::Minus, span, "-");
        }
        return;
      case '[':
        advance();
        emit(TokenKind::LBracket, span, "[");
        return;
      case ']':
        advance();
        emit(TokenKind::RBracket, span, "]");
        return;
      case ',':
        advance();
        emit(TokenKind::Comma, span, ",");
        return;
      case ';':
        advance();
        emit(TokenKind::Semicolon, span, ";");
        return;
      case '(':
        advance();
        emit(TokenKind::LParen, span, "(");
        lex_arguments();
        return;
      case ')':
        throw ParseError(span, "unexpected ')'");
      default:
        throw ParseError(span, std::string("unexpected character '") + c + "'");
    }
  }

  // Called right after an argument list's '('.
  void lex_arguments() {
    bool expect_arg = false;  // true right after a comma
    while (true) {
      skip_whitespace();
      if (at_end()) throw ParseError(here(pos_), "unclosed argument list");
      const SourceSpan span = here(pos_);
      if (peek() == ')') {
        if (expect_arg) throw ParseError(span, "empty argument");
        advance();
        emit(TokenKind::RParen, span, ")");
        return;
      }
      if (peek() == ',') throw ParseError(span, "empty argument");

      if (peek() == '"') {
        std::string value = lex_quoted();
        emit(TokenKind::String, span, std::move(value));
      } else {
        lex_raw_argument(span);
      }

      skip_whitespace();
      if (at_end()) throw ParseError(here(pos_), "unclosed argument list");
      if (peek() == ',') {
        const SourceSpan comma = here(pos_);
        advance();
        emit(TokenKind::Comma, comma, ",");
        expect_arg = true;
      } else if (peek() != ')') {
        throw ParseError(here(pos_), "expected ',' or ')' in argument list");
      } else {
        expect_arg = false;
      }
    }
  }

  std::string lex_quoted() {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (at_end()) throw ParseError(here(pos_), "unterminated string");
      char c = peek();
      if (c == '"') {
        advance();
        return value;
      }
      if (c == '\\') {
        advance();
        if (at_end()) throw ParseError(here(pos_), "unterminated string");
        char e = peek();
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default:
            value += '\\';
            value += e;
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
  }

  // Reads up to a depth-0 ',' or ')'. Whitespace runs outside string
  // literals collapse to one space so the value prints on a single line.
  void lex_raw_argument(const SourceSpan& span) {
    std::string value;
    int depth = 0;
    bool saw_paren = false;
    bool pending_space = false;
    while (true) {
      if (at_end()) throw ParseError(here(pos_), "unclosed argument list");
      char c = peek();
      if (depth == 0 && (c == ',' || c == ')')) break;
      if (is_space(c)) {
        pending_space = true;
        advance();
        continue;
      }
      if (pending_space && !value.empty()) value += ' ';
      pending_space = false;
      if (c == '"') {
        value += '"';
        advance();
        while (true) {
          if (at_end()) throw ParseError(here(pos_), "unterminated string");
          char s = peek();
          value += s;
          advance();
          if (s == '\\' && !at_end()) {
            value += peek();
            advance();
          } else if (s == '"') {
            break;
          }
        }
        continue;
      }
      if (c == '(') {
        ++depth;
        saw_paren = true;
      } else if (c == ')') {
        --depth;
      }
      value += c;
      advance();
    }
    // Trailing whitespace was only recorded as pending, so value is trimmed.
    if (saw_paren) {
      emit(TokenKind::SExpr, span, std::move(value));
    } else if (is_integer_text(value)) {
      emit(TokenKind::Integer, span, std::move(value));
    } else {
      emit(TokenKind::Word, span, std::move(value));
    }
  }
};

}  // namespace

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Integer: return "integer";
    case TokenKind::String: return "string";
    case TokenKind::Word: return "word";
    case TokenKind::SExpr: return "s-expression";
    case TokenKind::ColonColon: return "'::'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::SelfArrow: return "'-->'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

bool is_identifier(std::string_view text) {
  if (text.empty() || !ident_start(text[0])) return false;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (ident_char(text[i])) continue;
    if (text[i] == '-' && i + 1 < text.size() && ident_char(text[i + 1])) continue;
    return false;
  }
  return true;
}

}  // namespace tsg::lang
