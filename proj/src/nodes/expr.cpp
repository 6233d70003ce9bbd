#include "tsg/nodes/expr.hpp"

#include <cctype>
#include <charconv>
#include <functional>
#include <map>
#include <regex>
#include <variant>

namespace tsg::nodes {

struct SNode {
  enum class Kind { Integer, String, Symbol, List };
  Kind kind = Kind::List;
  long long integer = 0;
  std::string text;
  std::vector<std::shared_ptr<const SNode>> items;
};

namespace {

using NodePtr = std::shared_ptr<const SNode>;

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  NodePtr read_all() {
    NodePtr n = read();
    skip_space();
    if (pos_ != s_.size()) throw ExprError("trailing text after expression");
    return n;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  NodePtr read() {
    skip_space();
    if (pos_ >= s_.size()) throw ExprError("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto list = std::make_shared<SNode>();
      for (;;) {
        skip_space();
        if (pos_ >= s_.size()) throw ExprError("unclosed '('");
        if (s_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list->items.push_back(read());
      }
    }
    if (c == ')') throw ExprError("unexpected ')'");
    if (c == '"') return read_string();
    if (c == '\'') {
      ++pos_;
      NodePtr quoted = read();
      if (quoted->kind != SNode::Kind::Symbol) throw ExprError("only symbols can be quoted");
      auto n = std::make_shared<SNode>();
      n->kind = SNode::Kind::String;
      n->text = quoted->text;
      return n;
    }
    return read_atom();
  }

  NodePtr read_string() {
    ++pos_;
    auto n = std::make_shared<SNode>();
    n->kind = SNode::Kind::String;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\' && pos_ < s_.size()) {
        c = s_[pos_++];
        if (c == 'n') c = '\n';
        else if (c == 't') c = '\t';
      }
      n->text += c;
    }
    if (pos_ >= s_.size()) throw ExprError("unterminated string");
    ++pos_;
    return n;
  }

  NodePtr read_atom() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
           s_[pos_] != ')' && s_[pos_] != '"')
      ++pos_;
    const std::string_view tok = s_.substr(start, pos_ - start);
    auto n = std::make_shared<SNode>();
    long long v = 0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec == std::errc() && end == tok.data() + tok.size()) {
      n->kind = SNode::Kind::Integer;
      n->integer = v;
    } else {
      n->kind = SNode::Kind::Symbol;
      n->text = std::string(tok);
    }
    return n;
  }
};

struct Lambda {
  std::string param;
  NodePtr body;
};

using Value = std::variant<bool, long long, std::string, Lambda>;

bool truthy(const Value& v) { return !(std::holds_alternative<bool>(v) && !std::get<bool>(v)); }

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "string";
    default: return "lambda";
  }
}

class Evaluator {
 public:
  Evaluator(const std::vector<std::string>& inputs, std::size_t selected) {
    for (std::size_t i = 0; i < inputs.size(); ++i) globals_["input-" + std::to_string(i)] = inputs[i];
    globals_["input"] = selected < inputs.size() ? inputs[selected] : std::string();
  }

  Value eval(const NodePtr& n, const std::map<std::string, Value>& env) {
    switch (n->kind) {
      case SNode::Kind::Integer: return n->integer;
      case SNode::Kind::String: return n->text;
      case SNode::Kind::Symbol: return lookup(n->text, env);
      case SNode::Kind::List: return eval_list(*n, env);
    }
    throw ExprError("bad expression");
  }

  Value apply(const Lambda& fn, Value arg, const std::map<std::string, Value>& env) {
    auto scope = env;
    scope[fn.param] = std::move(arg);
    return eval(fn.body, scope);
  }

 private:
  std::map<std::string, Value> globals_;

  Value lookup(const std::string& name, const std::map<std::string, Value>& env) {
    if (auto it = env.find(name); it != env.end()) return it->second;
    if (name == "t") return true;
    if (name == "nil") return false;
    if (auto it = globals_.find(name); it != globals_.end()) return it->second;
    if (name.rfind("input-", 0) == 0) return std::string();
    throw ExprError("unbound symbol '" + name + "'");
  }

  std::string as_string(const Value& v, const char* op) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw ExprError(std::string(op) + ": expected string, got " + type_name(v));
  }

  long long as_int(const Value& v, const char* op) {
    if (const auto* i = std::get_if<long long>(&v)) return *i;
    throw ExprError(std::string(op) + ": expected integer, got " + type_name(v));
  }

  void arity(const SNode& n, std::size_t args, const char* op) {
    if (n.items.size() != args + 1)
      throw ExprError(std::string(op) + " takes " + std::to_string(args) + " argument(s)");
  }

  Value eval_list(const SNode& n, const std::map<std::string, Value>& env) {
    if (n.items.empty()) return false;
    const NodePtr& head = n.items[0];
    if (head->kind == SNode::Kind::Symbol) {
      const std::string& op = head->text;
      if (op == "lambda") {
        if (n.items.size() != 3 || n.items[1]->kind != SNode::Kind::List || n.items[1]->items.size() != 1 ||
            n.items[1]->items[0]->kind != SNode::Kind::Symbol)
          throw ExprError("lambda takes exactly one parameter and one body");
        return Lambda{n.items[1]->items[0]->text, n.items[2]};
      }
      if (op == "and") {
        Value last = true;
        for (std::size_t i = 1; i < n.items.size(); ++i) {
          last = eval(n.items[i], env);
          if (!truthy(last)) return false;
        }
        return last;
      }
      if (op == "or") {
        for (std::size_t i = 1; i < n.items.size(); ++i) {
          Value v = eval(n.items[i], env);
          if (truthy(v)) return v;
        }
        return false;
      }
      if (op == "not") {
        arity(n, 1, "not");
        return !truthy(eval(n.items[1], env));
      }
      if (op == "length") {
        arity(n, 1, "length");
        return static_cast<long long>(as_string(eval(n.items[1], env), "length").size());
      }
      if (op == "string-match") {
        arity(n, 2, "string-match");
        const std::string pattern = as_string(eval(n.items[1], env), "string-match");
        const std::string text = as_string(eval(n.items[2], env), "string-match");
        return string_match(pattern, text);
      }
      static const std::map<std::string, std::function<bool(long long, long long)>> cmp = {
          {">", std::greater<>()},  {"<", std::less<>()},        {">=", std::greater_equal<>()},
          {"<=", std::less_equal<>()}, {"=", std::equal_to<>()},
      };
      if (auto it = cmp.find(op); it != cmp.end()) {
        arity(n, 2, op.c_str());
        Value a = eval(n.items[1], env);
        Value b = eval(n.items[2], env);
        if (op == "=" && std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b))
          return std::get<std::string>(a) == std::get<std::string>(b);
        return it->second(as_int(a, op.c_str()), as_int(b, op.c_str()));
      }
    }
    Value fn = eval(head, env);
    const auto* lambda = std::get_if<Lambda>(&fn);
    if (!lambda) throw ExprError(std::string("cannot call a ") + type_name(fn));
    if (n.items.size() != 2) throw ExprError("lambda takes exactly one argument");
    return apply(*lambda, eval(n.items[1], env), env);
  }

  static Value string_match(const std::string& pattern, const std::string& text) {
    std::regex re;
    try {
      re = std::regex(pattern);
    } catch (const std::regex_error&) {
      throw ExprError("string-match: bad pattern '" + pattern + "'");
    }
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(start, end - start);
      if (std::regex_search(line, re)) return line;
      if (end == text.size()) break;
      start = end + 1;
    }
    return false;
  }
};

}  // namespace

ExprProgram parse_expr(std::string_view text) {
  ExprProgram p;
  p.root = Reader(text).read_all();
  p.source = std::string(text);
  // Surface lambda shape errors before evaluation.
  std::function<void(const NodePtr&)> check = [&](const NodePtr& n) {
    if (n->kind != SNode::Kind::List || n->items.empty()) return;
    if (n->items[0]->kind == SNode::Kind::Symbol && n->items[0]->text == "lambda") {
      if (n->items.size() != 3 || n->items[1]->kind != SNode::Kind::List || n->items[1]->items.size() != 1)
        throw ExprError("lambda takes exactly one parameter and one body");
    }
    for (const auto& child : n->items) check(child);
  };
  check(p.root);
  return p;
}

std::optional<std::string> eval_expr(const ExprProgram& program, const std::vector<std::string>& inputs,
                                     std::size_t selected) {
  if (!program.root) throw ExprError("empty program");
  Evaluator ev(inputs, selected);
  const std::map<std::string, Value> env;
  Value v = ev.eval(program.root, env);
  if (const auto* fn = std::get_if<Lambda>(&v))
    v = ev.apply(*fn, selected < inputs.size() ? inputs[selected] : std::string(), env);
  if (!truthy(v)) return std::nullopt;
  if (std::holds_alternative<bool>(v)) return std::string("t");
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return std::string("#<lambda>");
}

}  // namespace tsg::nodes
