#include "tmkit/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace tmkit {

std::string to_string(const Value& value) {
  if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&value)) {
    std::string out = "\"";
    for (char c : *s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  }
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(value);
  return os.str();
}

Expr Expr::literal(Value v) {
  Expr e;
  e.op_ = Op::Literal;
  e.literal_ = std::move(v);
  return e;
}

Expr Expr::attribute(std::string name) {
  Expr e;
  e.op_ = Op::Attribute;
  e.name_ = std::move(name);
  return e;
}

Expr Expr::unary(Op op, Expr operand) {
  Expr e;
  e.op_ = op;
  e.operands_.push_back(std::make_shared<const Expr>(std::move(operand)));
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  Expr e;
  e.op_ = op;
  e.operands_.push_back(std::make_shared<const Expr>(std::move(lhs)));
  e.operands_.push_back(std::make_shared<const Expr>(std::move(rhs)));
  return e;
}

std::optional<Value> Expr::value(const Attributes& attrs) const {
  switch (op_) {
    case Op::Literal: return literal_;
    case Op::Attribute: {
      auto it = attrs.find(name_);
      if (it == attrs.end()) return std::nullopt;
      return it->second;
    }
    default: {
      auto b = evaluate(attrs);
      if (!b) return std::nullopt;
      return Value{*b};
    }
  }
}

namespace {

template <typename T>
std::optional<bool> order(Expr::Op op, const T& a, const T& b) {
  switch (op) {
    case Expr::Op::Lt: return a < b;
    case Expr::Op::Le: return a <= b;
    case Expr::Op::Gt: return a > b;
    case Expr::Op::Ge: return a >= b;
    default: return std::nullopt;
  }
}

}  // namespace

std::optional<bool> Expr::evaluate(const Attributes& attrs) const {
  switch (op_) {
    case Op::Literal:
    case Op::Attribute: {
      auto v = value(attrs);
      if (!v) return std::nullopt;
      if (const auto* b = std::get_if<bool>(&*v)) return *b;
      return std::nullopt;
    }
    case Op::Not: {
      auto v = operands_[0]->evaluate(attrs);
      if (!v) return std::nullopt;
      return !*v;
    }
    case Op::And: {
      auto a = operands_[0]->evaluate(attrs);
      auto b = operands_[1]->evaluate(attrs);
      if ((a && !*a) || (b && !*b)) return false;
      if (a && b) return true;
      return std::nullopt;
    }
    case Op::Or: {
      auto a = operands_[0]->evaluate(attrs);
      auto b = operands_[1]->evaluate(attrs);
      if ((a && *a) || (b && *b)) return true;
      if (a && b) return false;
      return std::nullopt;
    }
    case Op::Eq:
    case Op::Ne: {
      auto a = operands_[0]->value(attrs);
      auto b = operands_[1]->value(attrs);
      if (!a || !b) return std::nullopt;
      const bool equal = *a == *b;  // differing alternatives compare unequal
      return op_ == Op::Eq ? equal : !equal;
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      auto a = operands_[0]->value(attrs);
      auto b = operands_[1]->value(attrs);
      if (!a || !b || a->index() != b->index()) return std::nullopt;
      if (const auto* x = std::get_if<double>(&*a)) return order(op_, *x, std::get<double>(*b));
      if (const auto* x = std::get_if<std::string>(&*a)) return order(op_, *x, std::get<std::string>(*b));
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string Expr::to_string() const {
  auto bin = [&](const char* sym) {
    return "(" + operands_[0]->to_string() + " " + sym + " " + operands_[1]->to_string() + ")";
  };
  switch (op_) {
    case Op::Literal: return tmkit::to_string(literal_);
    case Op::Attribute: return name_;
    case Op::Not: return "not " + operands_[0]->to_string();
    case Op::And: return bin("and");
    case Op::Or: return bin("or");
    case Op::Lt: return bin("<");
    case Op::Le: return bin("<=");
    case Op::Gt: return bin(">");
    case Op::Ge: return bin(">=");
    case Op::Eq: return bin("==");
    case Op::Ne: return bin("!=");
  }
  return "?";
}

namespace {

struct Failure {
  std::size_t offset;
  std::string message;
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr run() {
    Expr e = disjunction();
    skip();
    if (pos_ < text_.size()) throw Failure{pos_, "unexpected '" + std::string(1, text_[pos_]) + "'"};
    return e;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view symbol) {
    skip();
    if (text_.substr(pos_, symbol.size()) != symbol) return false;
    pos_ += symbol.size();
    return true;
  }

  bool eat_word(std::string_view word) {
    skip();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  Expr disjunction() {
    Expr lhs = conjunction();
    while (eat_word("or") || eat("||")) lhs = Expr::binary(Expr::Op::Or, std::move(lhs), conjunction());
    return lhs;
  }

  Expr conjunction() {
    Expr lhs = negation();
    while (eat_word("and") || eat("&&")) lhs = Expr::binary(Expr::Op::And, std::move(lhs), negation());
    return lhs;
  }

  Expr negation() {
    skip();
    if (eat_word("not")) return Expr::unary(Expr::Op::Not, negation());
    if (text_.substr(pos_, 2) != "!=" && eat("!")) return Expr::unary(Expr::Op::Not, negation());
    return comparison();
  }

  Expr comparison() {
    Expr lhs = primary();
    static constexpr std::pair<std::string_view, Expr::Op> ops[] = {
        {"<=", Expr::Op::Le}, {">=", Expr::Op::Ge}, {"==", Expr::Op::Eq},
        {"!=", Expr::Op::Ne}, {"<", Expr::Op::Lt},  {">", Expr::Op::Gt}};
    for (const auto& [symbol, op] : ops) {
      if (eat(symbol)) return Expr::binary(op, std::move(lhs), primary());
    }
    return lhs;
  }

  Expr primary() {
    skip();
    if (pos_ >= text_.size()) throw Failure{pos_, "unexpected end of condition"};
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = disjunction();
      if (!eat(")")) throw Failure{pos_, "expected ')'"};
      return inner;
    }
    if (c == '"') return Expr::literal(string_literal());
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') return Expr::literal(number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      std::string word(text_.substr(start, pos_ - start));
      if (word == "true") return Expr::literal(true);
      if (word == "false") return Expr::literal(false);
      if (word == "and" || word == "or" || word == "not") throw Failure{start, "unexpected '" + word + "'"};
      return Expr::attribute(std::move(word));
    }
    throw Failure{pos_, "unexpected '" + std::string(1, c) + "'"};
  }

  Value number() {
    const std::size_t start = pos_;
    std::string buffer(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(buffer.c_str(), &end);
    if (end == buffer.c_str()) throw Failure{start, "malformed number"};
    pos_ += static_cast<std::size_t>(end - buffer.c_str());
    return v;
  }

  Value string_literal() {
    const std::size_t start = pos_++;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) throw Failure{start, "unterminated string"};
    ++pos_;
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::variant<Expr, ExprParseError> parse_expr(std::string_view text) {
  try {
    return ExprParser(text).run();
  } catch (const Failure& f) {
    return ExprParseError{f.offset, f.message};
  }
}

}  // namespace tmkit
