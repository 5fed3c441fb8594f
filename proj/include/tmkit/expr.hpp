#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tmkit {

/// Scalar attribute value carried by a simulated thing.
using Value = std::variant<double, std::string, bool>;
using Attributes = std::map<std::string, Value>;

std::string to_string(const Value& value);

/// Guard condition over thing attributes: comparisons, and/or/not,
/// parentheses, number/string/boolean literals.
class Expr {
 public:
  enum class Op { Literal, Attribute, Not, And, Or, Lt, Le, Gt, Ge, Eq, Ne };

  static Expr literal(Value v);
  static Expr attribute(std::string name);
  static Expr unary(Op op, Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);

  /// nullopt when a referenced attribute is missing or a comparison mixes
  /// incompatible types.
  std::optional<bool> evaluate(const Attributes& attrs) const;
  /// Missing attributes make the whole condition false.
  bool holds(const Attributes& attrs) const { return evaluate(attrs).value_or(false); }

  std::string to_string() const;

  Op op() const { return op_; }

 private:
  std::optional<Value> value(const Attributes& attrs) const;

  Op op_ = Op::Literal;
  Value literal_;
  std::string name_;
  std::vector<std::shared_ptr<const Expr>> operands_;
};

struct ExprParseError {
  std::size_t offset;  // byte offset into the parsed text
  std::string message;
};

/// Parses a condition such as `speed > 120 and not (ignition == "OFF")`.
/// Accepts `and`/`&&`, `or`/`||`, `not`/`!`.
std::variant<Expr, ExprParseError> parse_expr(std::string_view text);

}  // namespace tmkit
