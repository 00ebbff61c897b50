#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hsurf {

/// Small arithmetic expression over named scalar variables, with
/// +, -, *, /, ^ (right-associative), unary minus, sin, cos, exp,
/// numeric literals and the constant pi.
///
/// Integer powers are evaluated by repeated multiplication, so symmetries
/// like (-z)^3 = -(z^3) hold exactly in floating point.
class Expression {
 public:
  Expression() = default;

  /// Parses `src`; identifiers must be functions, pi, or one of `variables`.
  /// Throws ConfigError with 1-based column on failure (line = 1).
  static Expression parse(std::string_view src, std::span<const std::string> variables);

  /// Evaluates with values[k] bound to variables[k] given at parse time.
  double eval(std::span<const double> values) const;

  const std::string& source() const { return source_; }
  bool empty() const { return nodes_.empty(); }

 private:
  enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
  struct Node {
    Op op;
    int a = -1, b = -1;  // child node indices
    double value = 0;    // Num payload
    int var = -1;        // Var payload
  };

  double eval_node(int idx, std::span<const double> values) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string source_;

  friend class ExprParser;
};

}  // namespace hsurf
