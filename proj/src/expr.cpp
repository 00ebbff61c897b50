#include "hsurf/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "hsurf/errors.hpp"

namespace hsurf {

namespace {

double powi(double base, long n) {
  // binary exponentiation; exact sign symmetry for integer exponents
  if (n < 0) return 1.0 / powi(base, -n);
  double result = 1.0, p = base;
  while (n > 0) {
    if (n & 1) result *= p;
    p *= p;
    n >>= 1;
  }
  return result;
}

}  // namespace

class ExprParser {
 public:
  ExprParser(std::string_view src, std::span<const std::string> vars, Expression& out)
      : src_(src), vars_(vars), out_(out) {}

  void run() {
    out_.root_ = parse_expression();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ConfigError("expression error: " + msg, 1, static_cast<int>(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  int add(Expression::Node n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  int parse_expression() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = add({Expression::Op::Add, lhs, parse_term()});
      else if (accept('-'))
        lhs = add({Expression::Op::Sub, lhs, parse_term()});
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      if (accept('*'))
        lhs = add({Expression::Op::Mul, lhs, parse_factor()});
      else if (accept('/'))
        lhs = add({Expression::Op::Div, lhs, parse_factor()});
      else
        return lhs;
    }
  }

  // unary minus binds looser than '^', so -x^2 parses as -(x^2)
  int parse_factor() {
    if (accept('-')) return add({Expression::Op::Neg, parse_factor()});
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (accept('^')) return add({Expression::Op::Pow, base, parse_factor()});
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (accept('(')) {
      int e = parse_expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const char* begin = src_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("invalid number");
    pos_ += static_cast<std::size_t>(end - begin);
    Expression::Node n{Expression::Op::Num};
    n.value = v;
    return add(n);
  }

  int parse_ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!accept('(')) fail("expected '(' after " + name);
      int arg = parse_expression();
      if (!accept(')')) fail("expected ')'");
      Expression::Op op = name == "sin"   ? Expression::Op::Sin
                          : name == "cos" ? Expression::Op::Cos
                                          : Expression::Op::Exp;
      return add({op, arg});
    }
    if (name == "pi") {
      Expression::Node n{Expression::Op::Num};
      n.value = M_PI;
      return add(n);
    }
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      if (vars_[k] == name) {
        Expression::Node n{Expression::Op::Var};
        n.var = static_cast<int>(k);
        return add(n);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view src, std::span<const std::string> variables) {
  Expression e;
  e.source_ = std::string(src);
  ExprParser(src, variables, e).run();
  return e;
}

double Expression::eval(std::span<const double> values) const {
  return eval_node(root_, values);
}

double Expression::eval_node(int idx, std::span<const double> values) const {
  const Node& n = nodes_[static_cast<std::size_t>(idx)];
  switch (n.op) {
    case Op::Num:
      return n.value;
    case Op::Var:
      return values[static_cast<std::size_t>(n.var)];
    case Op::Add:
      return eval_node(n.a, values) + eval_node(n.b, values);
    case Op::Sub:
      return eval_node(n.a, values) - eval_node(n.b, values);
    case Op::Mul:
      return eval_node(n.a, values) * eval_node(n.b, values);
    case Op::Div:
      return eval_node(n.a, values) / eval_node(n.b, values);
    case Op::Pow: {
      const double base = eval_node(n.a, values);
      const double e = eval_node(n.b, values);
      if (e == std::rint(e) && std::abs(e) <= 64.0) return powi(base, static_cast<long>(e));
      return std::pow(base, e);
    }
    case Op::Neg:
      return -eval_node(n.a, values);
    case Op::Sin:
      return std::sin(eval_node(n.a, values));
    case Op::Cos:
      return std::cos(eval_node(n.a, values));
    case Op::Exp:
      return std::exp(eval_node(n.a, values));
  }
  return 0;
}

}  // namespace hsurf
