#ifndef WICKLAB_EXPR_HPP
#define WICKLAB_EXPR_HPP

// Real-valued expressions over x (arity 1) or x1..xk.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' integer)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Functions: sin cos exp sqrt abs. Constants: pi. Whitespace is ignored.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace wicklab {

enum class ExprOp { number, variable, add, sub, mul, div, pow, neg, call };
enum class ExprFunc { sin, cos, exp, sqrt, abs };

struct ExprNode {
  ExprOp op = ExprOp::number;
  double value = 0.0;        // number
  unsigned index = 0;        // variable (1-based) or pow exponent
  ExprFunc func = ExprFunc::sin;
  std::vector<ExprNode> args;

  bool operator==(const ExprNode&) const = default;
};

namespace detail {

inline constexpr std::array<std::pair<std::string_view, ExprFunc>, 5> kFunctions{{
    {"sin", ExprFunc::sin},
    {"cos", ExprFunc::cos},
    {"exp", ExprFunc::exp},
    {"sqrt", ExprFunc::sqrt},
    {"abs", ExprFunc::abs},
}};

inline std::string_view func_name(ExprFunc f) {
  for (const auto& [name, fn] : kFunctions)
    if (fn == f) return name;
  return "?";
}

inline double ipow(double base, unsigned e) {
  double r = 1.0;
  while (e) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return r;
}

inline double eval_node(const ExprNode& n, std::span<const double> x) {
  switch (n.op) {
    case ExprOp::number: return n.value;
    case ExprOp::variable: return x[n.index - 1];
    case ExprOp::add: return eval_node(n.args[0], x) + eval_node(n.args[1], x);
    case ExprOp::sub: return eval_node(n.args[0], x) - eval_node(n.args[1], x);
    case ExprOp::mul: return eval_node(n.args[0], x) * eval_node(n.args[1], x);
    case ExprOp::div: return eval_node(n.args[0], x) / eval_node(n.args[1], x);
    case ExprOp::pow: return ipow(eval_node(n.args[0], x), n.index);
    case ExprOp::neg: return -eval_node(n.args[0], x);
    case ExprOp::call: {
      const double a = eval_node(n.args[0], x);
      switch (n.func) {
        case ExprFunc::sin: return std::sin(a);
        case ExprFunc::cos: return std::cos(a);
        case ExprFunc::exp: return std::exp(a);
        case ExprFunc::sqrt: return std::sqrt(a);
        case ExprFunc::abs: return std::fabs(a);
      }
    }
  }
  return std::nan("");
}

class ExprParser {
 public:
  ExprParser(std::string_view src, unsigned arity) : src_(src), arity_(arity) {}

  ExprNode parse() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError(pos_, "empty expression");
    ExprNode root = expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, std::string("unexpected '") + src_[pos_] + "'");
    return root;
  }

 private:
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

  static ExprNode binary(ExprOp op, ExprNode lhs, ExprNode rhs) {
    ExprNode n;
    n.op = op;
    n.args.reserve(2);
    n.args.push_back(std::move(lhs));
    n.args.push_back(std::move(rhs));
    return n;
  }

  ExprNode expr() {
    ExprNode lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = binary(ExprOp::add, std::move(lhs), term());
      else if (accept('-'))
        lhs = binary(ExprOp::sub, std::move(lhs), term());
      else
        return lhs;
    }
  }

  ExprNode term() {
    ExprNode lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = binary(ExprOp::mul, std::move(lhs), factor());
      else if (accept('/'))
        lhs = binary(ExprOp::div, std::move(lhs), factor());
      else
        return lhs;
    }
  }

  ExprNode factor() {
    if (accept('-')) {
      ExprNode n;
      n.op = ExprOp::neg;
      n.args.push_back(factor());
      return n;
    }
    return power();
  }

  ExprNode power() {
    ExprNode base = atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError(start, "exponent must be a nonnegative integer literal");
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
      throw ParseError(start, "exponent must be a nonnegative integer literal");
    unsigned e = 0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, e);
    if (res.ec != std::errc{}) throw ParseError(start, "exponent out of range");
    ExprNode n;
    n.op = ExprOp::pow;
    n.index = e;
    n.args.push_back(std::move(base));
    return n;
  }

  ExprNode atom() {
    skip_ws();
    if (pos_ == src_.size()) throw ParseError(pos_, "unexpected end of expression");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      ExprNode inner = expr();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  ExprNode number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    if (text == ".") throw ParseError(start, "malformed number");
    ExprNode n;
    n.op = ExprOp::number;
    n.value = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(n.value)) throw ParseError(start, "number out of range");
    return n;
  }

  ExprNode identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    for (const auto& [fname, fn] : kFunctions) {
      if (name != fname) continue;
      if (!accept('(')) throw ParseError(pos_, "expected '(' after " + std::string(name));
      ExprNode n;
      n.op = ExprOp::call;
      n.func = fn;
      n.args.push_back(expr());
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return n;
    }
    if (name == "pi") {
      ExprNode n;
      n.value = std::numbers::pi;
      return n;
    }
    if (name == "x" && arity_ == 1) return variable(1);
    if (name.size() > 1 && name[0] == 'x') {
      unsigned idx = 0;
      const auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (res.ec == std::errc{} && res.ptr == name.data() + name.size() && idx >= 1) {
        if (idx > arity_)
          throw ParseError(start, "variable " + std::string(name) + " exceeds arity " +
                                      std::to_string(arity_));
        return variable(idx);
      }
    }
    throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
  }

  static ExprNode variable(unsigned idx) {
    ExprNode n;
    n.op = ExprOp::variable;
    n.index = idx;
    return n;
  }

  std::string_view src_;
  unsigned arity_;
  std::size_t pos_ = 0;
};

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest form that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shortbuf[32];
    std::snprintf(shortbuf, sizeof shortbuf, "%.*g", prec, v);
    if (std::strtod(shortbuf, nullptr) == v) return shortbuf;
  }
  return buf;
}

}  // namespace detail

/// Parsed expression together with its declared arity.
class Expr {
 public:
  Expr(ExprNode root, unsigned arity) : root_(std::move(root)), arity_(arity) {}

  unsigned arity() const noexcept { return arity_; }
  const ExprNode& root() const noexcept { return root_; }

  double operator()(std::span<const double> x) const {
    if (x.size() != arity_)
      throw std::invalid_argument("Expr: expected " + std::to_string(arity_) + " arguments");
    return detail::eval_node(root_, x);
  }
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  bool operator==(const Expr&) const = default;

 private:
  ExprNode root_;
  unsigned arity_;
};

inline Expr parse_expr(std::string_view source, unsigned arity = 1) {
  if (arity == 0) throw std::invalid_argument("parse_expr: arity must be positive");
  return Expr(detail::ExprParser(source, arity).parse(), arity);
}

namespace detail {

inline std::string variable_name(unsigned idx, unsigned arity) {
  return arity == 1 ? std::string("x") : "x" + std::to_string(idx);
}

inline std::string print_node(const ExprNode& n, unsigned arity) {
  switch (n.op) {
    case ExprOp::number: {
      std::string s = format_number(n.value);
      return n.value < 0 ? "(" + s + ")" : s;
    }
    case ExprOp::variable: return variable_name(n.index, arity);
    case ExprOp::add:
    case ExprOp::sub:
    case ExprOp::mul:
    case ExprOp::div: {
      const char* sym = n.op == ExprOp::add   ? " + "
                        : n.op == ExprOp::sub ? " - "
                        : n.op == ExprOp::mul ? " * "
                                              : " / ";
      return "(" + print_node(n.args[0], arity) + sym + print_node(n.args[1], arity) + ")";
    }
    case ExprOp::pow:
      return "(" + print_node(n.args[0], arity) + "^" + std::to_string(n.index) + ")";
    case ExprOp::neg: return "(-" + print_node(n.args[0], arity) + ")";
    case ExprOp::call:
      return std::string(func_name(n.func)) + "(" + print_node(n.args[0], arity) + ")";
  }
  return "?";
}

inline std::string sexpr_node(const ExprNode& n, unsigned arity) {
  auto two = [&](const char* tag) {
    return std::string(tag) + "(" + sexpr_node(n.args[0], arity) + "," +
           sexpr_node(n.args[1], arity) + ")";
  };
  switch (n.op) {
    case ExprOp::number: return format_number(n.value);
    case ExprOp::variable: return variable_name(n.index, arity);
    case ExprOp::add: return two("Add");
    case ExprOp::sub: return two("Sub");
    case ExprOp::mul: return two("Mul");
    case ExprOp::div: return two("Div");
    case ExprOp::pow:
      return "Pow(" + sexpr_node(n.args[0], arity) + "," + std::to_string(n.index) + ")";
    case ExprOp::neg: return "Neg(" + sexpr_node(n.args[0], arity) + ")";
    case ExprOp::call:
      return std::string(func_name(n.func)) + "(" + sexpr_node(n.args[0], arity) + ")";
  }
  return "?";
}

}  // namespace detail

/// Canonical, fully parenthesized text; parse_expr(to_string(e)) == e.
inline std::string to_string(const Expr& e) { return detail::print_node(e.root(), e.arity()); }

/// Tree dump such as "Add(Mul(sin(x1),x2),1)", handy in tests and diagnostics.
inline std::string to_sexpr(const Expr& e) { return detail::sexpr_node(e.root(), e.arity()); }

}  // namespace wicklab

#endif  // WICKLAB_EXPR_HPP
