#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Small expression language for real functions of one positive real
// variable `x`.  Grammar (EBNF):
//
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | factor
//   factor := atom ("^" factor)?            -- "^" right-associative
//   atom   := number | "x" | func "(" args ")" | "(" expr ")"
//
// Functions: exp, ln, sqrt, abs, indicator(a,b), piecewise(...).
// "^" binds tighter than unary minus, so negative exponents need
// parentheses: "x^(-0.5)" parses, "x^-0.5" is a syntax error.
//
// indicator(a,b) is 1 on the open interval a < x < b and 0 elsewhere;
// a and b must be constant expressions.  piecewise takes clauses
// (in(a,b), expr) matched first-to-last against a <= x < b, followed by
// a mandatory default expression:
//
//   piecewise((in(0,0.5), 1), (in(0.5,1), 2), 0)
//
// Evaluation either yields a finite double or throws EvalError; there is
// no silent NaN path.

namespace hardymean::dsl {

enum class EvalErrorKind { domain, range };

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what, double at)
      : std::runtime_error(what), kind_(kind), at_(at) {}
  EvalErrorKind kind() const noexcept { return kind_; }
  double at() const noexcept { return at_; }

 private:
  EvalErrorKind kind_;
  double at_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class FunctionExpr {
 public:
  struct Node;

  static FunctionExpr parse(std::string_view source);
  static FunctionExpr constant(double value);

  double eval(double x) const;
  double operator()(double x) const { return eval(x); }

  // Canonical form: parse(str()) yields a structurally identical tree and
  // numbers survive bit-exactly (shortest round-trip formatting).
  std::string str() const;

  // Interval bounds appearing in indicator/piecewise nodes, sorted and
  // deduplicated.  Integrands built from this expression may jump there.
  std::vector<double> breakpoints() const;

  bool is_constant() const;

 private:
  explicit FunctionExpr(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;
};

// Central finite differences with step h = step * max(|x|, 1).
// order 1 uses (f(x+h) - f(x-h)) / 2h, order 2 uses the 3-point stencil;
// both are O(h^2).  Evaluation errors at stencil points propagate.
double derivative(const FunctionExpr& f, double x, int order = 1,
                  double step = 1e-5);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace hardymean::dsl
