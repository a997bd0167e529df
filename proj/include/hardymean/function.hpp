#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hardymean/funcdsl.hpp"

namespace hardymean {

// A real function of one positive real variable: either a parsed DSL
// expression or an arbitrary computed callable (transformed weights, dual
// weights, ...).  Carries the points where the function may jump so that
// integrators can split there, plus a printable label for reports.
class RealFunction {
 public:
  RealFunction(dsl::FunctionExpr expr)  // NOLINT: implicit by design
      : fn_([expr](double x) { return expr.eval(x); }),
        breakpoints_(expr.breakpoints()),
        label_(expr.str()),
        expr_(std::move(expr)) {}

  RealFunction(std::function<double(double)> fn,
               std::vector<double> breakpoints = {},
               std::string label = "<computed>")
      : fn_(std::move(fn)),
        breakpoints_(std::move(breakpoints)),
        label_(std::move(label)) {}

  static RealFunction parse(std::string_view source) {
    return RealFunction(dsl::FunctionExpr::parse(source));
  }
  static RealFunction constant(double c) {
    return RealFunction(dsl::FunctionExpr::constant(c));
  }

  double operator()(double x) const { return fn_(x); }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::string& label() const { return label_; }
  const std::optional<dsl::FunctionExpr>& expr() const { return expr_; }

  // True when this is a parsed constant-1 expression (the default weight).
  bool is_constant_one() const {
    return expr_ && expr_->is_constant() && expr_->eval(1.0) == 1.0;
  }

 private:
  std::function<double(double)> fn_;
  std::vector<double> breakpoints_;
  std::string label_;
  std::optional<dsl::FunctionExpr> expr_;
};

inline std::vector<double> merge_breakpoints(
    std::initializer_list<const RealFunction*> fns) {
  std::vector<double> out;
  for (const RealFunction* f : fns)
    out.insert(out.end(), f->breakpoints().begin(), f->breakpoints().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace hardymean
