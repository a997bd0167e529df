#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardymean/function.hpp"
#include "hardymean/means.hpp"
#include "hardymean/quadrature.hpp"

// Pointwise evaluation of the averaging operators over (0, x):
//
//   hardy:            H_w f (x) = (1/W(x)) int_0^x w f
//   geometric:        G_w f (x) = exp( (1/W(x)) int_0^x w ln f )
//   quasi_arithmetic: M^g_w f (x) = g^inv( (1/W(x)) int_0^x w g(f) )
//
// with W(x) = int_0^x w.  The lower endpoint is exactly 0; the quadrature
// engine absorbs integrable singularities there.  The harmonic mean is the
// quasi-arithmetic member g = 1/x, i.e. 1/H_w(1/f); the operator
// T f(x) = (1/x) int_0^x t/f(t) dt that appears in the literature is a
// different object and is not implemented here.

namespace hardymean::ops {

// An operator evaluation failed because one of its integrals diverges.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, quad::Result r)
      : std::runtime_error(what), result(r) {}
  quad::Result result;
};

struct OperatorInstance {
  enum class Kind { hardy, geometric, quasi_arithmetic };

  // Validates w > 0 on a probe grid; quasi_arithmetic requires g.
  OperatorInstance(Kind kind, std::optional<means::MeanFunction> g,
                   RealFunction w, quad::Config cfg = {});

  static OperatorInstance hardy(RealFunction w = RealFunction::constant(1),
                                quad::Config cfg = {});
  static OperatorInstance geometric(RealFunction w = RealFunction::constant(1),
                                    quad::Config cfg = {});
  static OperatorInstance quasi(means::MeanFunction g,
                                RealFunction w = RealFunction::constant(1),
                                quad::Config cfg = {});

  Kind kind;
  std::optional<means::MeanFunction> g;
  RealFunction w;
  quad::Config cfg;
};

struct Evaluation {
  double value = 0;
  double err = 0;
  // Geometric mean only: the log-integral diverged to -infinity and the
  // operator value collapsed to 0 (f vanishes on part of (0, x)).
  bool log_minus_inf = false;
};

// Operator bound to one input function; cumulative integrals of w, w*f,
// w*g(f) are cached across evaluation points, so grids and nested outer
// integrals pay for each stretch of (0, x) once.  Thread-safe.
class BoundOperator {
 public:
  BoundOperator(OperatorInstance op, RealFunction f);

  Evaluation evaluate(double x) const;
  double operator()(double x) const { return evaluate(x).value; }

  double big_w(double x) const;  // W(x)
  const OperatorInstance& instance() const { return op_; }
  const RealFunction& input() const { return f_; }

 private:
  Evaluation eval_hardy(double x) const;
  Evaluation eval_geometric(double x) const;
  Evaluation eval_quasi(double x) const;

  OperatorInstance op_;
  RealFunction f_;
  std::shared_ptr<quad::CumulativeIntegral> w_cum_;
  std::shared_ptr<quad::CumulativeIntegral> num_cum_;  // int w * phi(f)
  // First point after which f is identically zero on a whole piece
  // (geometric mean: ln f = -inf beyond it); +inf when f stays positive.
  double zero_from_;
};

// One-shot forms of the spec operations (construct a transient
// BoundOperator; use BoundOperator directly for grids).
double hardy_avg(const OperatorInstance& op, const RealFunction& f, double x);
double geometric_mean_op(const OperatorInstance& op, const RealFunction& f,
                         double x, bool* log_minus_inf = nullptr);
double quasi_mean(const OperatorInstance& op, const RealFunction& f, double x);

struct OrderingRow {
  double x = 0;
  double hardy = 0;
  double quasi = 0;
  double tolerance = 0;
  bool ok = false;
};

struct OrderingReport {
  means::JensenCase predicted = means::JensenCase::none;
  std::vector<OrderingRow> rows;
  int violations = 0;
};

// Checks the Jensen ordering of H_w f against M^g_w f predicted by
// classify(g) at every grid point, within combined quadrature error bars.
// Refuses (invalid_argument) when the classification is indefinite.
OrderingReport jensen_order_check(const OperatorInstance& op,
                                  const RealFunction& f,
                                  std::span<const double> grid);

}  // namespace hardymean::ops
