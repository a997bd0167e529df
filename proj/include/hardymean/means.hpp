#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardymean/funcdsl.hpp"

// Mean functions g for the quasi-arithmetic mean operator: a strictly
// monotone continuous g together with its inverse (closed form or numeric
// bisection), convexity/monotonicity classification, and the Levinson-class
// membership test phi * phi'' >= (1 - 1/r) * (phi')^2.
//
// All sampled checks run on a log-spaced probe grid over
// [1e-3, 1e3] intersected with the declared domain; verdicts are reported
// for that window, not for the whole domain.

namespace hardymean::means {

struct Interval {
  double lo = 0;
  double hi = std::numeric_limits<double>::infinity();
};

enum class Direction { increasing, decreasing };
enum class Shape { convex, concave, neither };

// Which way Jensen's inequality orders the weighted mean against the
// weighted average: H <= M^g for convex increasing / concave decreasing g,
// M^g <= H for convex decreasing / concave increasing g.
enum class JensenCase { H_below_Mg, Mg_below_H, none };

struct Classification {
  Shape shape = Shape::neither;
  Direction direction = Direction::increasing;
  JensenCase jensen_case = JensenCase::none;
};

const char* to_string(Direction d);
const char* to_string(Shape s);
const char* to_string(JensenCase j);

class MeanFunctionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MeanFunction {
 public:
  // Validates strict monotonicity on a 64-point probe grid and, when an
  // inverse is supplied, the round trip g_inverse(g(x)) = x to 1e-6
  // relative.  Omitting inverse_source enables numeric inversion.
  static MeanFunction make(std::string_view g_source,
                           std::optional<std::string_view> inverse_source,
                           Interval domain = {});
  static MeanFunction identity();

  double g(double x) const { return g_.eval(x); }
  double operator()(double x) const { return g_.eval(x); }

  // Closed-form inverse when supplied, otherwise safeguarded bisection.
  double inverse(double y) const;

  Direction direction() const { return direction_; }
  const Interval& domain() const { return domain_; }
  const dsl::FunctionExpr& expr() const { return g_; }
  const std::optional<dsl::FunctionExpr>& inverse_expr() const {
    return g_inverse_;
  }
  const std::vector<double>& probe_grid() const { return grid_; }
  bool is_identity() const;

 private:
  MeanFunction(dsl::FunctionExpr g, std::optional<dsl::FunctionExpr> ginv,
               Interval domain);

  dsl::FunctionExpr g_;
  std::optional<dsl::FunctionExpr> g_inverse_;
  Interval domain_;
  Direction direction_ = Direction::increasing;
  std::vector<double> grid_;
};

// Monotone bisection for g(x) = y to relative tolerance 1e-12 (at most 200
// iterations), bracketing inside the domain.  Throws MeanFunctionError when
// y falls outside the attainable image.
double invert_numeric(const MeanFunction& m, double y);

// Direction from sampled differences, shape from second-derivative samples
// with a dead band; affine counts as convex, mixed signs give `neither`.
Classification classify(const MeanFunction& m, int grid_size = 64);

struct PhiMembership {
  bool member = false;
  // First grid point violating the inequality, when not a member.
  std::optional<double> witness;
};

// Levinson class Phi_r on the probed window: phi > 0 and
// phi(x) phi''(x) >= (1 - 1/r) phi'(x)^2 - tol * scale at every grid point,
// with scale = max(1, phi^2, phi'^2).  r = +infinity tests the class Phi
// (coefficient 1), which coincides with log-convexity.
PhiMembership phi_class_member(const dsl::FunctionExpr& phi, double r,
                               Interval domain = {}, int grid_size = 64,
                               double tol = 1e-6);

// Log-spaced (linear fallback for non-positive windows) probe grid used by
// the sampled checks; points where eval fails are dropped.
std::vector<double> probe_points(const dsl::FunctionExpr& f, Interval domain,
                                 int grid_size);

}  // namespace hardymean::means
