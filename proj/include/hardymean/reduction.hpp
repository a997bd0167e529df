#pragma once

#include <memory>
#include <vector>

#include "hardymean/function.hpp"
#include "hardymean/means.hpp"
#include "hardymean/quadrature.hpp"

// Reduction of the weighted mean operator to its non-weighted form: with
// W(x) = int_0^x w and h(y) = f(W^{-1}(y)),
//
//     M^g_w f (x) = M^g h (W(x)),
//
// so the weighted inequality with weights (u, v) is equivalent to the
// non-weighted one with U(x) = u(W^{-1}(x)) / w(W^{-1}(x)) and V likewise
// (W' = w).  Requires W(+inf) = +inf, which is checked heuristically by
// geometric probe extension.

namespace hardymean::reduction {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReductionContext {
 public:
  // Validates w > 0, W strictly increasing on a probe grid, and the
  // W(+inf) = +inf hypothesis (probes up to 1e8; pass assume_w_unbounded to
  // skip that heuristic).
  ReductionContext(RealFunction w, RealFunction u, RealFunction v, double p,
                   double q, quad::Config cfg = {},
                   bool assume_w_unbounded = false);

  // W(x), cached on a monotone anchor grid.
  double big_w(double x) const;

  // W^{-1}(y) with |W(x) - y| <= 1e-10 * max(1, y).
  double invert_w(double y) const;

  // Transformed weights U, V and inputs h = f o W^{-1}, as evaluable
  // functions carrying mapped breakpoints.
  RealFunction weight_u_transformed() const;
  RealFunction weight_v_transformed() const;
  RealFunction transform_input(const RealFunction& f) const;

  const RealFunction& w() const { return w_; }
  const RealFunction& u() const { return u_; }
  const RealFunction& v() const { return v_; }
  double p() const { return p_; }
  double q() const { return q_; }
  const quad::Config& cfg() const { return cfg_; }

 private:
  RealFunction transform_weight(const RealFunction& orig) const;

  RealFunction w_, u_, v_;
  double p_, q_;
  quad::Config cfg_;
  std::shared_ptr<quad::CumulativeIntegral> w_cum_;
};

struct EquivalenceReport {
  // max over the grid of |M^g_w f (x) - M^g h (W(x))| / max(1, |lhs|).
  double max_identity_error = 0;
  std::vector<double> identity_grid;
  // Ratios of the weighted inequality (f, u, v, w) and the reduced one
  // (h, U, V, 1), with first-order error bars; they must agree within
  // 2x the combined bars.
  double ratio_weighted = 0;
  double ratio_reduced = 0;
  double ratio_weighted_err = 0;
  double ratio_reduced_err = 0;
  bool ratios_agree = false;
};

// Certifies the reduction on a concrete setting: evaluates the pointwise
// identity on a log grid in (0, cutoff) and compares the two inequality
// ratios with f truncated to (0, cutoff).
EquivalenceReport verify_reduction(const ReductionContext& ctx,
                                   const means::MeanFunction& g,
                                   const RealFunction& f, double cutoff,
                                   int grid_points = 10);

}  // namespace hardymean::reduction
