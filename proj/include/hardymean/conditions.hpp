#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hardymean/function.hpp"
#include "hardymean/quadrature.hpp"

// Weight-condition functionals for the strong type (p,q) inequality in its
// reduced form (weights U, V, weight w = 1):
//
//   muckenhoupt:  sup_tau (int_tau^inf U/x^q)^(1/q) (int_0^tau V^(1-p'))^(1/p')
//   geometric:    sup_x x^(-1/p) (int_0^x U(t) ([G(1/V)](t))^(q/p) dt)^(1/q)
//   A(s):         sup_t tildeV(t)^beta (int_t^inf U tildeV^(q(p-s)/p) x^-q dx)^(1/q)
//                 with tildeV(t) = int_0^t V^(1-p'), and the constant bound
//                 inf_{1<s<p} ((p-1)/(p-s))^(1/p') A(s),
//
// plus the dual-weight constructions and the classical constants.  Suprema
// are estimated by a log-spaced scan with golden-section refinement; a
// boundary-growth heuristic declares divergence, and every report carries
// its scan trace.

namespace hardymean::cond {

struct ExponentPair {
  double p = 2;
  double q = 2;

  ExponentPair(double p_, double q_) : p(p_), q(q_) {
    if (!(p > 0) || !std::isfinite(p) || !(q > 0) || !std::isfinite(q))
      throw std::invalid_argument("exponents must be finite and positive");
  }

  double p_prime() const {
    if (!(p > 1))
      throw std::invalid_argument("p' = p/(p-1) requires p > 1");
    return p / (p - 1);
  }

  void require_strong_regime(const char* who) const {  // 1 < p <= q < inf
    if (!(p > 1 && p <= q))
      throw std::invalid_argument(std::string(who) +
                                  " requires 1 < p <= q < infinity");
  }
  void require_positive_regime(const char* who) const {  // 0 < p <= q < inf
    if (!(p <= q))
      throw std::invalid_argument(std::string(who) +
                                  " requires 0 < p <= q < infinity");
  }
};

// Exponent convention on the outer tildeV(t) factor of A(s):
//   qscaled -> q(s-1)/p (the condition as usually displayed),
//   plain   -> (s-1)/p  (reproduces the sharp classical constant through
//              the bound; the default).
enum class Variant { qscaled, plain };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ScanPoint {
  double param = 0;
  double value = 0;
};

struct ConditionReport {
  bool diverged = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  // Parameter achieving the reported sup (or inf, for the constant bound).
  double extremizer = std::numeric_limits<double>::quiet_NaN();
  std::vector<ScanPoint> scan_trace;
  bool refined = false;
  std::string cause;  // non-empty when diverged
};

// A single evaluable quantity that may turn out infinite.
struct CondValue {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool diverged = false;
  std::string cause;
};

struct ScanOptions {
  double lo = 1e-6;
  double hi = 1e6;
  int points = 200;
  // Decades appended per side when the scan maximum sits on a boundary,
  // before divergence is declared (growth must be monotone throughout).
  int extend_rounds = 2;
};

// Dual weight of the averaging bound: v(t) = w(t) int_t^inf u(x)/W(x) dx
// (with w = 1 this is v(t) = int_t^inf u(x) dx / x).
CondValue dual_weight(const RealFunction& u, const RealFunction& w, double t,
                      quad::Config cfg = {});

// Power-tail dual weight: V(x) = x^lambda int_x^inf U(t) t^-(lambda+1) dt,
// the weight paired with constant e^lambda in the modular bound.
CondValue dual_weight_lambda(const RealFunction& U, double lambda, double x,
                             quad::Config cfg = {});

ConditionReport muckenhoupt_constant(const RealFunction& U,
                                     const RealFunction& V, ExponentPair e,
                                     quad::Config cfg = {},
                                     ScanOptions scan = {});

ConditionReport geometric_condition(const RealFunction& U,
                                    const RealFunction& V, ExponentPair e,
                                    quad::Config cfg = {},
                                    ScanOptions scan = {});

ConditionReport wedestig_as(const RealFunction& U, const RealFunction& V,
                            ExponentPair e, double s,
                            Variant variant = Variant::plain,
                            quad::Config cfg = {}, ScanOptions scan = {});

// inf over s in (1, p) of ((p-1)/(p-s))^(1/p') A(s): scans s on a grid
// (endpoints excluded by a 1e-3 margin), then refines by golden section.
// extremizer is the minimizing s.
ConditionReport constant_bound_wedestig(const RealFunction& U,
                                        const RealFunction& V, ExponentPair e,
                                        Variant variant = Variant::plain,
                                        quad::Config cfg = {},
                                        ScanOptions scan = {},
                                        int s_points = 64);

struct ClassicalConstants {
  std::optional<double> hardy;      // (p/(p-1))^p, for p > 1
  double polya_knopp = 0;           // e
  std::optional<double> exp_lambda; // e^lambda, when lambda given
};

ClassicalConstants classical_constants(double p,
                                       std::optional<double> lambda = {});

}  // namespace hardymean::cond
