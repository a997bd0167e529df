#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Adaptive quadrature on finite and upper-infinite intervals.
//
// The engine is a tanh-sinh (double-exponential) rule with level doubling:
// the substitution clusters nodes at both endpoints, so integrable endpoint
// singularities (t^a with a > -1, ln t, ...) converge without special
// casing, and the integrand is never evaluated exactly at an endpoint.
// Upper-infinite integrals map (a, inf) onto (0, 1) via t = a/(1-u) and
// delegate to the finite engine.
//
// Divergence is reported as a status, not an exception: an integral is
// declared diverged when the running value escalates past
// divergence_threshold, when the integrand blows up non-finitely inside the
// endpoint-clustered region, or when the weighted terms keep growing toward
// an endpoint instead of decaying.  Non-finite evaluations away from the
// endpoints raise InteriorError: that is a broken integrand, not an
// improper integral.

namespace hardymean::quad {

struct Config {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 50;
  double divergence_threshold = 1e12;
};

enum class Status { converged, diverged, max_depth_reached };

struct Result {
  double value = 0;
  double err_estimate = 0;
  Status status = Status::converged;

  bool converged() const { return status == Status::converged; }
  bool diverged() const { return status == Status::diverged; }
};

const char* to_string(Status s);

// Integrand evaluated at an interior point came back non-finite (or threw a
// domain error): the integrand itself is broken on this interval.
class InteriorError : public std::runtime_error {
 public:
  InteriorError(const std::string& what, double at)
      : std::runtime_error(what), at_(at) {}
  double at() const noexcept { return at_; }

 private:
  double at_;
};

// Thrown by the cumulative helpers when a piece of the integral diverges.
class DivergentIntegral : public std::runtime_error {
 public:
  explicit DivergentIntegral(Result r,
                             const std::string& what = "integral diverges")
      : std::runtime_error(what), result(r) {}
  Result result;
};

using Integrand = std::function<double(double)>;

Result integrate_finite(const Integrand& f, double a, double b,
                        const Config& cfg = {});
Result integrate_upper_infinite(const Integrand& f, double a,
                                const Config& cfg = {});

// Split-aware wrappers: cut the interval at the given points (sorted; points
// outside the interval are ignored) so that integrands with jumps are fed to
// the engine piece by piece.
Result integrate_finite_split(const Integrand& f, double a, double b,
                              std::span<const double> splits,
                              const Config& cfg = {});
Result integrate_to_infinity(const Integrand& f, double a,
                             std::span<const double> splits,
                             const Config& cfg = {});

// Piecewise sum: values and error estimates add, the worst status wins.
Result combine(const Result& r1, const Result& r2);

struct ValueErr {
  double value = 0;
  double err = 0;
};

// Memoized cumulative integral F(x) = int_0^x f, extended lazily.  Anchors
// grow monotonically (F(x) = F(anchor) + forward piece), pieces never
// straddle a split point, and the memo is safe for concurrent readers.
// A divergent piece poisons the cache: every later call throws
// DivergentIntegral.
class CumulativeIntegral {
 public:
  explicit CumulativeIntegral(Integrand f, Config cfg = {},
                              std::vector<double> splits = {});

  ValueErr value_err(double x) const;
  double value(double x) const { return value_err(x).value; }

 private:
  Integrand f_;
  Config cfg_;
  std::vector<double> splits_;
  mutable std::mutex mu_;
  mutable std::map<double, ValueErr> anchors_;
  mutable bool poisoned_ = false;
  mutable Result poison_;
};

// Memoized tail integral T(t) = int_t^inf f.  The first query pays for the
// infinite tail; queries below an existing anchor only add a short forward
// piece, so descending scans are cheap.
class TailIntegral {
 public:
  explicit TailIntegral(Integrand f, Config cfg = {},
                        std::vector<double> splits = {});

  ValueErr value_err(double t) const;
  double value(double t) const { return value_err(t).value; }

 private:
  Integrand f_;
  Config cfg_;
  std::vector<double> splits_;
  mutable std::mutex mu_;
  mutable std::map<double, ValueErr> anchors_;
  mutable bool poisoned_ = false;
  mutable Result poison_;
};

}  // namespace hardymean::quad
