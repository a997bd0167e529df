#include "hardymean/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hardymean/funcdsl.hpp"

namespace hardymean::quad {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;
// Truncation of the transformed axis: at |w| = 6 the node distance from the
// endpoint is ~1e-275 of the interval, the practical limit of doubles.
constexpr double kWMax = 6.0;
// Level k halves the step; 11 levels ~ 50k nodes, beyond that the rule has
// either converged or never will in double precision.
constexpr int kLevelCap = 11;
// Nodes closer to an endpoint than this fraction of the interval belong to
// the endpoint-clustered region: blowups there mean a singular endpoint,
// blowups further in mean a broken integrand.
constexpr double kEndpointFrac = 0.01;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Accum {
  double sum = 0;
  double comp = 0;  // Kahan compensation
  void add(double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

class TanhSinhEngine {
 public:
  TanhSinhEngine(const Integrand& f, double a, double b, const Config& cfg)
      : f_(f), a_(a), b_(b), r_((b - a) / 2), cfg_(cfg) {}

  Result run() {
    const int levels = std::min(cfg_.max_depth, kLevelCap);
    double total = 0;
    double prev_total = kNaN;
    double diff = kInf;
    double h = 1.0;

    Accum acc;
    // Level 0: trapezoid at integer w.
    acc.add(term_at(0.0));
    for (int j = 1; j <= static_cast<int>(kWMax); ++j) {
      acc.add(term_at(j));
      acc.add(term_at(-j));
      if (blown_) return blowup_result();
    }
    total = acc.sum * h;

    int level = 1;
    for (; level <= levels; ++level) {
      h /= 2;
      Accum lvl;
      const int jmax = static_cast<int>(kWMax / h);
      for (int j = 1; j <= jmax; j += 2) {
        lvl.add(term_at(j * h));
        lvl.add(term_at(-j * h));
        if (blown_) return blowup_result();
      }
      prev_total = total;
      total = total / 2 + lvl.sum * h;

      if (!std::isfinite(total)) return blowup_result_from_total(total);
      if (std::abs(total) > cfg_.divergence_threshold) {
        Result r;
        r.status = Status::diverged;
        r.value = total > 0 ? kInf : -kInf;
        r.err_estimate = kInf;
        return r;
      }

      diff = std::abs(total - prev_total);
      if (level >= 2) {
        double tol = tolerance(total);
        if (diff <= 0.5 * tol) {
          TailDiag diag = tail_diagnostic(h);
          if (diag.diverging) return divergence_from_tail(diag);
          if (diag.tail_err <= tol)
            return finish(Status::converged, total, std::max(diff, diag.tail_err));
          // Boundary terms still significant: keep refining.
        }
      }
    }

    TailDiag diag = tail_diagnostic(h);
    if (diag.diverging) return divergence_from_tail(diag);
    return finish(Status::max_depth_reached, total,
                  std::max(diff, diag.tail_err));
  }

 private:
  struct TailDiag {
    bool diverging = false;
    double sign = 0;
    double tail_err = 0;
  };

  double tolerance(double value) const {
    return std::max(cfg_.abs_tol, cfg_.rel_tol * std::abs(value));
  }

  Result finish(Status s, double value, double err) const {
    Result r;
    r.status = s;
    r.value = value;
    // Never report an exactly-zero error bar for a nonzero value.
    r.err_estimate =
        std::max(err, 4 * std::numeric_limits<double>::epsilon() *
                          std::abs(value));
    return r;
  }

  Result blowup_result() const {
    Result r;
    r.status = Status::diverged;
    r.value = blow_sign_ > 0 ? kInf : (blow_sign_ < 0 ? -kInf : kNaN);
    r.err_estimate = kInf;
    return r;
  }

  Result blowup_result_from_total(double total) const {
    Result r;
    r.status = Status::diverged;
    r.value = std::isnan(total) ? kNaN : (total > 0 ? kInf : -kInf);
    r.err_estimate = kInf;
    return r;
  }

  Result divergence_from_tail(const TailDiag& diag) const {
    Result r;
    r.status = Status::diverged;
    r.value = diag.sign > 0 ? kInf : (diag.sign < 0 ? -kInf : kNaN);
    r.err_estimate = kInf;
    return r;
  }

  // Weighted integrand at transformed coordinate w.  Returns 0 for nodes
  // collapsed onto an endpoint and for soft failures in the endpoint region;
  // sets blown_ when the endpoint region produces non-finite values.
  double term_at(double w) {
    const double theta = kHalfPi * std::sinh(w);
    const double at = std::abs(theta);
    double dist;   // distance from the near endpoint
    double dtdw;   // substitution weight
    if (at < 300) {
      const double ch = std::cosh(theta);
      dist = 2 * r_ / (1 + std::exp(2 * at));
      dtdw = r_ * kHalfPi * std::cosh(w) / (ch * ch);
    } else {
      const double e = std::exp(-2 * at);
      dist = 2 * r_ * e;
      dtdw = r_ * kHalfPi * std::cosh(w) * 4 * e;
    }
    if (dtdw == 0 || dist == 0) return 0;

    double t = (w >= 0) ? b_ - dist : a_ + dist;
    if (t <= a_ || t >= b_) return 0;  // collapsed by rounding

    const bool endpoint_region = dist < kEndpointFrac * 2 * r_;
    double fv;
    try {
      fv = f_(t);
    } catch (const dsl::EvalError&) {
      if (endpoint_region) return 0;
      throw InteriorError("integrand raised a domain error at an interior point",
                          t);
    }
    if (!std::isfinite(fv)) {
      if (endpoint_region) {
        blown_ = true;
        blow_sign_ = std::isnan(fv) ? 0.0 : (fv > 0 ? 1.0 : -1.0);
        return 0;
      }
      throw InteriorError("integrand is non-finite at an interior point", t);
    }
    if (fv == 0) return 0;
    double term = fv * dtdw;
    if (!std::isfinite(term)) {
      if (endpoint_region) {
        blown_ = true;
        blow_sign_ = fv > 0 ? 1.0 : -1.0;
        return 0;
      }
      throw InteriorError("weighted integrand overflowed at an interior point",
                          t);
    }
    return term;
  }

  // Samples the weighted integrand near the truncation boundary on both
  // sides.  A divergent endpoint of power type t^a, a <= -1, makes the
  // weighted terms grow at least like cosh(w) toward the boundary, while any
  // integrable singularity decays relative to cosh(w); normalizing by
  // cosh(w) separates the two.  Decaying but non-negligible terms feed the
  // error estimate (axis truncation).
  TailDiag tail_diagnostic(double h) {
    static constexpr double kProbe[] = {4.0, 4.5, 5.0, 5.5, 6.0};
    static constexpr int kN = 5;
    TailDiag diag;
    for (int side = -1; side <= 1; side += 2) {
      double raw[kN];
      double norm[kN];
      double last_signed = 0;
      for (int i = 0; i < kN; ++i) {
        double term = term_at(side * kProbe[i]);
        if (blown_) {
          diag.diverging = true;
          diag.sign = blow_sign_;
          return diag;
        }
        raw[i] = std::abs(term);
        norm[i] = raw[i] / std::cosh(kProbe[i]);
        last_signed = term;
      }
      if (*std::max_element(raw, raw + kN) == 0) continue;
      bool harmonic_or_worse = norm[kN - 1] >= 0.995 * norm[0] &&
                               norm[kN - 1] > 0;
      if (harmonic_or_worse && raw[kN - 1] * h > cfg_.abs_tol) {
        diag.diverging = true;
        diag.sign = last_signed > 0 ? 1.0 : -1.0;
        return diag;
      }
      // Truncation estimate: last term divided by its local decay rate.
      double rate = 1.0;
      if (raw[kN - 2] > 0 && raw[kN - 1] > 0)
        rate = std::max(1.0, std::log(raw[kN - 2] / raw[kN - 1]) / 0.5);
      diag.tail_err += raw[kN - 1] / rate + raw[kN - 1] * h;
    }
    return diag;
  }

  const Integrand& f_;
  double a_, b_, r_;
  Config cfg_;
  bool blown_ = false;
  double blow_sign_ = 0;
};

std::vector<double> splits_within(std::span<const double> splits, double a,
                                  double b) {
  std::vector<double> out;
  for (double s : splits)
    if (s > a && s < b) out.push_back(s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::diverged: return "diverged";
    case Status::max_depth_reached: return "max_depth_reached";
  }
  return "unknown";
}

Result combine(const Result& r1, const Result& r2) {
  Result r;
  r.value = r1.value + r2.value;
  r.err_estimate = r1.err_estimate + r2.err_estimate;
  auto rank = [](Status s) {
    return s == Status::diverged ? 2 : s == Status::max_depth_reached ? 1 : 0;
  };
  r.status = rank(r1.status) >= rank(r2.status) ? r1.status : r2.status;
  return r;
}

Result integrate_finite(const Integrand& f, double a, double b,
                        const Config& cfg) {
  if (!(a < b)) throw std::invalid_argument("integrate_finite requires a < b");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("integrate_finite requires finite bounds");
  TanhSinhEngine engine(f, a, b, cfg);
  return engine.run();
}

Result integrate_upper_infinite(const Integrand& f, double a,
                                const Config& cfg) {
  if (!(a > 0) || !std::isfinite(a))
    throw std::invalid_argument(
        "integrate_upper_infinite requires a finite lower bound a > 0");
  // t = a/u maps u in (0,1) onto (a, inf) with the deep tail at u -> 0,
  // where doubles retain full dynamic range (u -> 1 would collapse against
  // the representable gap at 1).  The Jacobian a/u^2 is applied in two
  // factors to avoid spurious overflow when f decays.
  Integrand mapped = [&f, a](double u) {
    const double t = a / u;
    if (!std::isfinite(t)) return 0.0;  // beyond representable tail
    const double fv = f(t);
    if (fv == 0) return 0.0;
    return (fv / u) * (a / u);
  };
  return integrate_finite(mapped, 0.0, 1.0, cfg);
}

Result integrate_finite_split(const Integrand& f, double a, double b,
                              std::span<const double> splits,
                              const Config& cfg) {
  std::vector<double> cuts = splits_within(splits, a, b);
  Result total;
  double lo = a;
  for (double c : cuts) {
    total = combine(total, integrate_finite(f, lo, c, cfg));
    if (total.diverged()) return total;
    lo = c;
  }
  return combine(total, integrate_finite(f, lo, b, cfg));
}

Result integrate_to_infinity(const Integrand& f, double a,
                             std::span<const double> splits,
                             const Config& cfg) {
  std::vector<double> cuts;
  for (double s : splits)
    if (s > a && std::isfinite(s)) cuts.push_back(s);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Result total;
  double lo = a;
  for (double c : cuts) {
    total = combine(total, integrate_finite(f, lo, c, cfg));
    if (total.diverged()) return total;
    lo = c;
  }
  return combine(total, integrate_upper_infinite(f, lo, cfg));
}

// ---------------------------------------------------------------------------
// CumulativeIntegral

CumulativeIntegral::CumulativeIntegral(Integrand f, Config cfg,
                                       std::vector<double> splits)
    : f_(std::move(f)), cfg_(cfg), splits_(std::move(splits)) {
  std::sort(splits_.begin(), splits_.end());
  splits_.erase(std::unique(splits_.begin(), splits_.end()), splits_.end());
  anchors_.emplace(0.0, ValueErr{0.0, 0.0});
}

ValueErr CumulativeIntegral::value_err(double x) const {
  if (!(x >= 0) || !std::isfinite(x))
    throw std::invalid_argument("cumulative integral requires finite x >= 0");
  std::lock_guard<std::mutex> lock(mu_);
  if (poisoned_) throw DivergentIntegral(poison_);
  auto it = anchors_.upper_bound(x);
  --it;  // greatest anchor <= x; the {0,...} seed guarantees existence
  double lo = it->first;
  ValueErr acc = it->second;
  if (lo == x) return acc;

  std::vector<double> cuts = splits_within(splits_, lo, x);
  cuts.push_back(x);
  for (double c : cuts) {
    Result piece = integrate_finite(f_, lo, c, cfg_);
    if (piece.diverged()) {
      poisoned_ = true;
      poison_ = piece;
      throw DivergentIntegral(piece);
    }
    acc.value += piece.value;
    acc.err += piece.err_estimate;
    anchors_[c] = acc;
    lo = c;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// TailIntegral

TailIntegral::TailIntegral(Integrand f, Config cfg, std::vector<double> splits)
    : f_(std::move(f)), cfg_(cfg), splits_(std::move(splits)) {
  std::sort(splits_.begin(), splits_.end());
  splits_.erase(std::unique(splits_.begin(), splits_.end()), splits_.end());
}

ValueErr TailIntegral::value_err(double t) const {
  if (!(t > 0) || !std::isfinite(t))
    throw std::invalid_argument("tail integral requires finite t > 0");
  std::lock_guard<std::mutex> lock(mu_);
  if (poisoned_) throw DivergentIntegral(poison_);
  auto it = anchors_.lower_bound(t);
  if (it != anchors_.end()) {
    double hi = it->first;
    ValueErr acc = it->second;
    if (hi == t) return acc;
    Result piece = integrate_finite_split(f_, t, hi, splits_, cfg_);
    if (piece.diverged()) {
      poisoned_ = true;
      poison_ = piece;
      throw DivergentIntegral(piece);
    }
    acc.value += piece.value;
    acc.err += piece.err_estimate;
    anchors_[t] = acc;
    return acc;
  }
  Result whole = integrate_to_infinity(f_, t, splits_, cfg_);
  if (whole.diverged()) {
    poisoned_ = true;
    poison_ = whole;
    throw DivergentIntegral(whole);
  }
  ValueErr acc{whole.value, whole.err_estimate};
  anchors_[t] = acc;
  return acc;
}

}  // namespace hardymean::quad
