#include "hardymean/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardymean::ops {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_weight(const RealFunction& w) {
  int usable = 0;
  for (int i = 0; i < 32; ++i) {
    double t = 1e-3 * std::pow(1e6, i / 31.0);
    double v;
    try {
      v = w(t);
    } catch (const dsl::EvalError&) {
      continue;
    }
    ++usable;
    if (!(v > 0))
      throw std::invalid_argument("weight w must be positive on (0, inf); "
                                  "w(" + dsl::format_double(t) + ") = " +
                                  dsl::format_double(v));
  }
  if (usable == 0)
    throw std::invalid_argument(
        "weight w is nowhere evaluable on the probe window");
}

// Start of the first interval on which f vanishes identically (probed at
// three interior points per breakpoint piece); +inf when none.  DSL zero
// sets are unions of breakpoint pieces, which is what the geometric mean
// needs: ln f integrates to -inf past this point.
double find_zero_from(const RealFunction& f) {
  std::vector<std::pair<double, double>> pieces;
  double prev = 0;
  for (double e : f.breakpoints()) {
    if (e > prev) {
      pieces.emplace_back(prev, e);
      prev = e;
    }
  }
  pieces.emplace_back(prev, prev * 2 + 10);
  for (auto [lo, hi] : pieces) {
    bool all_zero = true;
    for (double s : {0.25, 0.5, 0.75}) {
      double t = lo + s * (hi - lo);
      double v;
      try {
        v = f(t);
      } catch (const dsl::EvalError&) {
        all_zero = false;
        break;
      }
      if (v != 0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) return lo;
  }
  return kInf;
}

}  // namespace

OperatorInstance::OperatorInstance(Kind kind_,
                                   std::optional<means::MeanFunction> g_,
                                   RealFunction w_, quad::Config cfg_)
    : kind(kind_), g(std::move(g_)), w(std::move(w_)), cfg(cfg_) {
  if (kind == Kind::quasi_arithmetic && !g)
    throw std::invalid_argument(
        "quasi-arithmetic operator requires a mean function g");
  validate_weight(w);
}

OperatorInstance OperatorInstance::hardy(RealFunction w, quad::Config cfg) {
  return OperatorInstance(Kind::hardy, std::nullopt, std::move(w), cfg);
}

OperatorInstance OperatorInstance::geometric(RealFunction w,
                                             quad::Config cfg) {
  return OperatorInstance(Kind::geometric, std::nullopt, std::move(w), cfg);
}

OperatorInstance OperatorInstance::quasi(means::MeanFunction g, RealFunction w,
                                         quad::Config cfg) {
  return OperatorInstance(Kind::quasi_arithmetic, std::move(g), std::move(w),
                          cfg);
}

BoundOperator::BoundOperator(OperatorInstance op, RealFunction f)
    : op_(std::move(op)), f_(std::move(f)), zero_from_(kInf) {
  const RealFunction& w = op_.w;
  const RealFunction& f2 = f_;
  w_cum_ = std::make_shared<quad::CumulativeIntegral>(
      [w](double t) { return w(t); }, op_.cfg, w.breakpoints());

  std::vector<double> splits = merge_breakpoints({&op_.w, &f_});
  switch (op_.kind) {
    case OperatorInstance::Kind::hardy:
      num_cum_ = std::make_shared<quad::CumulativeIntegral>(
          [w, f2](double t) { return w(t) * f2(t); }, op_.cfg, splits);
      break;
    case OperatorInstance::Kind::geometric: {
      zero_from_ = find_zero_from(f_);
      num_cum_ = std::make_shared<quad::CumulativeIntegral>(
          [w, f2](double t) {
            double v = f2(t);
            if (v <= 0)
              throw dsl::EvalError(dsl::EvalErrorKind::domain,
                                   "ln of a non-positive input value", t);
            return w(t) * std::log(v);
          },
          op_.cfg, splits);
      break;
    }
    case OperatorInstance::Kind::quasi_arithmetic: {
      const means::MeanFunction& g = *op_.g;
      num_cum_ = std::make_shared<quad::CumulativeIntegral>(
          [w, f2, g](double t) { return w(t) * g.g(f2(t)); }, op_.cfg, splits);
      break;
    }
  }
}

double BoundOperator::big_w(double x) const {
  try {
    return w_cum_->value(x);
  } catch (const quad::DivergentIntegral& e) {
    throw DivergenceError("cumulative weight W diverges at finite x "
                          "(w is not locally integrable)",
                          e.result);
  }
}

Evaluation BoundOperator::evaluate(double x) const {
  if (!(x > 0) || !std::isfinite(x))
    throw std::invalid_argument("operators evaluate at finite x > 0");
  switch (op_.kind) {
    case OperatorInstance::Kind::hardy:
      return eval_hardy(x);
    case OperatorInstance::Kind::geometric:
      return eval_geometric(x);
    case OperatorInstance::Kind::quasi_arithmetic:
      break;
  }
  return eval_quasi(x);
}

Evaluation BoundOperator::eval_hardy(double x) const {
  double W = big_w(x);
  if (!(W > 0))
    throw DivergenceError("W(x) is not positive", quad::Result{});
  quad::ValueErr n;
  try {
    n = num_cum_->value_err(x);
  } catch (const quad::DivergentIntegral& e) {
    throw DivergenceError("int_0^x w f diverges", e.result);
  }
  Evaluation out;
  out.value = n.value / W;
  out.err = n.err / W;
  return out;
}

Evaluation BoundOperator::eval_geometric(double x) const {
  Evaluation out;
  if (x >= zero_from_) {
    out.value = 0;
    out.log_minus_inf = true;
    return out;
  }
  double W = big_w(x);
  quad::ValueErr L;
  try {
    L = num_cum_->value_err(x);
  } catch (const quad::DivergentIntegral& e) {
    if (e.result.value < 0) {
      out.value = 0;
      out.log_minus_inf = true;
      return out;
    }
    throw DivergenceError("int_0^x w ln f diverges to +infinity", e.result);
  }
  double mean_log = L.value / W;
  double v = std::exp(mean_log);
  if (!std::isfinite(v))
    throw DivergenceError("geometric mean overflowed", quad::Result{});
  out.value = v;
  out.err = v * L.err / W;
  return out;
}

Evaluation BoundOperator::eval_quasi(double x) const {
  const means::MeanFunction& g = *op_.g;
  if (g.is_identity()) return eval_hardy(x);
  double W = big_w(x);
  quad::ValueErr n;
  try {
    n = num_cum_->value_err(x);
  } catch (const quad::DivergentIntegral& e) {
    throw DivergenceError("int_0^x w g(f) diverges", e.result);
  }
  double m = n.value / W;
  double m_err = n.err / W;
  double value = g.inverse(m);  // range error when m leaves the image of g
  Evaluation out;
  out.value = value;
  double slope;
  try {
    slope = std::abs(dsl::derivative(g.expr(), value, 1));
  } catch (const dsl::EvalError&) {
    slope = 0;
  }
  out.err = (slope > 1e-12) ? m_err / slope : m_err * 1e12;
  return out;
}

double hardy_avg(const OperatorInstance& op, const RealFunction& f, double x) {
  OperatorInstance h = op;
  h.kind = OperatorInstance::Kind::hardy;
  return BoundOperator(h, f).evaluate(x).value;
}

double geometric_mean_op(const OperatorInstance& op, const RealFunction& f,
                         double x, bool* log_minus_inf) {
  OperatorInstance ge = op;
  ge.kind = OperatorInstance::Kind::geometric;
  Evaluation e = BoundOperator(ge, f).evaluate(x);
  if (log_minus_inf) *log_minus_inf = e.log_minus_inf;
  return e.value;
}

double quasi_mean(const OperatorInstance& op, const RealFunction& f,
                  double x) {
  if (op.kind != OperatorInstance::Kind::quasi_arithmetic)
    throw std::invalid_argument(
        "quasi_mean requires a quasi-arithmetic operator instance");
  return BoundOperator(op, f).evaluate(x).value;
}

OrderingReport jensen_order_check(const OperatorInstance& op,
                                  const RealFunction& f,
                                  std::span<const double> grid) {
  if (op.kind != OperatorInstance::Kind::quasi_arithmetic || !op.g)
    throw std::invalid_argument(
        "jensen_order_check requires a quasi-arithmetic operator instance");
  means::Classification cls = means::classify(*op.g);
  if (cls.jensen_case == means::JensenCase::none)
    throw std::invalid_argument(
        "mean function has no definite Jensen ordering (shape 'neither')");

  OperatorInstance hardy_op = op;
  hardy_op.kind = OperatorInstance::Kind::hardy;
  hardy_op.g.reset();
  BoundOperator H(hardy_op, f);
  BoundOperator M(op, f);

  OrderingReport report;
  report.predicted = cls.jensen_case;
  for (double x : grid) {
    Evaluation h = H.evaluate(x);
    Evaluation m = M.evaluate(x);
    OrderingRow row;
    row.x = x;
    row.hardy = h.value;
    row.quasi = m.value;
    row.tolerance =
        h.err + m.err +
        1e-9 * std::max({1.0, std::abs(h.value), std::abs(m.value)});
    row.ok = (cls.jensen_case == means::JensenCase::H_below_Mg)
                 ? h.value <= m.value + row.tolerance
                 : m.value <= h.value + row.tolerance;
    if (!row.ok) ++report.violations;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace hardymean::ops
