#include "hardymean/means.hpp"

#include <algorithm>
#include <cmath>

namespace hardymean::means {

namespace {

constexpr double kWindowLo = 1e-3;
constexpr double kWindowHi = 1e3;

bool eval_ok(const dsl::FunctionExpr& f, double x, double& out) {
  try {
    out = f.eval(x);
    return true;
  } catch (const dsl::EvalError&) {
    return false;
  }
}

}  // namespace

const char* to_string(Direction d) {
  return d == Direction::increasing ? "increasing" : "decreasing";
}

const char* to_string(Shape s) {
  switch (s) {
    case Shape::convex: return "convex";
    case Shape::concave: return "concave";
    case Shape::neither: return "neither";
  }
  return "unknown";
}

const char* to_string(JensenCase j) {
  switch (j) {
    case JensenCase::H_below_Mg: return "H_below_Mg";
    case JensenCase::Mg_below_H: return "Mg_below_H";
    case JensenCase::none: return "none";
  }
  return "unknown";
}

std::vector<double> probe_points(const dsl::FunctionExpr& f, Interval domain,
                                 int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
  double lo = std::max(domain.lo, kWindowLo);
  double hi = std::min(domain.hi, kWindowHi);
  bool log_spaced = true;
  if (!(lo < hi)) {
    // Window does not meet the default band; fall back to the domain itself.
    lo = domain.lo;
    hi = domain.hi;
    if (!std::isfinite(lo)) lo = -kWindowHi;
    if (!std::isfinite(hi)) hi = kWindowHi;
    log_spaced = lo > 0;
  }
  // Keep finite-difference stencils inside an open domain.
  const double margin = 64 * 1e-5;
  lo *= (lo > 0) ? (1 + margin) : (1 - margin);
  hi *= (hi > 0) ? (1 - margin) : (1 + margin);
  std::vector<double> pts;
  pts.reserve(grid_size);
  for (int i = 0; i < grid_size; ++i) {
    double s = static_cast<double>(i) / (grid_size - 1);
    double x = log_spaced ? lo * std::pow(hi / lo, s) : lo + s * (hi - lo);
    double v;
    if (eval_ok(f, x, v)) pts.push_back(x);
  }
  if (pts.size() < 8)
    throw MeanFunctionError(
        "function is evaluable at fewer than 8 probe points on the window");
  return pts;
}

MeanFunction::MeanFunction(dsl::FunctionExpr g,
                           std::optional<dsl::FunctionExpr> ginv,
                           Interval domain)
    : g_(std::move(g)), g_inverse_(std::move(ginv)), domain_(domain) {}

MeanFunction MeanFunction::make(std::string_view g_source,
                                std::optional<std::string_view> inverse_source,
                                Interval domain) {
  dsl::FunctionExpr g = dsl::FunctionExpr::parse(g_source);
  std::optional<dsl::FunctionExpr> ginv;
  if (inverse_source) ginv = dsl::FunctionExpr::parse(*inverse_source);
  MeanFunction m(std::move(g), std::move(ginv), domain);

  m.grid_ = probe_points(m.g_, domain, 64);
  std::vector<double> vals;
  vals.reserve(m.grid_.size());
  for (double x : m.grid_) vals.push_back(m.g_.eval(x));
  int up = 0, down = 0;
  for (size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] > vals[i - 1])
      ++up;
    else if (vals[i] < vals[i - 1])
      ++down;
    else
      throw MeanFunctionError("mean function is not strictly monotone: equal "
                              "values at adjacent probe points");
  }
  if (up > 0 && down > 0)
    throw MeanFunctionError(
        "mean function is not monotone on the probe window");
  m.direction_ = up > 0 ? Direction::increasing : Direction::decreasing;

  if (m.g_inverse_) {
    for (size_t i = 0; i < m.grid_.size(); ++i) {
      double x = m.grid_[i];
      double back;
      if (!eval_ok(*m.g_inverse_, vals[i], back))
        throw MeanFunctionError(
            "supplied inverse is not evaluable at g(x) on the probe grid");
      if (std::abs(back - x) > 1e-6 * std::max(1.0, std::abs(x)))
        throw MeanFunctionError(
            "supplied inverse disagrees with g beyond 1e-6 relative at x = " +
            dsl::format_double(x));
    }
  }
  return m;
}

MeanFunction MeanFunction::identity() {
  return make("x", std::optional<std::string_view>("x"), Interval{});
}

bool MeanFunction::is_identity() const { return g_.str() == "x"; }

double MeanFunction::inverse(double y) const {
  if (g_inverse_) return g_inverse_->eval(y);
  return invert_numeric(*this, y);
}

double invert_numeric(const MeanFunction& m, double y) {
  const auto& grid = m.probe_grid();
  double lo = grid.front(), hi = grid.back();
  const bool inc = m.direction() == Direction::increasing;
  auto covers_below = [&](double gx) { return inc ? gx <= y : gx >= y; };
  auto covers_above = [&](double gx) { return inc ? gx >= y : gx <= y; };

  // Expand the bracket geometrically toward the domain bounds.
  double glo = m.g(lo), ghi = m.g(hi);
  int guard = 0;
  while (!covers_below(glo)) {
    double next = lo / 8;
    if (m.domain().lo > 0)
      next = std::max(next, lo * 0.01 + m.domain().lo * 0.99);
    if (next >= lo || next < 1e-300 || ++guard > 1200)
      throw MeanFunctionError("value lies outside the image of g");
    lo = next;
    try {
      glo = m.g(lo);
    } catch (const dsl::EvalError&) {
      throw MeanFunctionError("value lies outside the attainable image of g");
    }
  }
  guard = 0;
  while (!covers_above(ghi)) {
    double next = hi * 8;
    if (std::isfinite(m.domain().hi))
      next = std::min(next, hi * 0.01 + m.domain().hi * 0.99);
    if (next <= hi || next > 1e300 || ++guard > 1200)
      throw MeanFunctionError("value lies outside the image of g");
    hi = next;
    try {
      ghi = m.g(hi);
    } catch (const dsl::EvalError&) {
      throw MeanFunctionError("value lies outside the attainable image of g");
    }
  }

  double flo = glo - y;
  if (flo == 0) return lo;
  if (ghi - y == 0) return hi;
  double x = (lo + hi) / 2;
  for (int it = 0; it < 200; ++it) {
    x = (lo + hi) / 2;
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(x))) break;
    double fx = m.g(x) - y;
    if (fx == 0) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
  }
  return x;
}

Classification classify(const MeanFunction& m, int grid_size) {
  if (grid_size < 8) throw std::invalid_argument("grid_size must be >= 8");
  Classification c;
  c.direction = m.direction();

  std::vector<double> pts = probe_points(m.expr(), m.domain(), grid_size);
  int pos = 0, neg = 0;
  for (double x : pts) {
    double d2, gx;
    try {
      d2 = dsl::derivative(m.expr(), x, 2);
      gx = m.g(x);
    } catch (const dsl::EvalError&) {
      continue;  // stencil fell off the evaluable window
    }
    double h = 1e-5 * std::max(std::abs(x), 1.0);
    // Dead band: declared tolerance plus the finite-difference rounding
    // floor eps*|g|/h^2; affine second differences land inside it.
    double band = 1e-10 * std::max(1.0, std::abs(gx)) +
                  1e4 * std::numeric_limits<double>::epsilon() *
                      std::max(1.0, std::abs(gx)) / (h * h);
    if (d2 > band)
      ++pos;
    else if (d2 < -band)
      ++neg;
  }
  if (pos > 0 && neg > 0)
    c.shape = Shape::neither;
  else if (neg > 0)
    c.shape = Shape::concave;
  else
    c.shape = Shape::convex;  // all-positive, or affine within the band

  const bool inc = c.direction == Direction::increasing;
  if (c.shape == Shape::convex)
    c.jensen_case = inc ? JensenCase::H_below_Mg : JensenCase::Mg_below_H;
  else if (c.shape == Shape::concave)
    c.jensen_case = inc ? JensenCase::Mg_below_H : JensenCase::H_below_Mg;
  else
    c.jensen_case = JensenCase::none;
  return c;
}

PhiMembership phi_class_member(const dsl::FunctionExpr& phi, double r,
                               Interval domain, int grid_size, double tol) {
  if (!(r > 1))
    throw std::invalid_argument("Phi_r requires r > 1 (or +infinity)");
  const double coeff = std::isinf(r) ? 1.0 : 1.0 - 1.0 / r;
  std::vector<double> pts = probe_points(phi, domain, grid_size);
  PhiMembership out;
  out.member = true;
  for (double x : pts) {
    double v, d1, d2;
    try {
      v = phi.eval(x);
      d1 = dsl::derivative(phi, x, 1);
      d2 = dsl::derivative(phi, x, 2);
    } catch (const dsl::EvalError&) {
      continue;
    }
    if (!(v > 0))
      throw std::invalid_argument(
          "phi must be positive on the probe grid (violated at x = " +
          dsl::format_double(x) + ")");
    double scale = std::max({1.0, v * v, d1 * d1});
    // Stencil rounding noise on v*d2 is of order eps*|phi|^2/h^2; equality
    // cases (s = r, exp(x) in Phi) must not be rejected for it.
    double h = 1e-5 * std::max(std::abs(x), 1.0);
    double noise =
        64 * std::numeric_limits<double>::epsilon() / (h * h) * scale;
    if (v * d2 < coeff * d1 * d1 - tol * scale - noise) {
      out.member = false;
      out.witness = x;
      break;
    }
  }
  return out;
}

}  // namespace hardymean::means
