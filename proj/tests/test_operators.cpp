#include "hardymean/operators.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace hardymean;
using namespace hardymean::ops;
using hardymean::means::MeanFunction;

namespace {
const double kE = std::exp(1.0);

RealFunction rf(const char* src) { return RealFunction::parse(src); }
}  // namespace

TEST_CASE("weighted Hardy averaging") {
  OperatorInstance unit = OperatorInstance::hardy();
  // Averaging a constant gives the constant, for any weight.
  CHECK(hardy_avg(OperatorInstance::hardy(rf("x")), rf("7"), 2.5) ==
        doctest::Approx(7).epsilon(1e-8));
  // w = 1, f = t: (1/2) int_0^2 t dt = 1.
  CHECK(hardy_avg(unit, rf("x"), 2) == doctest::Approx(1).epsilon(1e-9));
  // w = t^(lambda-1), lambda = 2, f = t: closed form lambda*x/(lambda+1).
  CHECK(hardy_avg(OperatorInstance::hardy(rf("x")), rf("x"), 1) ==
        doctest::Approx(2.0 / 3).epsilon(1e-9));
  // Diverging numerator is an error carrying the quadrature verdict.
  CHECK_THROWS_AS(hardy_avg(unit, rf("1/x^2"), 1), DivergenceError);
}

TEST_CASE("geometric mean operator") {
  OperatorInstance ge = OperatorInstance::geometric();
  // G(t^a)(x) = x^a e^(-a) via int_0^x ln t dt = x ln x - x.
  CHECK(geometric_mean_op(ge, rf("x"), 1) ==
        doctest::Approx(1 / kE).epsilon(1e-9));
  CHECK(geometric_mean_op(ge, rf("x^2"), 2) ==
        doctest::Approx(4 * std::exp(-2.0)).epsilon(1e-9));
  // Constants pass through.
  CHECK(geometric_mean_op(ge, rf("5"), 3) == doctest::Approx(5).epsilon(1e-10));
  // [G f]^s = [G f^s]: both sides e^(-2) for f = t, s = 2, x = 1.
  double lhs = std::pow(geometric_mean_op(ge, rf("x"), 1), 2.0);
  double rhs = geometric_mean_op(ge, rf("x^2"), 1);
  CHECK(lhs == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  CHECK(rhs == doctest::Approx(lhs).epsilon(1e-8));
  // f vanishing beyond its support collapses G to 0 with the flag set.
  bool flagged = false;
  double v = geometric_mean_op(ge, rf("indicator(0,1)*x"), 2, &flagged);
  CHECK(v == 0);
  CHECK(flagged);
  // ...but not inside the support.
  flagged = false;
  v = geometric_mean_op(ge, rf("indicator(0,1)*x"), 0.5, &flagged);
  CHECK(v == doctest::Approx(0.5 / kE).epsilon(1e-8));
  CHECK(!flagged);
}

TEST_CASE("homogeneity of the geometric mean") {
  OperatorInstance ge = OperatorInstance::geometric();
  BoundOperator base(ge, rf("1+x"));
  for (double c : {0.5, 2.0, 10.0}) {
    BoundOperator scaled(
        ge, RealFunction::parse(hardymean::dsl::format_double(c) + "*(1+x)"));
    for (double x : {0.3, 1.0, 2.5}) {
      CHECK(scaled(x) == doctest::Approx(c * base(x)).epsilon(1e-7));
    }
  }
}

TEST_CASE("quasi-arithmetic mean") {
  // g = identity reduces to the Hardy average.
  OperatorInstance idop =
      OperatorInstance::quasi(MeanFunction::make("x", "x"));
  CHECK(quasi_mean(idop, rf("x"), 2) == doctest::Approx(1).epsilon(1e-9));
  // g = ln reduces to the geometric mean.
  OperatorInstance lnop =
      OperatorInstance::quasi(MeanFunction::make("ln(x)", "exp(x)"));
  CHECK(quasi_mean(lnop, rf("x"), 1) == doctest::Approx(1 / kE).epsilon(1e-8));
  // g = x^2, f = t, w = 1, x = 1: (int_0^1 t^2 dt)^(1/2) = sqrt(1/3).
  OperatorInstance sqop =
      OperatorInstance::quasi(MeanFunction::make("x^2", std::nullopt));
  CHECK(quasi_mean(sqop, rf("x"), 1) ==
        doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-8));
  // Harmonic mean (g = 1/x) of f(t) = t degenerates: int_0^x dt/t diverges.
  OperatorInstance hm =
      OperatorInstance::quasi(MeanFunction::make("1/x", "1/x"));
  CHECK_THROWS_AS(quasi_mean(hm, rf("x"), 1), DivergenceError);
  // ...but works where 1/f is integrable: f = 1 + t.
  // M(x) = x / int_0^x dt/(1+t) -- at x = 1: 1/ln 2.
  CHECK(quasi_mean(hm, rf("1+x"), 1) ==
        doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("quasi-arithmetic consistency with Hardy on random inputs") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coef(0.1, 2.0);
  std::uniform_real_distribution<double> xs(0.2, 4.0);
  OperatorInstance idop = OperatorInstance::quasi(MeanFunction::make("x", "x"));
  OperatorInstance h = OperatorInstance::hardy();
  for (int i = 0; i < 20; ++i) {
    std::string src = dsl::format_double(coef(rng)) + "+" +
                      dsl::format_double(coef(rng)) + "*x";
    RealFunction f = RealFunction::parse(src);
    double x = xs(rng);
    CHECK(quasi_mean(idop, f, x) ==
          doctest::Approx(hardy_avg(h, f, x)).epsilon(1e-9));
  }
}

TEST_CASE("mean value property") {
  // For monotone f, the quasi mean over (0, x) stays between inf and sup.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> xs(0.5, 3.0);
  const char* gs[][2] = {{"x", "x"}, {"ln(x)", "exp(x)"}, {"x^2", "sqrt(x)"}};
  for (auto& gdef : gs) {
    OperatorInstance op =
        OperatorInstance::quasi(MeanFunction::make(gdef[0], gdef[1]));
    for (const char* fsrc : {"1+x", "3-x/10", "exp(-x)+0.5"}) {
      RealFunction f = RealFunction::parse(fsrc);
      double x = xs(rng);
      double m = quasi_mean(op, f, x);
      double f0 = f(1e-9), fx = f(x);
      double lo = std::min(f0, fx), hi = std::max(f0, fx);
      CHECK(m >= lo - 1e-7);
      CHECK(m <= hi + 1e-7);
    }
  }
}

TEST_CASE("Jensen ordering checks") {
  const double grid[] = {0.5, 1, 2};
  // g = ln: concave increasing, so M^g <= H.
  OperatorInstance lnop =
      OperatorInstance::quasi(MeanFunction::make("ln(x)", "exp(x)"));
  OrderingReport r = jensen_order_check(lnop, rf("1+x"), grid);
  CHECK(r.predicted == means::JensenCase::Mg_below_H);
  CHECK(r.violations == 0);
  for (const auto& row : r.rows) CHECK(row.quasi <= row.hardy + row.tolerance);

  // g = x^2: convex increasing, so H <= M^g.
  OperatorInstance sqop =
      OperatorInstance::quasi(MeanFunction::make("x^2", std::nullopt));
  r = jensen_order_check(sqop, rf("1+x"), grid);
  CHECK(r.predicted == means::JensenCase::H_below_Mg);
  CHECK(r.violations == 0);

  // Constant f: equality at every grid point within tolerance.
  r = jensen_order_check(lnop, rf("3"), grid);
  CHECK(r.violations == 0);
  for (const auto& row : r.rows)
    CHECK(row.hardy == doctest::Approx(row.quasi).epsilon(1e-8));

  // Jensen's inequality itself: g(H f) <= H(g o f) for convex g.
  OperatorInstance h = OperatorInstance::hardy();
  for (double x : grid) {
    double hf = hardy_avg(h, rf("1+x"), x);
    double hg = hardy_avg(h, rf("(1+x)^2"), x);
    CHECK(hf * hf <= hg + 1e-8);
  }
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(OperatorInstance::hardy(rf("x-500")), std::invalid_argument);
  CHECK_THROWS_AS(OperatorInstance(OperatorInstance::Kind::quasi_arithmetic,
                                   std::nullopt, rf("1")),
                  std::invalid_argument);
}
