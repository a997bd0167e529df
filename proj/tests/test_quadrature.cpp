#include "hardymean/quadrature.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "hardymean/funcdsl.hpp"

using namespace hardymean::quad;

TEST_CASE("closed forms on finite intervals") {
  // int_0^1 ln t dt = -1 (endpoint singularity at 0).
  Result r = integrate_finite([](double t) { return std::log(t); }, 0, 1);
  CHECK(r.status == Status::converged);
  CHECK(r.value == doctest::Approx(-1).epsilon(1e-9));
  CHECK(r.err_estimate <= std::max(1e-10, 1e-8 * std::abs(r.value)));

  // int_0^3 t dt = 4.5.
  r = integrate_finite([](double t) { return t; }, 0, 3);
  CHECK(r.status == Status::converged);
  CHECK(r.value == doctest::Approx(4.5).epsilon(1e-10));

  // int_0^1 dt/t diverges.
  r = integrate_finite([](double t) { return 1 / t; }, 0, 1);
  CHECK(r.status == Status::diverged);
  CHECK(std::abs(r.value) >= Config{}.divergence_threshold);

  // Hard blowup: int_0^1 t^-2 dt.
  r = integrate_finite([](double t) { return 1 / (t * t); }, 0, 1);
  CHECK(r.status == Status::diverged);
  CHECK(r.value == std::numeric_limits<double>::infinity());
}

TEST_CASE("power family oracle") {
  // int_0^1 t^a dt = 1/(a+1) for a > -1.
  for (double a : {-0.9, -0.5, 0.0, 1.0, 3.0}) {
    Result r = integrate_finite([a](double t) { return std::pow(t, a); }, 0, 1);
    CHECK(r.status == Status::converged);
    CHECK(r.value == doctest::Approx(1.0 / (a + 1)).epsilon(1e-7));
  }
}

TEST_CASE("upper-infinite integrals") {
  // int_1^inf x^-2 dx = 1.
  Result r = integrate_upper_infinite([](double x) { return 1 / (x * x); }, 1);
  CHECK(r.status == Status::converged);
  CHECK(r.value == doctest::Approx(1).epsilon(1e-9));

  // int_tau^inf x^-q dx = tau^(1-q)/(q-1); q = 2 gives 1/tau.
  for (double tau : {0.5, 1.0, 2.0}) {
    r = integrate_upper_infinite([](double x) { return 1 / (x * x); }, tau);
    CHECK(r.status == Status::converged);
    CHECK(r.value == doctest::Approx(1 / tau).epsilon(1e-9));
  }

  // int_1^inf dx/x diverges.
  r = integrate_upper_infinite([](double x) { return 1 / x; }, 1);
  CHECK(r.status == Status::diverged);

  // Fast decay: int_0.5^inf e^-x dx = e^-0.5.
  r = integrate_upper_infinite([](double x) { return std::exp(-x); }, 0.5);
  CHECK(r.status == Status::converged);
  CHECK(r.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("interior failures are hard errors") {
  CHECK_THROWS_AS(
      integrate_finite([](double t) { return 1 / (t - 0.5); }, 0, 1),
      InteriorError);
  hardymean::dsl::FunctionExpr bad =
      hardymean::dsl::FunctionExpr::parse("sqrt(x-2)");
  CHECK_THROWS_AS(
      integrate_finite([&bad](double t) { return bad.eval(t); }, 0, 1),
      InteriorError);
}

TEST_CASE("additivity of subintervals") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> cs(0.2, 1.8);
  auto f = [](double t) { return std::exp(t) + t * t; };
  for (int i = 0; i < 10; ++i) {
    double c = cs(rng);
    Result left = integrate_finite(f, 0, c);
    Result right = integrate_finite(f, c, 2);
    Result whole = integrate_finite(f, 0, 2);
    double gap = std::abs(left.value + right.value - whole.value);
    CHECK(gap <= 3 * (left.err_estimate + right.err_estimate +
                      whole.err_estimate));
  }
}

TEST_CASE("split integration handles jumps") {
  hardymean::dsl::FunctionExpr f =
      hardymean::dsl::FunctionExpr::parse("indicator(0,1)*x");
  auto bks = f.breakpoints();
  Result r = integrate_finite_split([&f](double t) { return f.eval(t); }, 0, 2,
                                    bks);
  CHECK(r.status == Status::converged);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-10));

  r = integrate_to_infinity(
      [&f](double t) { return f.eval(t) / (t * t + 1); }, 0.25, bks);
  CHECK(r.status == Status::converged);
  // int_0.25^1 x/(x^2+1) dx = (ln 2 - ln(1.0625)) / 2.
  CHECK(r.value ==
        doctest::Approx((std::log(2.0) - std::log(1.0625)) / 2).epsilon(1e-9));
}

TEST_CASE("cumulative integral cache") {
  CumulativeIntegral w1([](double) { return 1.0; });
  CHECK(w1.value(7) == doctest::Approx(7).epsilon(1e-10));
  CumulativeIntegral wt([](double t) { return t; });
  CHECK(wt.value(3) == doctest::Approx(4.5).epsilon(1e-10));
  // Interleaved queries agree with a fresh computation.
  CumulativeIntegral a([](double t) { return std::exp(-t); });
  double v2 = a.value(2);
  double v3 = a.value(3);
  double v1 = a.value(1);
  CHECK(v1 == doctest::Approx(1 - std::exp(-1)).epsilon(1e-9));
  CHECK(v2 == doctest::Approx(1 - std::exp(-2)).epsilon(1e-9));
  CHECK(v3 == doctest::Approx(1 - std::exp(-3)).epsilon(1e-9));
  // Monotone consistency for positive integrands.
  CHECK(v1 < v2);
  CHECK(v2 < v3);
  // Singular-at-zero weight.
  CumulativeIntegral sqrtw([](double t) { return 1 / std::sqrt(t); });
  CHECK(sqrtw.value(4) == doctest::Approx(4).epsilon(1e-8));
  // Divergent integrand poisons the cache.
  CumulativeIntegral bad([](double t) { return 1 / t; });
  CHECK_THROWS_AS(bad.value(1), DivergentIntegral);
  CHECK_THROWS_AS(bad.value(0.5), DivergentIntegral);
}

TEST_CASE("tail integral cache") {
  TailIntegral tail([](double x) { return 1 / (x * x * x); });
  // int_t^inf x^-3 dx = 1/(2 t^2).
  CHECK(tail.value(2) == doctest::Approx(0.125).epsilon(1e-9));
  CHECK(tail.value(1) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(tail.value(0.5) == doctest::Approx(2).epsilon(1e-9));
  TailIntegral harmonic([](double x) { return 1 / x; });
  CHECK_THROWS_AS(harmonic.value(1), DivergentIntegral);
}

TEST_CASE("config tolerances are honored") {
  Config loose;
  loose.abs_tol = 1e-4;
  loose.rel_tol = 1e-4;
  Result r = integrate_finite([](double t) { return std::sin(t) + 2; }, 0, 1,
                              loose);
  CHECK(r.status == Status::converged);
  CHECK(r.err_estimate <= std::max(loose.abs_tol,
                                   loose.rel_tol * std::abs(r.value)));
  CHECK(r.value == doctest::Approx(2 + 1 - std::cos(1.0)).epsilon(1e-5));
}
