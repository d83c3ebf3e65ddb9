#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "libess/errors.hpp"
#include "libess/pwl.hpp"

using namespace ess;

TEST_CASE("square chords are exact at knots and overestimate in between") {
  PiecewiseLinearFn f = pwl_square(-2.0, 2.0, 8);
  REQUIRE(f.segments() == 8);
  for (size_t k = 0; k < f.x.size(); ++k)
    CHECK(f.y[k] == doctest::Approx(f.x[k] * f.x[k]).epsilon(1e-15));
  for (double x = -1.999; x < 2.0; x += 0.037) {
    double err = f.eval(x) - x * x;
    CHECK(err >= -1e-12);  // chord of a convex function never undershoots
  }
}

TEST_CASE("chord error peaks at segment midpoints at width squared over four") {
  // one segment over [0, 1]: worst error 1/4 at x = 1/2
  PiecewiseLinearFn f1 = pwl_square(0.0, 1.0, 1);
  CHECK(f1.eval(0.5) - 0.25 == doctest::Approx(0.25).epsilon(1e-14));
  double worst1 = pwl_max_error([](double x) { return x * x; }, f1);
  CHECK(worst1 == doctest::Approx(0.25).epsilon(1e-4));

  // two segments: width halves, error quarters to 1/16
  PiecewiseLinearFn f2 = pwl_square(0.0, 1.0, 2);
  CHECK(f2.eval(0.25) - 0.0625 == doctest::Approx(0.0625).epsilon(1e-14));
  double worst2 = pwl_max_error([](double x) { return x * x; }, f2);
  CHECK(worst2 == doctest::Approx(0.0625).epsilon(1e-4));

  // the (dx)^2/4 law holds for an arbitrary window and count
  PiecewiseLinearFn g = pwl_square(-1.25, 4.6, 13);
  double dx = (4.6 - -1.25) / 13;
  double worst = pwl_max_error([](double x) { return x * x; }, g, 8192);
  CHECK(worst == doctest::Approx(dx * dx / 4.0).epsilon(1e-3));
}

TEST_CASE("eval interpolates linearly and rejects points beyond the range") {
  PiecewiseLinearFn f;
  f.x = {0.0, 1.0, 3.0};
  f.y = {1.0, 2.0, 0.0};
  f.validate();
  CHECK(f.eval(0.0) == 1.0);
  CHECK(f.eval(1.0) == 2.0);
  CHECK(f.eval(3.0) == 0.0);
  CHECK(f.eval(0.5) == doctest::Approx(1.5));
  CHECK(f.eval(2.0) == doctest::Approx(1.0));
  CHECK(f.slope(0) == doctest::Approx(1.0));
  CHECK(f.slope(1) == doctest::Approx(-1.0));
  CHECK_NOTHROW(f.eval(3.0 + 1e-12));  // rounding slack
  CHECK_THROWS_AS(f.eval(3.5), Error);
  CHECK_THROWS_AS(f.eval(-0.5), Error);
}

TEST_CASE("validate rejects malformed breakpoint sets") {
  PiecewiseLinearFn f;
  f.x = {0.0, 1.0};
  f.y = {1.0};
  CHECK_THROWS_AS(f.validate(), Error);
  f.y = {1.0, 2.0};
  CHECK_NOTHROW(f.validate());
  f.x = {1.0, 1.0};
  CHECK_THROWS_AS(f.validate(), Error);
  f.x = {};
  f.y = {};
  CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("fit_pwl nails an affine function with one segment") {
  auto aff = [](double x) { return 3.0 - 0.7 * x; };
  PiecewiseLinearFn f = fit_pwl(aff, -1.0, 2.0, 1);
  CHECK(pwl_max_error(aff, f) < 1e-12);
}

TEST_CASE("fit_pwl error shrinks as segments are added") {
  auto curve = [](double x) { return std::exp(x); };
  double prev = 1e100;
  for (int n : {1, 2, 4, 8, 16}) {
    PiecewiseLinearFn f = fit_pwl(curve, 0.0, 2.0, n);
    CHECK(static_cast<int>(f.segments()) == n);
    CHECK(f.lo() == doctest::Approx(0.0));
    CHECK(f.hi() == doctest::Approx(2.0));
    double err = pwl_max_error(curve, f);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("fit_pwl places breakpoints where curvature concentrates") {
  // steep exponential: greedy insertion must beat the uniform grid
  auto curve = [](double x) { return std::exp(3.0 * x); };
  PiecewiseLinearFn fitted = fit_pwl(curve, 0.0, 2.0, 6);
  PiecewiseLinearFn uniform;
  for (int k = 0; k <= 6; ++k) {
    double x = 2.0 * k / 6;
    uniform.x.push_back(x);
    uniform.y.push_back(curve(x));
  }
  CHECK(pwl_max_error(curve, fitted) < pwl_max_error(curve, uniform));
}
