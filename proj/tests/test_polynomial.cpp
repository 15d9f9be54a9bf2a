#include <doctest.h>

#include <cmath>

#include "alternant/polynomial.hpp"

using namespace alternant;

namespace {
const Interval kIv{-1.0, 1.0};
}

TEST_CASE("monomial round trip") {
  const Polynomial p = Polynomial::from_monomial(kIv, {1.0, -2.0, 0.5, 3.0});
  CHECK(p(0.0) == doctest::Approx(1.0));
  CHECK(p(1.0) == doctest::Approx(1.0 - 2.0 + 0.5 + 3.0));
  const auto mono = p.monomial_coefficients();
  REQUIRE(mono.size() == 4);
  CHECK(mono[0] == doctest::Approx(1.0));
  CHECK(mono[1] == doctest::Approx(-2.0));
  CHECK(mono[2] == doctest::Approx(0.5));
  CHECK(mono[3] == doctest::Approx(3.0));
}

TEST_CASE("interpolation is exact on polynomials of matching degree") {
  const auto fn = [](double t) { return 2.0 - t + 4.0 * t * t * t; };
  const Polynomial p = Polynomial::fit_callable(kIv, fn, 3);
  for (double t : {-1.0, -0.37, 0.0, 0.5, 0.99})
    CHECK(p(t) == doctest::Approx(fn(t)).epsilon(1e-13));
}

TEST_CASE("from_roots builds the scaled root product") {
  const Polynomial p = Polynomial::from_roots(kIv, 2.0, {-0.5, 0.5});
  // 2 * (-0.5 - t)(0.5 - t) = 2 (t^2 - 0.25)
  CHECK(p(0.0) == doctest::Approx(-0.5));
  CHECK(p(1.0) == doctest::Approx(1.5));
  CHECK(p(-0.5) == doctest::Approx(0.0));
  const Polynomial c = Polynomial::from_roots(kIv, 3.25, {});
  CHECK(c(0.7) == doctest::Approx(3.25));
  CHECK(c.degree_bound() == 0);
}

TEST_CASE("derivative and linear multiplication") {
  const Polynomial p = Polynomial::from_monomial(kIv, {1.0, 0.0, 3.0});
  const Polynomial d = p.derivative();
  CHECK(d(0.5) == doctest::Approx(3.0));   // 6t
  CHECK(d(-1.0) == doctest::Approx(-6.0));
  const Polynomial q = p.mul_linear(2.0);  // (2 - t) * (1 + 3t^2)
  CHECK(q(1.0) == doctest::Approx(4.0));
  CHECK(q(0.0) == doctest::Approx(2.0));
  CHECK(q.degree_bound() == 3);
}

TEST_CASE("rebase reproduces the same function on the new interval") {
  const Polynomial p = Polynomial::from_monomial({0.0, 1.0}, {0.3, -1.2, 2.0});
  const Polynomial q = p.rebase({0.25, 0.75});
  for (double t : {0.25, 0.4, 0.6, 0.75})
    CHECK(q(t) == doctest::Approx(p(t)).epsilon(1e-13));
}

TEST_CASE("arithmetic in a shared basis") {
  const Polynomial p = Polynomial::from_monomial(kIv, {1.0, 2.0});
  const Polynomial q = Polynomial::from_monomial(kIv, {0.5, 0.0, 1.0});
  const Polynomial sum = p + q;
  const Polynomial diff = p - q;
  for (double t : {-0.8, 0.0, 0.3}) {
    CHECK(sum(t) == doctest::Approx(p(t) + q(t)));
    CHECK(diff(t) == doctest::Approx(p(t) - q(t)));
  }
  CHECK(p.scaled(-2.0)(0.3) == doctest::Approx(-2.0 * p(0.3)));
  CHECK(p.plus_constant(1.5)(0.3) == doctest::Approx(p(0.3) + 1.5));
}
