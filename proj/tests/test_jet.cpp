#include <doctest.h>

#include <cmath>

#include "weylkit/jet.hpp"

using weylkit::JetD;
using weylkit::MultiIndex;

TEST_CASE("monomial layout is graded") {
  const auto& t = weylkit::detail::MonomialTables::get();
  CHECK(t.count_through[0] == 1);
  CHECK(t.count_through[1] == 5);
  CHECK(t.count_through[2] == 15);
  CHECK(t.count_through[7] == 330);
  CHECK(t.triples_through[7] == 6435);
  for (int i = 0; i < t.count_through[5]; ++i) CHECK(t.index_of(t.exponents[i]) == i);
}

TEST_CASE("polynomial products are exact") {
  const int n = 6;
  JetD x = JetD::variable(0.7, 0, n), y = JetD::variable(-1.3, 1, n);
  JetD f = x * x * y + 3.0 * y * y * y;
  // d/dx d/dx d/dy (x^2 y) = 2
  CHECK(f.partial({2, 1, 0, 0}) == doctest::Approx(2.0));
  CHECK(f.partial({0, 3, 0, 0}) == doctest::Approx(18.0));
  CHECK(f.partial({1, 1, 0, 0}) == doctest::Approx(2 * 0.7));
  CHECK(f.partial({3, 0, 0, 0}) == doctest::Approx(0.0));
  CHECK(f.value() == doctest::Approx(0.49 * -1.3 + 3 * -2.197));
}

TEST_CASE("reciprocal matches 1/(1+x+y) series") {
  const int n = 7;
  JetD x = JetD::variable(0.2, 0, n), z = JetD::variable(0.5, 2, n);
  JetD f = (1.0 + x + z).reciprocal();
  // d^k/dx^i dz^j (1+x+z)^{-1} = (-1)^k k! (1+x+z)^{-k-1}
  const double u = 1.7;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const int k = i + j;
      const double expect = (k % 2 ? -1.0 : 1.0) * std::tgamma(k + 1.0) * std::pow(u, -k - 1);
      CHECK(f.partial({i, 0, j, 0}) == doctest::Approx(expect).epsilon(1e-12));
    }
  JetD one = f * (1.0 + x + z);
  for (int m = 1; m < one.size(); ++m) CHECK(std::abs(one.coefficient(m)) < 1e-13);
}

TEST_CASE("elementary functions") {
  const int n = 5;
  JetD t = JetD::variable(0.4, 2, n);
  JetD r = JetD::variable(2.5, 1, n);
  CHECK(sin(t).partial({0, 0, 3, 0}) == doctest::Approx(-std::cos(0.4)));
  CHECK(cos(t).partial({0, 0, 4, 0}) == doctest::Approx(std::cos(0.4)));
  CHECK(exp(r).partial({0, 5, 0, 0}) == doctest::Approx(std::exp(2.5)));
  CHECK(log(r).partial({0, 2, 0, 0}) == doctest::Approx(-1.0 / 6.25));
  CHECK(sqrt(r).partial({0, 1, 0, 0}) == doctest::Approx(0.5 / std::sqrt(2.5)));
  CHECK(cbrt(r).partial({0, 2, 0, 0}) == doctest::Approx(-2.0 / 9.0 * std::pow(2.5, -5.0 / 3.0)));
  // sin^2 + cos^2 = 1 to all orders
  JetD u = sin(t * r) * sin(t * r) + cos(t * r) * cos(t * r);
  CHECK(u.value() == doctest::Approx(1.0));
  for (int m = 1; m < u.size(); ++m) CHECK(std::abs(u.coefficient(m)) < 1e-12);
}

TEST_CASE("derivative commutes with partial") {
  const int n = 6;
  JetD x = JetD::variable(0.3, 0, n), y = JetD::variable(1.1, 3, n);
  JetD f = exp(x * y) / (2.0 + sin(y));
  JetD dfx = f.derivative(0).derivative(3);
  CHECK(dfx.order() == n - 2);
  CHECK(dfx.partial({1, 0, 0, 2}) == doctest::Approx(f.partial({2, 0, 0, 3})));
}

TEST_CASE("mixed truncation orders") {
  JetD a = JetD::variable(1.0, 0, 5), b = JetD::variable(2.0, 1, 3);
  CHECK((a * b).order() == 3);
  CHECK((a + b).order() == 3);
  CHECK((a + 2.0).order() == 5);
  CHECK_THROWS(a.truncated(0).derivative(0));
}
