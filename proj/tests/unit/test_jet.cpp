#include <cmath>

#include "curv/jet.hpp"
#include "doctest.h"

using curv::Jet;

namespace {

// Taylor coefficient of f along x_k of the given degree (pure power).
double pure(const Jet& f, int k, int deg) {
  std::array<int, 4> a{};
  a[k] = deg;
  return f.coeff(Jet::index(a));
}

double fact(int n) { return n <= 1 ? 1.0 : n * fact(n - 1); }

}  // namespace

TEST_CASE("jet: monomial table is ordered by total degree") {
  CHECK(Jet::count(0) == 1);
  CHECK(Jet::count(1) == 5);
  CHECK(Jet::count(6) == 210);
  int prev = 0;
  for (int i = 0; i < Jet::kSize; ++i) {
    const auto& e = Jet::exponent(i);
    int d = e[0] + e[1] + e[2] + e[3];
    CHECK(d >= prev);
    prev = d;
    CHECK(Jet::index({e[0], e[1], e[2], e[3]}) == i);
  }
}

TEST_CASE("jet: sin series at zero") {
  Jet s = sin(Jet::variable(0, 0.0));
  const double want[] = {0, 1, 0, -1.0 / 6, 0, 1.0 / 120, 0};
  for (int d = 0; d <= 6; ++d) CHECK(pure(s, 0, d) == doctest::Approx(want[d]).epsilon(1e-15));
}

TEST_CASE("jet: products truncate and track degree") {
  Jet x = Jet::variable(0, 0.5, 3);
  Jet y = Jet::variable(1, -0.25);
  Jet p = x * y;
  CHECK(p.deg() == 3);
  CHECK(p.value() == doctest::Approx(-0.125));
  CHECK(partial(p, 0).deg() == 2);
  Jet c(2.0);
  CHECK(c.deg() == Jet::kOrder);
}

TEST_CASE("jet: partial at degree zero throws a depth error") {
  Jet x = Jet::variable(0, 1.0, 1);
  Jet d = partial(x, 0);
  CHECK(d.deg() == 0);
  CHECK_THROWS_AS(partial(d, 1), curv::DepthError);
}

TEST_CASE("jet: analytic primitives against closed-form derivatives") {
  const double x0 = 0.7;
  Jet x = Jet::variable(2, x0);
  Jet e = exp(x), s = sqrt(x), r = reciprocal(x), p = pow(x, 1.5), c = cos(x);
  for (int n = 0; n <= 6; ++n) {
    CHECK(pure(e, 2, n) == doctest::Approx(std::exp(x0) / fact(n)).epsilon(1e-13));
    CHECK(pure(r, 2, n) == doctest::Approx(std::pow(-1.0, n) * std::pow(x0, -n - 1)).epsilon(1e-13));
    CHECK(pure(c, 2, n) == doctest::Approx(std::cos(x0 + n * M_PI / 2) / fact(n)).epsilon(1e-13));
    double fall = 1, fall_s = 1;
    for (int k = 0; k < n; ++k) {
      fall *= 1.5 - k;
      fall_s *= 0.5 - k;
    }
    CHECK(pure(p, 2, n) == doctest::Approx(fall * std::pow(x0, 1.5 - n) / fact(n)).epsilon(1e-12));
    CHECK(pure(s, 2, n) == doctest::Approx(fall_s * std::pow(x0, 0.5 - n) / fact(n)).epsilon(1e-12));
  }
}

TEST_CASE("jet: mixed derivatives against central finite differences") {
  // f = sin(x0 x1) exp(x2) / (1 + x3^2)
  auto f = [](double a, double b, double c, double d) {
    return std::sin(a * b) * std::exp(c) / (1 + d * d);
  };
  const double u[4] = {0.3, -0.8, 0.2, 0.5};
  Jet v[4];
  for (int k = 0; k < 4; ++k) v[k] = Jet::variable(k, u[k]);
  Jet F = sin(v[0] * v[1]) * exp(v[2]) / (1.0 + v[3] * v[3]);
  CHECK(F.value() == doctest::Approx(f(u[0], u[1], u[2], u[3])).epsilon(1e-14));
  const double h = 1e-3;
  // d/dx0 d/dx3
  double fd = (f(u[0] + h, u[1], u[2], u[3] + h) - f(u[0] + h, u[1], u[2], u[3] - h) -
               f(u[0] - h, u[1], u[2], u[3] + h) + f(u[0] - h, u[1], u[2], u[3] - h)) /
              (4 * h * h);
  CHECK(F.derivative({1, 0, 0, 1}) == doctest::Approx(fd).epsilon(1e-5));
  // third derivative d^3/dx1^3
  double fd3 = (f(u[0], u[1] + 2 * h, u[2], u[3]) - 2 * f(u[0], u[1] + h, u[2], u[3]) +
                2 * f(u[0], u[1] - h, u[2], u[3]) - f(u[0], u[1] - 2 * h, u[2], u[3])) /
               (2 * h * h * h);
  CHECK(F.derivative({0, 3, 0, 0}) == doctest::Approx(fd3).epsilon(1e-5));
}

TEST_CASE("jet: partial commutes and matches derivative()") {
  Jet x = Jet::variable(0, 0.4), y = Jet::variable(1, 1.1), z = Jet::variable(3, -0.3);
  Jet f = exp(x * y) * cos(z + y);
  Jet a = partial(partial(f, 0), 3);
  Jet b = partial(partial(f, 3), 0);
  for (int i = 0; i < Jet::count(a.deg()); ++i) CHECK(a.coeff(i) == doctest::Approx(b.coeff(i)));
  CHECK(a.value() == doctest::Approx(f.derivative({1, 0, 0, 1})).epsilon(1e-13));
}

TEST_CASE("jet: division is the inverse of multiplication") {
  Jet x = Jet::variable(0, 0.9), y = Jet::variable(2, 0.1);
  Jet a = 1.0 + x * y + sin(y);
  Jet b = cos(x) + 2.0;
  Jet q = (a * b) / b;
  for (int i = 0; i < Jet::kSize; ++i) CHECK(q.coeff(i) == doctest::Approx(a.coeff(i)).epsilon(1e-12));
}
