#include <cmath>

#include "curv/patch.hpp"
#include "doctest.h"

using namespace curv;

namespace {

double first_deriv(const Jet& j, int k) {
  std::array<int, 4> a{};
  a[k] = 1;
  return j.derivative(a);
}

}  // namespace

TEST_CASE("patch: flat plane jets") {
  ImmersionPatch p = preset_flat(6);
  JetVec x = eval_jet(p, {0.2, 0.3, 0.4, 0.5});
  REQUIRE(x.size() == 6);
  for (int c = 0; c < 6; ++c) {
    for (int k = 0; k < 4; ++k) CHECK(first_deriv(x[c], k) == (c == k ? 1.0 : 0.0));
    for (int i = Jet::count(1); i < Jet::kSize; ++i) CHECK(x[c].coeff(i) == 0.0);
  }
}

TEST_CASE("patch: sphere chart lies on the sphere") {
  for (double r : {0.5, 1.0, 2.0}) {
    ImmersionPatch p = preset_sphere(r);
    for (int k = 0; k < 10; ++k) {
      JetVec x = eval_jet(p, p.sample(1, k));
      double s = 0;
      for (const auto& c : x) s += c.value() * c.value();
      CHECK(std::sqrt(s) == doctest::Approx(r).epsilon(1e-12));
    }
  }
}

TEST_CASE("patch: periodic axes match across the period") {
  for (const char* name : {"sphere", "torus", "s2xs2"}) {
    ImmersionPatch p = preset(name);
    Point4 u = p.sample(5, 0);
    for (int k = 0; k < 4; ++k) {
      if (p.axes[k] != AxisKind::Periodic) continue;
      Point4 v = u;
      v[k] += p.hi[k] - p.lo[k];
      JetVec a = eval_jet(p, u, 1), b = eval_jet(p, v, 1);
      for (std::size_t c = 0; c < a.size(); ++c) CHECK(std::abs(a[c].value() - b[c].value()) <= 1e-12);
    }
  }
}

TEST_CASE("patch: jet derivatives agree with central differences on presets") {
  const double h = 1e-3;
  for (const char* name : {"sphere", "torus", "s2xs2", "helicoid"}) {
    ImmersionPatch p = preset(name);
    Point4 u = p.sample(2, 3);
    JetVec x = eval_jet(p, u);
    auto val = [&](Point4 v, int c) { return eval_jet(p, v, 1)[c].value(); };
    for (int c = 0; c < p.m; ++c)
      for (int k = 0; k < 4; ++k) {
        Point4 up = u, dn = u;
        up[k] += h;
        dn[k] -= h;
        double fd = (val(up, c) - val(dn, c)) / (2 * h);
        double fd2 = (val(up, c) - 2 * x[c].value() + val(dn, c)) / (h * h);
        std::array<int, 4> a{}, b{};
        a[k] = 1;
        b[k] = 2;
        double scale = 1 + std::abs(x[c].derivative(a));
        CHECK(std::abs(x[c].derivative(a) - fd) <= 1e-5 * scale);
        CHECK(std::abs(x[c].derivative(b) - fd2) <= 1e-5 * (1 + std::abs(fd2)));
      }
  }
}

TEST_CASE("patch: immersion failure is detected") {
  ImmersionPatch p = preset_flat(5);
  p.chart = [](const JetPoint& u) {
    JetVec x(5, Jet(0.0));
    x[0] = u[0];
    x[1] = u[0];
    x[2] = u[2];
    x[3] = u[3];
    return x;
  };
  CHECK_THROWS_AS(eval_jet(p, {0.5, 0.5, 0.5, 0.5}), ImmersionError);

  // parallel, non-zero columns
  p.chart = [](const JetPoint& u) {
    JetVec x(5, Jet(0.0));
    x[0] = u[0] + u[1] * 2.0;
    x[2] = u[2];
    x[3] = u[3];
    return x;
  };
  CHECK_THROWS_AS(eval_jet(p, {0.5, 0.5, 0.5, 0.5}), ImmersionError);

  // short but orthogonal columns next to a pole of the polar chart are fine
  ImmersionPatch s = preset_sphere(1.0);
  CHECK_NOTHROW(eval_jet(s, {0.005, 0.005, 0.005, 1.0}));
}

TEST_CASE("patch: perturbation is deterministic and zero amplitude is identity") {
  ImmersionPatch base = preset_clifford_torus(1.0);
  ImmersionPatch z = perturb_normal(base, 0.0, 7);
  ImmersionPatch a = perturb_normal(base, 1e-2, 7), b = perturb_normal(base, 1e-2, 7);
  Point4 u = base.sample(9, 1);
  JetVec x0 = eval_jet(base, u), xz = eval_jet(z, u), xa = eval_jet(a, u), xb = eval_jet(b, u);
  for (int c = 0; c < base.m; ++c)
    for (int i = 0; i < Jet::kSize; ++i) {
      CHECK(xz[c].coeff(i) == x0[c].coeff(i));
      CHECK(xa[c].coeff(i) == xb[c].coeff(i));
    }
}

TEST_CASE("patch: perturbed torus keeps the Gram determinant within 10 percent") {
  ImmersionPatch base = preset_clifford_torus(1.0);
  ImmersionPatch p = perturb_normal(base, 1e-2, 3);
  auto gram_det = [](const JetVec& x) {
    double g[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        g[i][j] = 0;
        for (const auto& c : x) g[i][j] += c.coeff(1 + i) * c.coeff(1 + j);
      }
    double det = 1;
    for (int c = 0; c < 4; ++c) {
      det *= g[c][c];
      for (int r = c + 1; r < 4; ++r) {
        double f = g[r][c] / g[c][c];
        for (int k = c; k < 4; ++k) g[r][k] -= f * g[c][k];
      }
    }
    return det;
  };
  for (int k = 0; k < 20; ++k) {
    Point4 u = base.sample(4, k);
    double d0 = gram_det(eval_jet(base, u, 1)), d1 = gram_det(eval_jet(p, u, 1));
    CHECK(std::abs(d1 / d0 - 1) <= 0.1);
  }
}

TEST_CASE("patch: Moebius maps") {
  ImmersionPatch flat = preset_flat(5);
  ImmersionPatch big = apply_moebius(MoebiusMap().dilate(2.0), flat);
  JetVec x = eval_jet(big, {0.5, 0.5, 0.5, 0.5});
  CHECK(first_deriv(x[0], 0) == doctest::Approx(2.0));

  MoebiusMap inv;
  inv.invert({0, 0, 0, 0, 0});
  std::vector<double> y = inv.apply(std::vector<double>{2, 0, 0, 0, 0});
  CHECK(y[0] == doctest::Approx(0.5));

  // inversion is an involution at jet level
  ImmersionPatch s = preset_sphere(1.0);
  MoebiusMap twice;
  twice.invert({3, 0, 0, 0, 0}).invert({3, 0, 0, 0, 0});
  ImmersionPatch back = apply_moebius(twice, s);
  Point4 u = s.sample(1, 2);
  JetVec a = eval_jet(s, u), b = eval_jet(back, u);
  for (int c = 0; c < 5; ++c)
    for (int i = 0; i < Jet::kSize; ++i) CHECK(std::abs(a[c].coeff(i) - b[c].coeff(i)) <= 1e-10);

  // a center on the surface is rejected
  MoebiusMap bad;
  bad.invert({1, 0, 0, 0, 0});
  CHECK_THROWS_AS(apply_moebius(bad, s), ImmersionError);

  // rotations must be orthogonal
  CHECK_THROWS(MoebiusMap().rotate({{1, 0.1}, {0, 1}}));
}
