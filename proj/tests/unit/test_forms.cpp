#include <cmath>
#include <random>

#include "curv/forms.hpp"
#include "doctest.h"

using namespace curv;

namespace {

// A smooth random field: sum of a few sin(w . u + phase) jets about the point u.
struct RandomJets {
  std::mt19937_64 rng;
  Point4 u;
  explicit RandomJets(std::uint64_t seed, Point4 at) : rng(seed), u(at) {}

  Jet next() {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Jet acc(0.0);
    for (int t = 0; t < 2; ++t) {
      Jet arg(d(rng) * 3.0);
      for (int k = 0; k < 4; ++k) arg += Jet::variable(k, u[k]) * d(rng);
      acc += sin(arg) * d(rng);
    }
    return acc;
  }
  Vec vec(int m, int q) {
    Vec v(m, q);
    for (auto& c : v.coeffs()) c = next();
    return v;
  }
};

ParamForm random_form(RandomJets& r, int p, int q, int m) {
  VecT t(p);
  for (auto& v : t.data()) v = r.vec(m, q);
  return antisymmetrize(t, q, m);
}

double form_diff(const ParamForm& a, const ParamForm& b) { return max_abs(a - b); }

}  // namespace

TEST_CASE("forms: antisymmetrize is a projection") {
  GeometryPoint gp = geometry_at(preset_flat(5), {0.1, 0.2, 0.3, 0.4});
  RandomJets r(3, {0.1, 0.2, 0.3, 0.4});
  ParamForm a = random_form(r, 3, 1, 5);
  CHECK(form_diff(antisymmetrize(a.c, 1, 5), a) <= 1e-15);
  CHECK(max_abs(a(0, 0, 1)) == 0.0);
  CHECK(max_abs(a(0, 1, 2) + a(1, 0, 2)) <= 1e-15);
  CHECK(max_abs(a(0, 1, 2) - a(1, 2, 0)) <= 1e-15);
}

TEST_CASE("forms: d of d vanishes") {
  ImmersionPatch p = perturb_normal(preset_clifford_torus(1.0), 0.05, 4);
  Point4 u = p.sample(1, 0);
  GeometryPoint gp = geometry_at(p, u);
  RandomJets r(11, u);
  for (int deg = 0; deg <= 2; ++deg) {
    ParamForm a = random_form(r, deg, 1, p.m);
    ParamForm dd = exterior_d(gp, exterior_d(gp, a));
    CHECK(max_abs(dd) <= 1e-10 * std::max(1.0, max_abs(a)));
  }
}

TEST_CASE("forms: double Hodge star sign") {
  ImmersionPatch p = perturb_normal(preset_sphere(1.0), 0.05, 2);
  GeometryPoint gp = geometry_at(p, p.sample(2, 1), 2);
  RandomJets r(5, p.sample(2, 1));
  for (int deg = 0; deg <= 4; ++deg) {
    ParamForm a = random_form(r, deg, 2, p.m);
    ParamForm ss = hodge(gp, hodge(gp, a));
    const double sign = (deg * (4 - deg)) % 2 ? -1.0 : 1.0;
    CHECK(form_diff(ss, a * sign) <= 1e-12 * max_abs(a));
  }
}

TEST_CASE("forms: codifferential of a constant 1-form on the flat plane") {
  GeometryPoint gp = geometry_at(preset_flat(5), {0.5, 0.5, 0.5, 0.5});
  ParamForm a(1, 1, 5);
  for (int i = 0; i < 4; ++i) a(i) = Vec::basis(5, i) * Jet(1.0 + i);
  CHECK(max_abs(codifferential(gp, a)) == 0.0);
  CHECK(max_abs(exterior_d(gp, a)) == 0.0);
}

TEST_CASE("forms: codifferential is minus the adjoint of d up to a divergence") {
  // On the flat plane <dA, B> - <A, -d*B> = nabla^i (A . B)_i for a 0-form A and 1-form B.
  GeometryPoint gp = geometry_at(preset_flat(5), {0.2, 0.1, 0.4, 0.3});
  RandomJets r(8, {0.2, 0.1, 0.4, 0.3});
  ParamForm a = random_form(r, 0, 0, 5), b = random_form(r, 1, 0, 5);
  Vec lhs = form_inner(gp, exterior_d(gp, a), b, Pairing::Scale);
  Vec rhs = form_inner(gp, a, codifferential(gp, b), Pairing::Scale) * -1.0;
  ParamForm ab(1, 0, 5);
  for (int i = 0; i < 4; ++i) ab(i) = b(i) * a.c.at(0)[0];
  Vec div = codifferential(gp, ab)(0);
  CHECK(std::abs((lhs - rhs - div)[0].value()) <= 1e-13);
}

TEST_CASE("forms: interior is adjoint to wedge") {
  ImmersionPatch p = perturb_normal(preset_s2xs2(1.0, 1.3), 0.05, 6);
  GeometryPoint gp = geometry_at(p, p.sample(4, 2), 2);
  RandomJets r(9, p.sample(4, 2));
  ParamForm a = random_form(r, 2, 0, p.m), b = random_form(r, 1, 0, p.m), w = random_form(r, 1, 0, p.m);
  // <A ⌐ B, W> = <A, B ^ W> with B in the leading slot.
  Vec lhs = form_inner(gp, form_interior(gp, a, b, Pairing::Scale), w, Pairing::Scale);
  Vec rhs = form_inner(gp, a, form_wedge(b, w, Pairing::Scale), Pairing::Scale);
  CHECK(lhs[0].value() == doctest::Approx(rhs[0].value()).epsilon(1e-12));
}

TEST_CASE("forms: eta is dPhi wedge dPhi") {
  ImmersionPatch p = perturb_normal(preset_clifford_torus(1.0), 0.05, 4);
  GeometryPoint gp = geometry_at(p, p.sample(3, 0), 2);
  ParamForm dp = dphi_form(gp);
  ParamForm half = form_wedge(dp, dp, Pairing::Wedge) * 0.5;
  CHECK(form_diff(half, eta_form(gp)) <= 1e-14 * max_abs(half));
  // <eta, eta> = (1/2) (tr(g)^2 - |g|^2) in the 1/p! normalization = 6 for g = id.
  GeometryPoint flat = geometry_at(preset_flat(5), {0, 0, 0, 0}, 2);
  ParamForm e = eta_form(flat);
  CHECK(form_inner(flat, e, e, Pairing::Dot)[0].value() == doctest::Approx(6.0));
}

TEST_CASE("forms: odot of scalar 2-forms is antisymmetric and matches the index formula") {
  GeometryPoint gp = geometry_at(preset_flat(5), {0, 0, 0, 0}, 2);
  RandomJets r(12, {0, 0, 0, 0});
  ParamForm a = random_form(r, 2, 0, 5), b = random_form(r, 2, 0, 5);
  ParamForm o = form_odot(gp, a, b, Pairing::Scale);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double want = 0;
      for (int k = 0; k < 4; ++k)
        want += a(j, k)[0].value() * b(k, i)[0].value() - a(i, k)[0].value() * b(k, j)[0].value();
      CHECK(o(i, j)[0].value() == doctest::Approx(want).epsilon(1e-13));
      CHECK(std::abs(o(i, j)[0].value() + o(j, i)[0].value()) <= 1e-14);
    }
}

TEST_CASE("forms: degree errors") {
  GeometryPoint gp = geometry_at(preset_flat(5), {0, 0, 0, 0}, 2);
  CHECK_THROWS(codifferential(gp, ParamForm(0, 1, 5)));
  CHECK_THROWS(exterior_d(gp, ParamForm(4, 1, 5)));
  CHECK_THROWS(form_interior(gp, ParamForm(1, 1, 5), ParamForm(2, 1, 5), Pairing::Dot));
  CHECK_THROWS(ParamForm(5, 0, 5));
}
