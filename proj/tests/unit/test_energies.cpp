#include <chrono>
#include <cmath>

#include "curv/energies.hpp"
#include "doctest.h"

using namespace curv;

namespace {
}

TEST_CASE("energies: Gauss-Legendre weights and exactness") {
  std::vector<double> x, w;
  gauss_legendre(7, 0.0, 2.0, x, w);
  double s = 0, p = 0;
  for (int i = 0; i < 7; ++i) {
    CHECK(w[i] > 0);
    s += w[i];
    p += w[i] * std::pow(x[i], 13);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p == doctest::Approx(std::pow(2.0, 14) / 14).epsilon(1e-13));
}

TEST_CASE("energies: grid weights sum to the domain measure") {
  ImmersionPatch p = preset_sphere(1.0);
  QuadratureGrid g = make_grid(p, 6);
  double vol = 1;
  for (int a = 0; a < 4; ++a) {
    double s = 0;
    for (double w : g.weights[a]) s += w;
    CHECK(s == doctest::Approx(p.hi[a] - p.lo[a]).epsilon(1e-12));
    vol *= s;
  }
  CHECK(g.size() == 6 * 6 * 6 * 6);
}

TEST_CASE("energies: flat plane densities vanish") {
  EnergyDensity e = density(geometry_at(preset_flat(5), {0.5, 0.5, 0.5, 0.5}, 3));
  for (DensityKind k : all_densities()) CHECK(e.get(k) == 0.0);
}

TEST_CASE("energies: sphere closed-form densities") {
  for (double r : {0.5, 1.0, 2.0}) {
    ImmersionPatch p = preset_sphere(r);
    EnergyDensity e = density(geometry_at(p, p.sample(3, 0), 3));
    const double r4 = std::pow(r, 4);
    CHECK(e.ea * r4 == doctest::Approx(3.0).epsilon(1e-11));
    CHECK(e.ec * r4 == doctest::Approx(36.0).epsilon(1e-11));
    CHECK(e.cgb * r4 == doctest::Approx(24.0).epsilon(1e-11));
    CHECK(std::abs(e.w2) * r4 <= 1e-11);
    CHECK(std::abs(e.q_h0_4) * r4 <= 1e-20);
  }
}

TEST_CASE("energies: |W|^2 agrees with the quartic combination") {
  for (const char* which : {"torus", "s2xs2", "sphere"}) {
    ImmersionPatch p = perturb_normal(preset(which), 0.08, 4);
    for (int k = 0; k < 5; ++k) {
      EnergyDensity e = density(geometry_at(p, p.sample(2, k), 3));
      CHECK(e.w2 == doctest::Approx(w2_quartic(e)).epsilon(1e-9));
      CHECK(e.w2 >= 0);
    }
  }
}

TEST_CASE("energies: Simons pointwise chain") {
  ImmersionPatch s = preset_sphere(1.5);
  SimonsResidual r = simons_pointwise_residual(geometry_at(s, s.sample(1, 1), 4));
  CHECK(r.residual <= 1e-9 / std::pow(1.5, 4));
  for (const char* which : {"torus", "s2xs2", "sphere"}) {
    ImmersionPatch p = perturb_normal(preset(which), 0.05, 9);
    for (int k = 0; k < 4; ++k) {
      SimonsResidual q = simons_pointwise_residual(geometry_at(p, p.sample(6, k), 4));
      CHECK(q.residual <= 1e-8 * q.scale);
    }
  }
}

TEST_CASE("energies: sphere integrals and timing") {
  ImmersionPatch p = preset_sphere(1.0);
  auto t0 = std::chrono::steady_clock::now();
  EnergyIntegrals e = integrate_all(p, make_grid(p, {12, 12, 12, 2}));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("S4 grid 12^3x2: " << secs << " s");
  CHECK(e.get(DensityKind::EA) / kPi2 == doctest::Approx(8.0).epsilon(1e-10));
  CHECK(e.get(DensityKind::EC) / kPi2 == doctest::Approx(96.0).epsilon(1e-10));
  CHECK(e.get(DensityKind::CGB) / kPi2 == doctest::Approx(64.0).epsilon(1e-10));
  SimidResult s = simid_from(e, 2);
  CHECK(s.lhs / kPi2 == doctest::Approx(32.0).epsilon(1e-10));
  CHECK(s.rhs / kPi2 == doctest::Approx(32.0).epsilon(1e-10));
  CHECK_THROWS(integrate_all(preset_flat(5), make_grid(preset_flat(5), 2)));
}
