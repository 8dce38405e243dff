#include <random>

#include "curv/multivector.hpp"
#include "doctest.h"

using curv::Multivector;

namespace {

Multivector e(int m, int i) { return Multivector::basis(m, i); }

Multivector random_mv(int m, int grade, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Multivector r(m, grade);
  for (std::size_t b = 0; b < r.size(); ++b) r[b] = n(rng);
  return r;
}

// Antisymmetric matrix of a 2-vector.
std::vector<double> matrix(const Multivector& a) {
  const int m = a.dim();
  std::vector<double> A(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A[i * m + j] = a.component(i, j);
  return A;
}

}  // namespace

TEST_CASE("multivector: wedge basics") {
  const int m = 6;
  Multivector w = wedge(e(m, 1), e(m, 2));
  CHECK(w.component(1, 2) == 1.0);
  CHECK(w.component(2, 1) == -1.0);
  Multivector z = wedge(e(m, 1), e(m, 1));
  for (std::size_t b = 0; b < z.size(); ++b) CHECK(z[b] == 0.0);
  Multivector s = wedge(e(m, 1) + e(m, 2), e(m, 3));
  CHECK(s.component(1, 3) == 1.0);
  CHECK(s.component(2, 3) == 1.0);
  CHECK_THROWS_AS(wedge(w, w), curv::GradeError);
}

TEST_CASE("multivector: dot and interior on blades") {
  const int m = 5;
  Multivector a = wedge(e(m, 1), e(m, 2));
  CHECK(dot(a, a) == 1.0);
  CHECK(dot(a, wedge(e(m, 1), e(m, 3))) == 0.0);
  CHECK(dot(3.0 * e(m, 1), 3.0 * e(m, 1)) == 9.0);
  CHECK_THROWS_AS(dot(a, e(m, 1)), curv::GradeError);
  Multivector r1 = interior(a, e(m, 1));
  CHECK(r1[2] == 1.0);
  CHECK(r1[1] == 0.0);
  Multivector r2 = interior(a, e(m, 2));
  CHECK(r2[1] == -1.0);
  Multivector r3 = interior(a, e(m, 3));
  for (std::size_t b = 0; b < r3.size(); ++b) CHECK(r3[b] == 0.0);
}

TEST_CASE("multivector: bullet examples") {
  const int m = 6;
  Multivector a = wedge(e(m, 1), e(m, 2));
  Multivector r = bullet(a, wedge(e(m, 1), e(m, 3)));
  Multivector want = wedge(e(m, 2), e(m, 3));
  for (std::size_t b = 0; b < r.size(); ++b) CHECK(r[b] == doctest::Approx(want[b]));
  Multivector z = bullet(a, wedge(e(m, 3), e(m, 4)));
  for (std::size_t b = 0; b < z.size(); ++b) CHECK(z[b] == 0.0);
  Multivector self = bullet(a, a);
  for (std::size_t b = 0; b < self.size(); ++b) CHECK(self[b] == 0.0);
}

TEST_CASE("multivector: bullet equals the Leibniz expansion over basis pairs") {
  std::mt19937_64 rng(11);
  const int m = 7;
  for (int trial = 0; trial < 20; ++trial) {
    Multivector a = random_mv(m, 2, rng), b = random_mv(m, 2, rng);
    // brute force: b = sum_{i<j} b_ij e_i ^ e_j, a•(u^v) = (a⌐u)^v - (a⌐v)^u
    Multivector brute(m, 2);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double c = b.component(i, j);
        brute += (wedge(interior(a, e(m, i)), e(m, j)) - wedge(interior(a, e(m, j)), e(m, i))) * c;
      }
    Multivector fast = bullet(a, b);
    for (std::size_t k = 0; k < fast.size(); ++k) CHECK(fast[k] == doctest::Approx(brute[k]).epsilon(1e-12));
    // matrix commutator oracle: a•b <-> BA - AB
    auto A = matrix(a), B = matrix(b);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double c = 0;
        for (int k = 0; k < m; ++k) c += B[i * m + k] * A[k * m + j] - A[i * m + k] * B[k * m + j];
        CHECK(fast.component(i, j) == doctest::Approx(c).epsilon(1e-12));
      }
  }
}

TEST_CASE("multivector: algebraic properties on random inputs") {
  std::mt19937_64 rng(3);
  const int m = 8;
  for (int trial = 0; trial < 50; ++trial) {
    Multivector u = random_mv(m, 1, rng), v = random_mv(m, 1, rng), w = random_mv(m, 1, rng);
    Multivector a = random_mv(m, 2, rng), b = random_mv(m, 2, rng);
    // graded anticommutativity and associativity
    Multivector uv = wedge(u, v), vu = wedge(v, u);
    for (std::size_t k = 0; k < uv.size(); ++k) CHECK(uv[k] == doctest::Approx(-vu[k]));
    Multivector l = wedge(wedge(u, v), w), r = wedge(u, wedge(v, w));
    for (std::size_t k = 0; k < l.size(); ++k) CHECK(l[k] == doctest::Approx(r[k]).epsilon(1e-12));
    Multivector au = wedge(a, u), ua = wedge(u, a);
    for (std::size_t k = 0; k < au.size(); ++k) CHECK(au[k] == doctest::Approx(ua[k]));
    // Gram identity
    CHECK(dot(uv, uv) ==
          doctest::Approx(dot(u, u) * dot(v, v) - dot(u, v) * dot(u, v)).epsilon(1e-12));
    // bullet anticommutes, dot commutes
    Multivector ab = bullet(a, b), ba = bullet(b, a);
    for (std::size_t k = 0; k < ab.size(); ++k) CHECK(ab[k] == doctest::Approx(-ba[k]).epsilon(1e-12));
    CHECK(dot(a, b) == doctest::Approx(dot(b, a)));
    // interior adjoint to wedge
    CHECK(dot(interior(a, u), w) == doctest::Approx(dot(a, wedge(u, w))).epsilon(1e-12));
    // grade-3 interior adjoint to wedge with a 2-vector
    Multivector t = random_mv(m, 3, rng);
    CHECK(dot(interior(t, a), w) == doctest::Approx(dot(t, wedge(a, w))).epsilon(1e-12));
  }
}
