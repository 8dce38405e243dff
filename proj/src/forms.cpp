#include "curv/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace curv {

using form_detail::factorial;
using form_detail::levi_sign;

ParamForm scalar_form(const Vec& v) {
  ParamForm out(0, v.grade(), v.dim());
  out.c.at(0) = v;
  return out;
}

ParamForm dphi_form(const GeometryPoint& gp) {
  ParamForm out(1, 1, gp.m());
  for (int i = 0; i < kDim; ++i) out(i) = gp.dphi[i];
  return out;
}

ParamForm eta_form(const GeometryPoint& gp) {
  ParamForm out(2, 2, gp.m());
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      out(i, j) = i == j ? Vec(gp.m(), 2) : wedge(gp.dphi[i], gp.dphi[j]);
  return out;
}

ParamForm exterior_d(const GeometryPoint& gp, const ParamForm& a) {
  if (a.p >= kDim) throw std::invalid_argument("exterior_d: degree already maximal");
  ParamForm out = antisymmetrize(gp.nabla_flat(a.c), a.q, a.m);
  out *= double(a.p + 1);
  return out;
}

ParamForm codifferential(const GeometryPoint& gp, const ParamForm& a) {
  if (a.p == 0) throw std::invalid_argument("codifferential of a 0-form");
  ParamForm out(a.p - 1, a.q, a.m);
  out.c = gp.trace(gp.nabla_flat(a.c), 0, 1);
  return out;
}

ParamForm hodge(const GeometryPoint& gp, const ParamForm& a) {
  const int p = a.p, r = kDim - p;
  VecT up = gp.raise_all(a.c);
  ParamForm out(r, a.q, a.m);
  const double inv = 1.0 / factorial(p);
  for (std::size_t f = 0; f < out.c.size(); ++f) {
    auto o = out.c.unflatten(f);
    Vec acc(a.m, a.q);
    for (std::size_t g = 0; g < up.size(); ++g) {
      auto j = up.unflatten(g);
      std::array<int, 5> all{};
      for (int k = 0; k < r; ++k) all[k] = o[k];
      for (int k = 0; k < p; ++k) all[r + k] = j[k];
      const int s = levi_sign(all, kDim);
      if (s > 0)
        acc += up.at(g);
      else if (s < 0)
        acc -= up.at(g);
    }
    out.c.at(f) = acc * (gp.sqrt_det_g * inv);
  }
  return out;
}

ParamForm form_interior(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr) {
  return form_interior(gp.ginv, a, b, pr);
}

Vec form_inner(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr) {
  return form_inner(gp.ginv, a, b, pr);
}

ParamForm form_odot(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr) {
  return form_odot(gp.ginv, a, b, pr);
}

ParamForm form_normal(const GeometryPoint& gp, const ParamForm& a) {
  if (a.q != 1) throw std::invalid_argument("form_normal: needs vector values");
  ParamForm out = a;
  for (auto& v : out.c.data()) v = gp.normal(v);
  return out;
}

double max_abs(const ParamForm& a) { return max_abs(a.c); }

double max_abs(const PointForm& a) {
  double r = 0;
  for (const auto& v : a.c.data())
    for (double x : v.coeffs()) r = std::max(r, std::abs(x));
  return r;
}

PointForm values(const ParamForm& a) {
  PointForm out(a.p, a.q, a.m);
  for (std::size_t f = 0; f < a.c.size(); ++f) out.c.at(f) = values(a.c.at(f));
  return out;
}

ParamForm to_jets(const PointForm& a) {
  ParamForm out(a.p, a.q, a.m);
  for (std::size_t f = 0; f < a.c.size(); ++f)
    for (std::size_t i = 0; i < a.c.at(f).size(); ++i) out.c.at(f)[i] = Jet(a.c.at(f)[i]);
  return out;
}

Tensor<double> ginv_values(const GeometryPoint& gp) {
  Tensor<double> out(2);
  for (std::size_t f = 0; f < out.size(); ++f) out.at(f) = gp.ginv.at(f).value();
  return out;
}

ParamForm random_form(std::mt19937_64& rng, const Point4& u, int p, int q, int m, int order) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::array<Jet, 4> x;
  for (int k = 0; k < kDim; ++k) x[k] = Jet::variable(k, u[k], order);
  VecT t(p);
  for (auto& v : t.data()) {
    v = Vec(m, q);
    for (auto& c : v.coeffs()) {
      Jet acc = Jet::zero(order);
      for (int term = 0; term < 2; ++term) {
        Jet arg(3.0 * d(rng));
        for (int k = 0; k < kDim; ++k) arg += x[k] * d(rng);
        acc += sin(arg) * d(rng);
      }
      c = acc;
    }
  }
  return antisymmetrize(t, q, m);
}

ParamForm random_constant_form(std::mt19937_64& rng, int p, int q, int m) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VecT t(p);
  for (auto& v : t.data()) {
    v = Vec(m, q);
    for (auto& c : v.coeffs()) c = Jet(d(rng));
  }
  return antisymmetrize(t, q, m);
}

}  // namespace curv
