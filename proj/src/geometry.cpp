#include "curv/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace curv {

Vec partial(const Vec& v, int k) {
  Vec r(v.dim(), v.grade());
  for (std::size_t b = 0; b < v.size(); ++b) r[b] = partial(v[b], k);
  return r;
}

Vec make_vec(const JetVec& x) { return Vec::vector(x); }

Vec zero_vec(int m, int grade) { return Vec(m, grade); }

double value_norm(const Vec& v) {
  double s = 0;
  for (std::size_t b = 0; b < v.size(); ++b) s += v[b].value() * v[b].value();
  return std::sqrt(s);
}

Multivector values(const Vec& v) {
  std::vector<double> c(v.size());
  for (std::size_t b = 0; b < v.size(); ++b) c[b] = v[b].value();
  return Multivector(v.dim(), v.grade(), std::move(c));
}

namespace {

Jet value_dot(const Jet& a, const Jet& b) { return a * b; }
Jet value_dot(const Vec& a, const Vec& b) { return dot(a, b); }

template <class V>
Tensor<V> nabla_impl(const ScalarT& gamma, const Tensor<V>& t) {
  const int r = t.rank();
  Tensor<V> out(r + 1);
  for (std::size_t f = 0; f < t.size(); ++f) {
    auto idx = t.unflatten(f);
    for (int j = 0; j < kDim; ++j) {
      V acc = partial(t.at(f), j);
      for (int s = 0; s < r; ++s) {
        auto jdx = idx;
        for (int l = 0; l < kDim; ++l) {
          jdx[s] = l;
          acc -= t.at(t.flatten(jdx)) * gamma(l, j, idx[s]);
        }
      }
      out.at(std::size_t(j) * t.size() + f) = std::move(acc);
    }
  }
  return out;
}

template <class V>
Tensor<V> trace_impl(const ScalarT& ginv, const Tensor<V>& t, int s1, int s2) {
  const int r = t.rank();
  if (s1 >= s2 || s2 >= r) throw std::invalid_argument("trace: bad slots");
  Tensor<V> out(r - 2);
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto o = out.unflatten(f);
    std::array<int, 5> idx{};
    int p = 0;
    for (int s = 0; s < r; ++s)
      if (s != s1 && s != s2) idx[s] = o[p++];
    V acc{};
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        idx[s1] = a;
        idx[s2] = b;
        acc += t.at(t.flatten(idx)) * ginv(a, b);
      }
    out.at(f) = std::move(acc);
  }
  return out;
}

template <class V>
Tensor<V> raise_impl(const ScalarT& ginv, const Tensor<V>& t) {
  Tensor<V> cur = t;
  for (int s = 0; s < t.rank(); ++s) {
    Tensor<V> nxt(t.rank());
    for (std::size_t f = 0; f < cur.size(); ++f) {
      auto idx = cur.unflatten(f);
      const int i = idx[s];
      V acc{};
      for (int a = 0; a < kDim; ++a) {
        idx[s] = a;
        acc += cur.at(cur.flatten(idx)) * ginv(i, a);
      }
      nxt.at(f) = std::move(acc);
    }
    cur = std::move(nxt);
  }
  return cur;
}

}  // namespace

GeometryPoint::GeometryPoint(const JetVec& phi) : m_(int(phi.size())) {
  if (m_ < 5) throw std::invalid_argument("geometry: ambient dimension must be at least 5");
  order_ = phi[0].deg();
  if (order_ < 2) throw DepthError("geometry needs Phi through order 2");
  Vec p = make_vec(phi);
  for (int i = 0; i < kDim; ++i) dphi[i] = partial(p, i);
  d2phi = VecT(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      d2phi(i, j) = partial(dphi[i], j);
      if (j != i) d2phi(j, i) = d2phi(i, j);
    }
  g = ScalarT(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) g(i, j) = g(j, i) = dot(dphi[i], dphi[j]);

  // Gauss-Jordan on the (positive definite) Gram matrix; no pivoting needed.
  std::array<std::array<Jet, 8>, 4> aug;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < 2 * kDim; ++j)
      aug[i][j] = j < kDim ? g(i, j) : Jet(j - kDim == i ? 1.0 : 0.0);
  Jet det(1.0);
  for (int c = 0; c < kDim; ++c) {
    if (!(aug[c][c].value() > 0)) throw ImmersionError("metric is not positive definite");
    det *= aug[c][c];
    Jet inv = reciprocal(aug[c][c]);
    for (int j = 0; j < 2 * kDim; ++j) aug[c][j] *= inv;
    for (int r = 0; r < kDim; ++r) {
      if (r == c) continue;
      Jet f = aug[r][c];
      for (int j = 0; j < 2 * kDim; ++j) aug[r][j] -= f * aug[c][j];
    }
  }
  ginv = ScalarT(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) ginv(i, j) = aug[i][j + kDim];
  sqrt_det_g = sqrt(det);

  // Gamma^k_ij = g^kl (d_l Phi . d_i d_j Phi).
  ScalarT low(3);
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) low(l, i, j) = low(l, j, i) = dot(dphi[l], d2phi(i, j));
  gamma = ScalarT(3);
  for (int k = 0; k < kDim; ++k)
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) {
        Jet s(0.0);
        for (int l = 0; l < kDim; ++l) s += ginv(k, l) * low(l, i, j);
        gamma(k, i, j) = gamma(k, j, i) = s;
      }

  for (int a = 0; a < kDim; ++a) {
    Vec v = dphi[a];
    for (int b = 0; b < a; ++b) v -= frame[b] * dot(frame[b], v);
    frame[a] = v * reciprocal(sqrt(dot(v, v)));
  }

  h = VecT(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      h(i, j) = normal(d2phi(i, j));
      if (j != i) h(j, i) = h(i, j);
    }
  H = zero_vec(m_);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) H += h(i, j) * ginv(i, j);
  H *= 0.25;
  h0 = VecT(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) h0(i, j) = h(i, j) - H * g(i, j);
}

Jet cap(const Jet& x, int d) { return x.deg() > d ? x.truncated(d) : x; }

Vec cap(const Vec& v, int d) {
  Vec r = v;
  for (auto& c : r.coeffs()) c = cap(c, d);
  return r;
}

ScalarT cap(const ScalarT& t, int d) {
  ScalarT r = t;
  for (auto& c : r.data()) c = cap(c, d);
  return r;
}

VecT cap(const VecT& t, int d) {
  VecT r = t;
  for (auto& c : r.data()) c = cap(c, d);
  return r;
}

GeometryPoint GeometryPoint::capped(int d) const {
  DH();
  LapH();
  Hh();
  GeometryPoint r = *this;
  for (auto& v : r.dphi) v = cap(v, d);
  for (auto& v : r.frame) v = cap(v, d);
  r.d2phi = cap(d2phi, d);
  r.g = cap(g, d);
  r.ginv = cap(ginv, d);
  r.sqrt_det_g = cap(sqrt_det_g, d);
  r.gamma = cap(gamma, d);
  r.h = cap(h, d);
  r.H = cap(H, d);
  r.h0 = cap(h0, d);
  r.dH_cache_ = cap(*dH_cache_, d);
  r.lap_cache_ = cap(*lap_cache_, d);
  r.hh_cache_ = cap(*hh_cache_, d);
  if (dh_cache_) r.dh_cache_ = cap(*dh_cache_, d);
  return r;
}

GeometryPoint geometry_at(const ImmersionPatch& patch, const Point4& u, int order) {
  return GeometryPoint(eval_jet(patch, u, order));
}

Vec GeometryPoint::normal(const Vec& v) const {
  Vec r = v;
  for (int a = 0; a < kDim; ++a) r -= frame[a] * dot(frame[a], v);
  return r;
}

Vec GeometryPoint::normal_metric(const Vec& v) const {
  std::array<Jet, 4> c;
  for (int k = 0; k < kDim; ++k) c[k] = dot(v, dphi[k]);
  Vec r = v;
  for (int l = 0; l < kDim; ++l) {
    Jet s(0.0);
    for (int k = 0; k < kDim; ++k) s += ginv(k, l) * c[k];
    r -= dphi[l] * s;
  }
  return r;
}

Vec GeometryPoint::dphi_up(int i) const {
  Vec r = zero_vec(m_);
  for (int j = 0; j < kDim; ++j) r += dphi[j] * ginv(i, j);
  return r;
}

ScalarT GeometryPoint::nabla(const ScalarT& t) const { return nabla_impl(gamma, t); }

VecT GeometryPoint::nabla_flat(const VecT& t) const { return nabla_impl(gamma, t); }

VecT GeometryPoint::nabla_normal(const VecT& t) const {
  VecT r = nabla_impl(gamma, t);
  for (auto& v : r.data()) v = normal(v);
  return r;
}

ScalarT GeometryPoint::trace(const ScalarT& t, int s1, int s2) const {
  return trace_impl(ginv, t, s1, s2);
}
VecT GeometryPoint::trace(const VecT& t, int s1, int s2) const {
  return trace_impl(ginv, t, s1, s2);
}
ScalarT GeometryPoint::raise_all(const ScalarT& t) const { return raise_impl(ginv, t); }
VecT GeometryPoint::raise_all(const VecT& t) const { return raise_impl(ginv, t); }

Jet GeometryPoint::full_dot(const ScalarT& a, const ScalarT& b) const {
  ScalarT up = raise_all(b);
  Jet s(0.0);
  for (std::size_t f = 0; f < a.size(); ++f) s += value_dot(a.at(f), up.at(f));
  return s;
}

Jet GeometryPoint::full_dot(const VecT& a, const VecT& b) const {
  VecT up = raise_all(b);
  Jet s(0.0);
  for (std::size_t f = 0; f < a.size(); ++f) s += value_dot(a.at(f), up.at(f));
  return s;
}

const VecT& GeometryPoint::DH() const {
  if (!dH_cache_) {
    VecT h0t(0);
    h0t.at(0) = H;
    dH_cache_ = nabla_normal(h0t);
  }
  return *dH_cache_;
}

const Vec& GeometryPoint::LapH() const {
  if (!lap_cache_) lap_cache_ = trace(nabla_normal(DH()), 0, 1).at(0);
  return *lap_cache_;
}

const VecT& GeometryPoint::Dh() const {
  if (!dh_cache_) dh_cache_ = nabla_normal(h);
  return *dh_cache_;
}

const ScalarT& GeometryPoint::Hh() const {
  if (!hh_cache_) {
    ScalarT t(2);
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j) t(i, j) = t(j, i) = dot(H, h(i, j));
    hh_cache_ = std::move(t);
  }
  return *hh_cache_;
}

ScalarT kulkarni_nomizu(const ScalarT& a, const ScalarT& b) {
  ScalarT r(4);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l)
          r(i, j, k, l) = a(i, k) * b(j, l) + a(j, l) * b(i, k) - a(i, l) * b(j, k) -
                          a(j, k) * b(i, l);
  return r;
}

ScalarT kulkarni_nomizu_dot(const VecT& a, const VecT& b) {
  ScalarT ab(4);  // (a_ij . b_kl)
  for (std::size_t f = 0; f < ab.size(); ++f) {
    auto x = ab.unflatten(f);
    ab.at(f) = dot(a(x[0], x[1]), b(x[2], x[3]));
  }
  ScalarT r(4);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l)
          r(i, j, k, l) = ab(i, k, j, l) + ab(j, l, i, k) - ab(i, l, j, k) - ab(j, k, i, l);
  return r;
}

CurvatureSet curvature_extrinsic(const GeometryPoint& gp) {
  CurvatureSet cs;
  cs.Rm = ScalarT(4);
  ScalarT hh(4);
  for (std::size_t f = 0; f < hh.size(); ++f) {
    auto x = hh.unflatten(f);
    if (x[0] > x[1] || x[2] > x[3] || 4 * x[0] + x[1] > 4 * x[2] + x[3]) continue;
    Jet v = dot(gp.h(x[0], x[1]), gp.h(x[2], x[3]));
    hh(x[0], x[1], x[2], x[3]) = hh(x[1], x[0], x[2], x[3]) = hh(x[0], x[1], x[3], x[2]) =
        hh(x[1], x[0], x[3], x[2]) = v;
    hh(x[2], x[3], x[0], x[1]) = hh(x[3], x[2], x[0], x[1]) = hh(x[2], x[3], x[1], x[0]) =
        hh(x[3], x[2], x[1], x[0]) = v;
  }
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) cs.Rm(i, j, k, l) = hh(i, k, j, l) - hh(i, l, j, k);
  cs.Ric = gp.trace(cs.Rm, 1, 3);
  cs.R = gp.trace(cs.Ric, 0, 1).at(0);
  cs.P = ScalarT(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) cs.P(i, j) = cs.Ric(i, j) - cs.R * gp.g(i, j) / 6.0;
  ScalarT pg = kulkarni_nomizu(cs.P, gp.g);
  cs.W = ScalarT(4);
  for (std::size_t f = 0; f < pg.size(); ++f) cs.W.at(f) = cs.Rm.at(f) - 0.5 * pg.at(f);
  return cs;
}

ScalarT curvature_intrinsic(const GeometryPoint& gp) {
  // Christoffels from first derivatives of the metric only.
  ScalarT dg(3);  // dg(m, j, k) = d_m g_jk
  for (int mm = 0; mm < kDim; ++mm)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) dg(mm, j, k) = partial(gp.g(j, k), mm);
  ScalarT G(3);
  for (int l = 0; l < kDim; ++l)
    for (int j = 0; j < kDim; ++j)
      for (int k = j; k < kDim; ++k) {
        Jet s(0.0);
        for (int mm = 0; mm < kDim; ++mm)
          s += gp.ginv(l, mm) * (dg(j, mm, k) + dg(k, mm, j) - dg(mm, j, k));
        G(l, j, k) = G(l, k, j) = 0.5 * s;
      }
  ScalarT dG(4);  // dG(i, l, j, k) = d_i Gamma^l_jk
  for (std::size_t f = 0; f < G.size(); ++f) {
    auto x = G.unflatten(f);
    for (int i = 0; i < kDim; ++i) dG(i, x[0], x[1], x[2]) = partial(G.at(f), i);
  }
  ScalarT Rup(4);  // Rup(l, i, j, k) = R^l_ijk
  for (int l = 0; l < kDim; ++l)
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) {
          Jet s = dG(i, l, j, k) - dG(j, l, i, k);
          for (int mm = 0; mm < kDim; ++mm) s += G(l, i, mm) * G(mm, j, k) - G(l, j, mm) * G(mm, i, k);
          Rup(l, i, j, k) = s;
        }
  ScalarT Rm(4);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          Jet s(0.0);
          for (int mm = 0; mm < kDim; ++mm) s += gp.g(k, mm) * Rup(mm, i, j, l);
          Rm(i, j, k, l) = s;
        }
  return Rm;
}

namespace {

ScalarT h0_square(const GeometryPoint& gp) {
  ScalarT r(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j) {
      Jet s(0.0);
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) s += gp.ginv(k, l) * dot(gp.h0(i, k), gp.h0(l, j));
      r(i, j) = r(j, i) = s;
    }
  return r;
}

ScalarT weyl_combination(const GeometryPoint& gp, double c_sq, double c_norm) {
  ScalarT sq = h0_square(gp);
  Jet n = gp.trace(sq, 0, 1).at(0);
  ScalarT a = kulkarni_nomizu_dot(gp.h0, gp.h0);
  ScalarT b = kulkarni_nomizu(sq, gp.g);
  ScalarT c = kulkarni_nomizu(gp.g, gp.g);
  ScalarT w(4);
  for (std::size_t f = 0; f < w.size(); ++f)
    w.at(f) = 0.5 * a.at(f) + c_sq * b.at(f) + c_norm * n * c.at(f);
  return w;
}

}  // namespace

ScalarT weyl_extrinsic(const GeometryPoint& gp) { return weyl_combination(gp, 0.5, -1.0 / 12.0); }

ScalarT weyl_extrinsic_as_printed(const GeometryPoint& gp) {
  return weyl_combination(gp, -0.5, -1.0 / 6.0);
}

ScalarT cotton(const GeometryPoint& gp, const CurvatureSet& cs) {
  ScalarT dP = gp.nabla(cs.P);
  ScalarT c(3);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int k = 0; k < kDim; ++k) c(a, b, k) = dP(a, b, k) - dP(b, a, k);
  return c;
}

ScalarT weyl_divergence(const GeometryPoint& gp, const CurvatureSet& cs) {
  ScalarT dW = gp.nabla(cs.W);  // (j, i, c, a, b)
  ScalarT t = gp.trace(dW, 0, 1);  // (c, a, b)
  ScalarT r(3);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c) r(a, b, c) = 2.0 * t(c, a, b);
  return r;
}

ScalarT bach(const GeometryPoint& gp, const CurvatureSet& cs) {
  ScalarT ddP = gp.nabla(gp.nabla(cs.P));  // (c, d, a, b) = nabla_c nabla_d P_ab
  ScalarT lap = gp.trace(ddP, 0, 1);
  ScalarT Pup = gp.raise_all(cs.P);
  ScalarT B(2);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      Jet s = lap(a, b);
      for (int c = 0; c < kDim; ++c)
        for (int d = 0; d < kDim; ++d) s -= gp.ginv(c, d) * ddP(c, a, d, b);
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) s += Pup(i, j) * cs.W(a, i, b, j);
      B(a, b) = s;
    }
  return B;
}

std::array<Vec, 4> codazzi_residual(const GeometryPoint& gp, double factor) {
  const VecT& dh = gp.Dh();  // (k, i, j)
  VecT div = gp.trace(dh, 0, 1);  // (j)
  const VecT& dH = gp.DH();
  std::array<Vec, 4> r;
  for (int j = 0; j < kDim; ++j) r[j] = div(j) - dH(j) * factor;
  return r;
}

double max_abs(const ScalarT& t) {
  double m = 0;
  for (const auto& x : t.data()) m = std::max(m, std::abs(x.value()));
  return m;
}

double max_abs(const Vec& v) {
  double m = 0;
  for (std::size_t b = 0; b < v.size(); ++b) m = std::max(m, std::abs(v[b].value()));
  return m;
}

double max_abs(const Multivector& v) {
  double m = 0;
  for (double x : v.coeffs()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const VecT& t) {
  double m = 0;
  for (const auto& x : t.data()) m = std::max(m, max_abs(x));
  return m;
}

}  // namespace curv
