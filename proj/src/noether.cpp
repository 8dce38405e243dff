#include "curv/noether.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace curv {

namespace {

constexpr std::array<const char*, kTermCount> kTermNames = {"ea", "h0_4", "angle4", "h0sq2", "tr4", "w2"};
constexpr std::array<const char*, kQuarticCount> kQuarticNames = {
    "angle", "trace", "square", "norm4", "mixed_hh", "hh2", "h2h2", "h4",
    "angle0", "trace0", "square0", "norm0_4", "weyl"};

std::string lower(std::string s) {
  for (auto& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

ScalarT metric_scaled(const GeometryPoint& gp, const Jet& s) {
  ScalarT r(2);
  for (std::size_t f = 0; f < r.size(); ++f) r.at(f) = gp.g.at(f) * s;
  return r;
}

// x_ij = g^{kl} a_ik . b_lj
ScalarT square_dot(const GeometryPoint& gp, const VecT& a, const VecT& b) {
  ScalarT r(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet s(0.0);
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) s += gp.ginv(k, l) * dot(a(i, k), b(l, j));
      r(i, j) = s;
    }
  return r;
}

// T_i^j with the second slot raised.
template <class V>
Tensor<V> raise_second(const GeometryPoint& gp, const Tensor<V>& t) {
  Tensor<V> r(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      V acc{};
      for (int a = 0; a < kDim; ++a) acc += t(i, a) * gp.ginv(a, j);
      r(i, j) = acc;
    }
  return r;
}

// Normal vector t^{ij} s_ij for scalar t (lower) and vector s.
Vec contract(const GeometryPoint& gp, const ScalarT& t, const VecT& s) {
  ScalarT up = gp.raise_all(t);
  Vec acc = zero_vec(gp.m());
  for (std::size_t f = 0; f < up.size(); ++f) acc += s.at(f) * up.at(f);
  return acc;
}

// Quartic kernel on a normal-valued symmetric tensor k (h or h0).
struct QuarticPieces {
  VecT k, kup, kmix;  // k_ij, k^ij, k_i^j
  ScalarT sq;         // (k^2)_ij
  ScalarT squp;
  Jet norm2;          // |k|^2
  Vec sq_k;           // <k^2, k> = (k^2)^ij k_ij
};

QuarticPieces pieces(const GeometryPoint& gp, const VecT& k) {
  QuarticPieces q;
  q.k = k;
  q.kup = gp.raise_all(k);
  q.kmix = raise_second(gp, k);
  q.sq = square_dot(gp, k, k);
  q.squp = gp.raise_all(q.sq);
  q.norm2 = Jet(0.0);
  for (std::size_t f = 0; f < k.size(); ++f) q.norm2 += dot(k.at(f), q.kup.at(f));
  q.sq_k = zero_vec(gp.m());
  for (std::size_t f = 0; f < k.size(); ++f) q.sq_k += k.at(f) * q.squp.at(f);
  return q;
}

Jet angle_energy(const QuarticPieces& q) {
  // (k^ij . k^kl)(k_ij . k_kl) = sum_{ij,kl} x_{ij,kl} y_{ij,kl}
  Jet s(0.0);
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = 0; b < 16; ++b) s += dot(q.kup.at(a), q.kup.at(b)) * dot(q.k.at(a), q.k.at(b));
  return s;
}

Jet trace_energy(const QuarticPieces& q) {
  // (k^ij . k^kl)(k_ik . k_jl)
  Jet s(0.0);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) s += dot(q.kup(i, j), q.kup(k, l)) * dot(q.k(i, k), q.k(j, l));
  return s;
}

VecT angle_F(const QuarticPieces& q) {
  VecT F(2);
  for (int r = 0; r < kDim; ++r)
    for (int s = 0; s < kDim; ++s) {
      Vec acc = zero_vec(q.k.at(0).dim());
      for (std::size_t f = 0; f < 16; ++f) acc += q.k.at(f) * dot(q.k(r, s), q.kup.at(f));
      F(r, s) = acc * 4.0;
    }
  return F;
}

VecT trace_F(const QuarticPieces& q) {
  // 4 (k_r^a . k_s^b) k_ab
  VecT F(2);
  for (int r = 0; r < kDim; ++r)
    for (int s = 0; s < kDim; ++s) {
      Vec acc = zero_vec(q.k.at(0).dim());
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) acc += q.k(a, b) * dot(q.kmix(r, a), q.kmix(s, b));
      F(r, s) = acc * 4.0;
    }
  return F;
}

VecT square_F(const GeometryPoint& gp, const QuarticPieces& q) {
  // 2 (k^2)_r^b k_sb + 2 (k^2)_s^b k_rb
  ScalarT sqmix = raise_second(gp, q.sq);
  VecT F(2);
  for (int r = 0; r < kDim; ++r)
    for (int s = 0; s < kDim; ++s) {
      Vec acc = zero_vec(gp.m());
      for (int b = 0; b < kDim; ++b) acc += q.k(s, b) * sqmix(r, b) + q.k(r, b) * sqmix(s, b);
      F(r, s) = acc * 2.0;
    }
  return F;
}

VecT scaled(const VecT& t, const Jet& s) {
  VecT r = t;
  for (auto& v : r.data()) v = v * s;
  return r;
}

VecT metric_times(const GeometryPoint& gp, const Vec& v) {
  VecT r(2);
  for (std::size_t f = 0; f < r.size(); ++f) r.at(f) = v * gp.g.at(f);
  return r;
}

void add_to(VecT& a, const VecT& b, double s = 1.0) {
  for (std::size_t f = 0; f < a.size(); ++f) a.at(f) += b.at(f) * s;
}

// G_rs = -g^{bc} F_rc . h_sb + E g_rs
ScalarT generic_G(const GeometryPoint& gp, const VecT& F, const Jet& E) {
  ScalarT G = metric_scaled(gp, E);
  for (int r = 0; r < kDim; ++r)
    for (int s = 0; s < kDim; ++s) {
      Jet acc(0.0);
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c) acc += gp.ginv(b, c) * dot(F(r, c), gp.h(s, b));
      G(r, s) -= acc;
    }
  return G;
}

VecT zero_F(int m) { return VecT(2, zero_vec(m)); }
VecT zero_C(int m) { return VecT(1, zero_vec(m)); }

// Weyl-tensor pieces shared by the triple and the direct V.
VecT weyl_F(const GeometryPoint& gp, const ScalarT& W) {
  VecT hup = gp.raise_all(gp.h);
  VecT F(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Vec acc = zero_vec(gp.m());
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) acc += hup(a, b) * W(a, i, b, j);
      F(i, j) = acc * 8.0;
    }
  return F;
}

}  // namespace

const char* term_name(TermKind k) { return kTermNames[int(k)]; }

TermKind term_from_name(const std::string& name) {
  const std::string n = lower(name);
  for (int k = 0; k < kTermCount; ++k)
    if (n == kTermNames[k]) return TermKind(k);
  throw std::invalid_argument("unknown energy term '" + name + "'");
}

DensityKind term_density(TermKind k) {
  switch (k) {
    case TermKind::EA:
      return DensityKind::EA;
    case TermKind::H04:
      return DensityKind::H04;
    case TermKind::ANGLE4:
      return DensityKind::ANGLE4;
    case TermKind::H0SQ2:
      return DensityKind::H0SQ2;
    case TermKind::TR4:
      return DensityKind::TR4;
    case TermKind::WEYL:
      return DensityKind::W2;
  }
  throw std::invalid_argument("bad term");
}

EnergySpec EnergySpec::single(TermKind k, double c) {
  EnergySpec s;
  s[k] = c;
  return s;
}

EnergySpec EnergySpec::parse(const std::string& text) {
  EnergySpec s;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      s[term_from_name(item)] += 1.0;
      continue;
    }
    std::size_t used = 0;
    const std::string num = item.substr(eq + 1);
    double v = 0;
    try {
      v = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size()) throw std::invalid_argument("bad coefficient in '" + item + "'");
    s[term_from_name(item.substr(0, eq))] += v;
  }
  return s;
}

std::string EnergySpec::str() const {
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k < kTermCount; ++k) {
    if (coeff[k] == 0) continue;
    if (!first) os << ',';
    os << kTermNames[k] << '=' << coeff[k];
    first = false;
  }
  return first ? "0" : os.str();
}

double EnergySpec::evaluate(const EnergyIntegrals& e) const {
  double s = 0;
  for (int k = 0; k < kTermCount; ++k)
    if (coeff[k] != 0) s += coeff[k] * e.get(term_density(TermKind(k)));
  return s;
}

const char* quartic_name(Quartic q) { return kQuarticNames[int(q)]; }

Quartic quartic_from_name(const std::string& name) {
  const std::string n = lower(name);
  for (int k = 0; k < kQuarticCount; ++k)
    if (n == kQuarticNames[k]) return Quartic(k);
  throw std::invalid_argument("unknown quartic '" + name + "'");
}

const std::array<Quartic, kQuarticCount>& all_quartics() {
  static const std::array<Quartic, kQuarticCount> all = [] {
    std::array<Quartic, kQuarticCount> a{};
    for (int k = 0; k < kQuarticCount; ++k) a[k] = Quartic(k);
    return a;
  }();
  return all;
}

NoetherTriple& NoetherTriple::operator+=(const NoetherTriple& o) {
  for (std::size_t f = 0; f < G.size(); ++f) G.at(f) += o.G.at(f);
  for (std::size_t f = 0; f < F.size(); ++f) F.at(f) += o.F.at(f);
  for (std::size_t f = 0; f < C.size(); ++f) C.at(f) += o.C.at(f);
  E += o.E;
  return *this;
}

NoetherTriple& NoetherTriple::operator*=(double s) {
  for (auto& x : G.data()) x *= s;
  for (auto& x : F.data()) x *= s;
  for (auto& x : C.data()) x *= s;
  E *= s;
  return *this;
}

NoetherTriple zero_triple(int m) {
  NoetherTriple t;
  t.G = ScalarT(2, Jet(0.0));
  t.F = zero_F(m);
  t.C = zero_C(m);
  t.E = Jet(0.0);
  return t;
}

NoetherTriple triple_dirichlet(const GeometryPoint& gp) {
  const VecT& DH = gp.DH();
  const Vec& lap = gp.LapH();
  NoetherTriple t;
  Jet dh2(0.0);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) dh2 += gp.ginv(a, b) * dot(DH(a), DH(b));
  t.E = dh2;
  t.G = ScalarT(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      t.G(i, j) = 0.5 * dot(gp.h(i, j), lap) + dh2 * gp.g(i, j) - 2.0 * dot(DH(j), DH(i));
  t.F = metric_times(gp, lap * -0.5);
  t.C = VecT(1);
  for (int j = 0; j < kDim; ++j) {
    Vec acc = zero_vec(gp.m());
    for (int i = 0; i < kDim; ++i)
      for (int a = 0; a < kDim; ++a) {
        acc += gp.H * (-2.0 * gp.ginv(i, a) * dot(gp.h(j, a), DH(i)));
        acc += DH(i) * (2.0 * gp.ginv(i, a) * gp.Hh()(j, a));
      }
    t.C(j) = acc;
  }
  return t;
}

NoetherTriple triple_lower(const GeometryPoint& gp, double a, double alpha) {
  const ScalarT& Hh = gp.Hh();
  ScalarT Hhup = gp.raise_all(Hh);
  Vec hh_h = contract(gp, Hh, gp.h);  // <H.h, h>
  Jet Hh2(0.0);
  for (std::size_t f = 0; f < Hh.size(); ++f) Hh2 += Hh.at(f) * Hhup.at(f);
  Jet H2 = gp.H2();
  NoetherTriple t;
  t.E = a * Hh2 + alpha * H2 * H2;
  t.F = VecT(2);
  for (int r = 0; r < kDim; ++r)
    for (int s = 0; s < kDim; ++s)
      t.F(r, s) = gp.H * (2.0 * a * Hh(r, s)) + (hh_h * (0.5 * a) + gp.H * (alpha * H2)) * gp.g(r, s);
  t.G = generic_G(gp, t.F, t.E);
  t.C = zero_C(gp.m());
  return t;
}

NoetherTriple triple_ea(const GeometryPoint& gp) {
  NoetherTriple t = triple_dirichlet(gp);
  t += triple_lower(gp, -1.0, 7.0);
  return t;
}

NoetherTriple triple_quartic(const GeometryPoint& gp, Quartic q) {
  NoetherTriple t;
  t.C = zero_C(gp.m());
  const bool traceless = q >= Quartic::Angle0 && q <= Quartic::Norm04;
  if (q == Quartic::Weyl) {
    CurvatureSet cs = curvature_extrinsic(gp);
    ScalarT W = weyl_extrinsic(gp);
    t.E = gp.full_dot(W, W);
    t.F = weyl_F(gp, W);
    ScalarT Pup = gp.raise_all(cs.P);
    t.G = ScalarT(2);
    for (int i = 0; i < kDim; ++i)
      for (int k = 0; k < kDim; ++k) {
        Jet s(0.0);
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b) s += W(i, a, k, b) * Pup(a, b);
        t.G(i, k) = -4.0 * s;
      }
    return t;
  }
  QuarticPieces p = pieces(gp, traceless ? gp.h0 : gp.h);
  switch (q) {
    case Quartic::Angle:
    case Quartic::Angle0:
      t.E = angle_energy(p);
      t.F = angle_F(p);
      break;
    case Quartic::Trace:
    case Quartic::Trace0:
      t.E = trace_energy(p);
      t.F = trace_F(p);
      if (traceless) add_to(t.F, metric_times(gp, p.sq_k), -1.0);
      break;
    case Quartic::Square:
    case Quartic::Square0: {
      Jet e(0.0);
      for (std::size_t f = 0; f < p.sq.size(); ++f) e += p.sq.at(f) * p.squp.at(f);
      t.E = e;
      t.F = square_F(gp, p);
      if (traceless) add_to(t.F, metric_times(gp, p.sq_k), -1.0);
      break;
    }
    case Quartic::Norm4:
    case Quartic::Norm04:
      t.E = p.norm2 * p.norm2;
      t.F = scaled(p.k, 4.0 * p.norm2);
      break;
    case Quartic::MixedHh: {
      const ScalarT& Hh = gp.Hh();
      ScalarT Hhmix = raise_second(gp, Hh);
      Jet e(0.0);
      for (std::size_t f = 0; f < Hh.size(); ++f) e += p.squp.at(f) * Hh.at(f);
      t.E = 4.0 * e;
      t.F = VecT(2);
      for (int r = 0; r < kDim; ++r)
        for (int s = 0; s < kDim; ++s) {
          Vec acc = gp.H * (4.0 * p.sq(r, s)) + p.sq_k * gp.g(r, s);
          for (int b = 0; b < kDim; ++b)
            acc += gp.h(s, b) * (4.0 * Hhmix(r, b)) + gp.h(r, b) * (4.0 * Hhmix(s, b));
          t.F(r, s) = acc;
        }
      break;
    }
    case Quartic::Hh2: {
      NoetherTriple l = triple_lower(gp, 16.0, 0.0);
      t.E = l.E;
      t.F = l.F;
      break;
    }
    case Quartic::H2h2: {
      Jet H2 = gp.H2();
      t.E = 16.0 * H2 * p.norm2;
      t.F = scaled(gp.h, 32.0 * H2);
      add_to(t.F, metric_times(gp, gp.H * (8.0 * p.norm2)));
      break;
    }
    case Quartic::H4: {
      NoetherTriple l = triple_lower(gp, 0.0, 256.0);
      t.E = l.E;
      t.F = l.F;
      break;
    }
    default:
      break;
  }
  t.G = generic_G(gp, t.F, t.E);
  return t;
}

ScalarT weyl_G_generic(const GeometryPoint& gp, const NoetherTriple& t) { return generic_G(gp, t.F, t.E); }

Quartic term_quartic(TermKind k) {
  switch (k) {
    case TermKind::H04:
      return Quartic::Norm04;
    case TermKind::ANGLE4:
      return Quartic::Angle0;
    case TermKind::H0SQ2:
      return Quartic::Square0;
    case TermKind::TR4:
      return Quartic::Trace0;
    case TermKind::WEYL:
      return Quartic::Weyl;
    case TermKind::EA:
      break;
  }
  throw std::invalid_argument("E_A is not a quartic");
}

NoetherTriple triple_for(const GeometryPoint& gp, const EnergySpec& spec) {
  NoetherTriple t = zero_triple(gp.m());
  for (int k = 0; k < kTermCount; ++k) {
    const double c = spec.coeff[k];
    if (c == 0) continue;
    NoetherTriple part = TermKind(k) == TermKind::EA ? triple_ea(gp) : triple_quartic(gp, term_quartic(TermKind(k)));
    part *= c;
    t += part;
  }
  return t;
}

ParamForm noether_V(const GeometryPoint& gp, const NoetherTriple& t) {
  ParamForm V(1, 1, gp.m());
  VecT divF = gp.trace(gp.nabla_flat(t.F), 0, 1);  // g^{ia} nabla_a F_ij
  for (int j = 0; j < kDim; ++j) {
    Vec acc = t.C(j) - gp.normal(divF(j));
    for (int i = 0; i < kDim; ++i)
      for (int a = 0; a < kDim; ++a) acc += gp.dphi[i] * (gp.ginv(i, a) * t.G(a, j));
    V(j) = acc;
  }
  return V;
}

ParamForm noether_V_weyl(const GeometryPoint& gp) {
  CurvatureSet cs = curvature_extrinsic(gp);
  ScalarT W = weyl_extrinsic(gp);
  ScalarT Pup = gp.raise_all(cs.P);
  VecT T = weyl_F(gp, W);  // 8 h^ab W_aibj
  VecT divT = gp.trace(gp.nabla_flat(T), 0, 2);  // g^{jc} nabla_c T_ij
  ParamForm V(1, 1, gp.m());
  for (int i = 0; i < kDim; ++i) {
    Vec acc = gp.normal(divT(i)) * -1.0;
    for (int k = 0; k < kDim; ++k) {
      Jet s(0.0);
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) s += W(i, a, k, b) * Pup(a, b);
      acc += gp.dphi_up(k) * (-4.0 * s);
    }
    V(i) = acc;
  }
  return V;
}

Multivector divergence_V(const GeometryPoint& gp, const EnergySpec& spec) {
  GeometryPoint c = gp.capped(2);
  ParamForm V = noether_V(c, triple_for(c, spec));
  return values(codifferential(c, V)(0));
}

Multivector el_operator(const GeometryPoint& gp, const EnergySpec& spec) {
  return divergence_V(gp, spec) * -1.0;
}

ExplicitEL el_explicit_ea(const GeometryPoint& gp) {
  GeometryPoint c = gp.capped(2);
  const VecT& DH = c.DH();
  const Vec& lap = c.LapH();
  const ScalarT& Hh = c.Hh();
  const int m = c.m();
  auto normal_lap = [&](const Vec& n) {
    VecT t(0);
    t.at(0) = n;
    return c.trace(c.nabla_normal(c.nabla_normal(t)), 0, 1).at(0);
  };
  auto normal_div = [&](const VecT& y) { return c.trace(c.nabla_normal(y), 0, 1).at(0); };

  Vec hh_h = contract(c, Hh, c.h);
  Jet H2 = c.H2();
  ScalarT Hhup = c.raise_all(Hh);
  Jet Hh2(0.0);
  for (std::size_t f = 0; f < Hh.size(); ++f) Hh2 += Hh.at(f) * Hhup.at(f);
  Jet dh2(0.0);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) dh2 += c.ginv(a, b) * dot(DH(a), DH(b));

  Vec rest = normal_lap(lap) * 0.5 + normal_lap(hh_h) * 0.5 - normal_lap(c.H * H2) * 7.0;

  ScalarT Hhmix = raise_second(c, Hh);
  VecT y(1);
  for (int j = 0; j < kDim; ++j) {
    Vec acc = zero_vec(m);
    for (int i = 0; i < kDim; ++i) acc += DH(i) * Hhmix(j, i);
    y(j) = acc;
  }
  rest += normal_div(y) * 4.0;

  ScalarT b(2);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet s = 0.5 * dot(c.h(i, j), lap) - 2.0 * dot(DH(i), DH(j)) + 0.5 * dot(hh_h, c.h(i, j)) -
              7.0 * H2 * Hh(i, j) + (dh2 - Hh2 + 7.0 * H2 * H2) * c.g(i, j);
      for (int k = 0; k < kDim; ++k) s += 2.0 * Hh(i, k) * Hhmix(j, k);
      b(i, j) = s;
    }
  rest += contract(c, b, c.h);

  ScalarT dH2 = c.nabla(ScalarT(0, H2));
  VecT z(1);
  for (int j = 0; j < kDim; ++j) z(j) = c.H * dH2(j);
  ExplicitEL out;
  out.rest = values(rest);
  out.grad = values(normal_div(z));
  return out;
}

ParamForm x_field(const GeometryPoint& gp) {
  const VecT& DH = gp.DH();
  const ScalarT& Hh = gp.Hh();
  Jet H2 = gp.H2();
  ParamForm X(1, 1, gp.m());
  for (int j = 0; j < kDim; ++j) {
    Vec acc = DH(j) - gp.dphi[j] * (2.0 * H2);
    for (int i = 0; i < kDim; ++i) acc += gp.dphi_up(i) * Hh(i, j);
    X(j) = acc;
  }
  return X;
}

Multivector guven_residual(const GeometryPoint& gp) {
  GeometryPoint c = gp.capped(2);
  Vec dX = codifferential(c, x_field(c))(0);
  Vec rhs = c.LapH() + contract(c, c.Hh(), c.h) - c.H * (8.0 * c.H2());
  return values(dX - rhs);
}

ParamForm u_field(const GeometryPoint& gp, const EnergySpec& spec, bool with_extra) {
  NoetherTriple t = triple_for(gp, spec);
  const double ca = spec[TermKind::EA];
  const Jet H2 = gp.H2();
  const ScalarT& Hh = gp.Hh();
  ParamForm U(1, 2, gp.m());
  std::array<Vec, 4> up;
  for (int j = 0; j < kDim; ++j) up[j] = gp.dphi_up(j);
  for (int i = 0; i < kDim; ++i) {
    Vec acc = wedge(gp.H, gp.DH()(i)) * (2.0 * ca);
    for (int j = 0; j < kDim; ++j) {
      Vec f = (gp.h(i, j) - gp.H * (4.0 * gp.g(i, j))) * H2;
      acc -= wedge(t.F(i, j) + f * (ca / 3.0), up[j]);
      if (with_extra) acc += wedge(gp.H * (2.0 * ca * Hh(i, j)), up[j]);
    }
    U(i) = acc;
  }
  return U;
}

VariationResult variation_check(const ImmersionPatch& base, const EnergySpec& spec, const AmbientField& b,
                                const std::vector<double>& eps, std::array<int, 4> grid_fd,
                                std::array<int, 4> grid_el) {
  if (!base.closed) throw std::invalid_argument("variation_check needs a closed immersion");
  if (eps.size() < 2) throw std::invalid_argument("variation_check needs at least two step sizes");
  VariationResult res;

  // Right-hand side: int b . el dvol on the base.
  QuadratureGrid qe = make_grid(base, grid_el);
  const bool has_ea = spec[TermKind::EA] != 0;
  std::vector<double> vals, vp, vd;
  vals.reserve(qe.size());
  for (std::size_t i0 = 0; i0 < qe.nodes[0].size(); ++i0)
    for (std::size_t i1 = 0; i1 < qe.nodes[1].size(); ++i1)
      for (std::size_t i2 = 0; i2 < qe.nodes[2].size(); ++i2)
        for (std::size_t i3 = 0; i3 < qe.nodes[3].size(); ++i3) {
          Point4 u{qe.nodes[0][i0], qe.nodes[1][i1], qe.nodes[2][i2], qe.nodes[3][i3]};
          const double w = qe.weights[0][i0] * qe.weights[1][i1] * qe.weights[2][i2] * qe.weights[3][i3];
          JetVec phi = eval_jet(base, u, Jet::kOrder);
          GeometryPoint gp(phi);
          JetVec x(phi.size());
          for (std::size_t k = 0; k < phi.size(); ++k) x[k] = Jet(phi[k].value());
          JetVec bv = b(x);
          Multivector B(int(bv.size()), 1);
          for (std::size_t k = 0; k < bv.size(); ++k) B[k] = bv[k].value();
          const double dv = w * gp.sqrt_det_g.value();
          vals.push_back(dot(B, el_operator(gp, spec)) * dv);
          if (has_ea) {
            ExplicitEL ex = el_explicit_ea(gp);
            vp.push_back(dot(B, ex.with(kGradCoeffPrinted)) * dv);
            vd.push_back(dot(B, ex.with(kGradCoeffDerived)) * dv);
          }
        }
  res.rhs = pairwise_sum(vals.data(), vals.size());
  if (has_ea) {
    res.rhs_explicit_printed = pairwise_sum(vp.data(), vp.size());
    res.rhs_explicit_derived = pairwise_sum(vd.data(), vd.size());
  }
  res.nodes = qe.size();

  QuadratureGrid qf = make_grid(base, grid_fd);
  auto energy = [&](double e) { return spec.evaluate(integrate_all(perturb_ambient(base, b, e), qf)); };
  for (double e : eps) {
    VariationRow row;
    row.eps = e;
    row.fd = (energy(e) - energy(-e)) / (2 * e);
    row.rel_err = std::abs(row.fd - res.rhs) / std::max(std::abs(res.rhs), 1e-300);
    res.rows.push_back(row);
  }
  // Richardson on the two smallest steps, assuming they differ by a factor 2
  // or more; the general form uses the actual ratio.
  std::vector<VariationRow> sorted = res.rows;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& c) { return a.eps < c.eps; });
  const VariationRow& s0 = sorted[0];
  const VariationRow& s1 = sorted[1];
  const double r2 = (s1.eps / s0.eps) * (s1.eps / s0.eps);
  res.richardson = (r2 * s0.fd - s1.fd) / (r2 - 1);
  res.richardson_rel = std::abs(res.richardson - res.rhs) / std::max(std::abs(res.rhs), 1e-300);
  const VariationRow& l0 = sorted[sorted.size() - 1];
  const VariationRow& l1 = sorted[sorted.size() - 2];
  res.slope = std::log(std::abs(l0.fd - res.rhs) / std::abs(l1.fd - res.rhs)) / std::log(l0.eps / l1.eps);
  return res;
}

}  // namespace curv
