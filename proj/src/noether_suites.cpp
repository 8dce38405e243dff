#include <algorithm>
#include <cmath>

#include "curv/noether.hpp"

namespace curv {

namespace {

double vmax(const Vec& v) { return max_abs(v); }

Residual make(const std::string& id, double value, double scale, bool asserted = true) {
  return Residual{id, value, scale, asserted};
}

// g^{jb} h_mb . y_j
Jet h_dot(const GeometryPoint& gp, int m, const VecT& y) {
  Jet s(0.0);
  for (int j = 0; j < kDim; ++j)
    for (int b = 0; b < kDim; ++b) s += gp.ginv(j, b) * dot(gp.h(m, b), y(j));
  return s;
}

// sum_j y_j ^ d^j Phi
Vec wedge_up(const GeometryPoint& gp, const VecT& y) {
  Vec acc = zero_vec(gp.m(), 2);
  for (int j = 0; j < kDim; ++j) acc += wedge(y(j), gp.dphi_up(j));
  return acc;
}

// Q_i = F_ij ^ d^j Phi as a 2-vector-valued 1-form.
ParamForm f_wedge_dphi(const GeometryPoint& gp, const VecT& F) {
  ParamForm q(1, 2, gp.m());
  std::array<Vec, 4> up;
  for (int j = 0; j < kDim; ++j) up[j] = gp.dphi_up(j);
  for (int i = 0; i < kDim; ++i) {
    Vec acc = zero_vec(gp.m(), 2);
    for (int j = 0; j < kDim; ++j) acc += wedge(F(i, j), up[j]);
    q(i) = acc;
  }
  return q;
}

VecT normal_all(const GeometryPoint& gp, const VecT& t) {
  VecT r = t;
  for (auto& v : r.data()) v = gp.normal(v);
  return r;
}

// Identities shared by the quartic-type triples (C = 0, G = -F.h + E g).
void quartic_family(const GeometryPoint& c, const NoetherTriple& t, const VecT& k, const std::string& tag,
                    ResidualSet& out) {
  const int m = c.m();
  VecT kup = c.raise_all(k);
  VecT Fup = c.raise_all(t.F);
  VecT divF = c.trace(c.nabla_flat(t.F), 0, 1);  // nabla^i F_ij
  VecT divFn = normal_all(c, divF);

  Vec wedge_h = zero_vec(m, 2);
  for (std::size_t f = 0; f < Fup.size(); ++f) wedge_h += wedge(Fup.at(f), c.h.at(f));
  out.push_back(make(tag + ".F_wedge_h", vmax(wedge_h), max_abs(t.F) * max_abs(c.h)));

  // k^rs . nabla_m F_rs - 3 nabla_m E
  VecT DF = c.nabla_flat(t.F);
  ScalarT dE = c.nabla(ScalarT(0, t.E));
  double r3 = 0, s3 = 0;
  for (int mm = 0; mm < kDim; ++mm) {
    Jet s(0.0);
    for (int r = 0; r < kDim; ++r)
      for (int q = 0; q < kDim; ++q) s += dot(kup(r, q), DF(mm, r, q));
    r3 = std::max(r3, std::abs((s - 3.0 * dE(mm)).value()));
    s3 = std::max({s3, std::abs(s.value()), 3 * std::abs(dE(mm).value())});
  }
  out.push_back(make(tag + ".h_dot_dF_3dE", r3, s3));

  // h^i_j . nabla_k F^kj + nabla_k G^ik  (lower i)
  ScalarT divG = c.trace(c.nabla(t.G), 0, 2);
  double r4 = 0, s4 = 0;
  for (int i = 0; i < kDim; ++i) {
    Jet a = h_dot(c, i, divF);
    r4 = std::max(r4, std::abs((a + divG(i)).value()));
    s4 = std::max({s4, std::abs(a.value()), std::abs(divG(i).value())});
  }
  out.push_back(make(tag + ".h_divF_divG", r4, s4));

  // -pi_n nabla_i F^ij ^ d_j Phi + nabla_i (F^ij ^ d_j Phi)
  Vec lhs = wedge_up(c, divFn) * -1.0;
  Vec rhs = codifferential(c, f_wedge_dphi(c, t.F))(0);
  out.push_back(make(tag + ".wedge_divergence", vmax(lhs + rhs), std::max(vmax(lhs), vmax(rhs))));

  // h^ik . F_k^j symmetric; <h, F> = 4E; trace G = 0 (conformal kinds only)
  double asym = 0, ssym = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet a(0.0), b(0.0);
      for (int p = 0; p < kDim; ++p)
        for (int q = 0; q < kDim; ++q) {
          a += c.ginv(p, q) * dot(c.h(i, p), t.F(q, j));
          b += c.ginv(p, q) * dot(c.h(j, p), t.F(q, i));
        }
      asym = std::max(asym, std::abs((a - b).value()));
      ssym = std::max(ssym, std::abs(a.value()));
    }
  out.push_back(make(tag + ".hF_symmetric", asym, ssym));
  Jet hF(0.0);
  VecT hup = c.raise_all(c.h);
  for (std::size_t f = 0; f < hup.size(); ++f) hF += dot(hup.at(f), t.F.at(f));
  out.push_back(make(tag + ".hF_4E", std::abs((hF - 4.0 * t.E).value()),
                     std::max(std::abs(hF.value()), 4 * std::abs(t.E.value()))));
}

}  // namespace

bool TTReport::certified(double tol) const {
  const double s = std::max(scale, 1e-300);
  return symmetry <= tol * s && trace <= tol * s && divergence <= tol * s;
}

ResidualSet prop1_suite(const GeometryPoint& gp, const EnergySpec& spec) {
  GeometryPoint c = gp.capped(2);
  const double ca = spec[TermKind::EA];
  NoetherTriple t = triple_for(c, spec);
  ResidualSet out;

  Jet trG = c.trace(t.G, 0, 1).at(0);
  Jet lapH2 = c.trace(c.nabla(c.nabla(ScalarT(0, c.H2()))), 0, 1).at(0) * ca;
  out.push_back(make("prop1_i", std::abs((trG - lapH2).value()),
                     std::max(std::abs(trG.value()), std::abs(lapH2.value()))));

  VecT divF = c.trace(c.nabla_flat(t.F), 0, 1);
  VecT y(1);
  for (int j = 0; j < kDim; ++j) y(j) = t.C(j) - divF(j);
  ScalarT divG = c.trace(c.nabla(t.G), 0, 1);
  double r2 = 0, s2 = 0;
  for (int mm = 0; mm < kDim; ++mm) {
    Jet a = h_dot(c, mm, y);
    r2 = std::max(r2, std::abs((a - divG(mm)).value()));
    s2 = std::max({s2, std::abs(h_dot(c, mm, divF).value()), std::abs(h_dot(c, mm, t.C).value()),
                   std::abs(divG(mm).value())});
  }
  out.push_back(make("prop1_ii", r2, s2));

  VecT yn(1);
  for (int j = 0; j < kDim; ++j) yn(j) = t.C(j) - c.normal(divF(j));
  Vec lhs = wedge_up(c, yn);
  ParamForm q = f_wedge_dphi(c, t.F) * -1.0;
  for (int i = 0; i < kDim; ++i) q(i) += wedge(c.H, c.DH()(i)) * (2.0 * ca);
  Vec rhs = codifferential(c, q)(0);
  out.push_back(make("prop1_iii", vmax(lhs - rhs), std::max(vmax(lhs), vmax(rhs))));

  ParamForm qe = q;
  std::array<Vec, 4> up;
  for (int j = 0; j < kDim; ++j) up[j] = c.dphi_up(j);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) qe(i) += wedge(c.H * (2.0 * ca * c.Hh()(i, j)), up[j]);
  Vec rhs_e = codifferential(c, qe)(0);
  out.push_back(make("prop1_iii_extra", vmax(lhs - rhs_e), std::max(vmax(lhs), vmax(rhs_e)), false));
  return out;
}

ResidualSet lemma_quartic_suite(const GeometryPoint& gp, Quartic q) {
  if (q < Quartic::Angle0) throw std::invalid_argument("lemma_quartic_suite: needs a conformal quartic");
  GeometryPoint c = gp.capped(2);
  NoetherTriple t = triple_quartic(c, q);
  const std::string tag = quartic_name(q);
  ResidualSet out;
  Vec trF = zero_vec(c.m());
  for (std::size_t f = 0; f < t.F.size(); ++f) trF += t.F.at(f) * c.ginv.at(f);
  out.push_back(make(tag + ".trace_F", vmax(trF), max_abs(t.F)));
  quartic_family(c, t, c.h0, tag, out);
  Jet trG = c.trace(t.G, 0, 1).at(0);
  out.push_back(make(tag + ".trace_G", std::abs(trG.value()), max_abs(t.G)));
  if (q == Quartic::Weyl) {
    ScalarT Gg = weyl_G_generic(c, t);
    double r = 0;
    for (std::size_t f = 0; f < Gg.size(); ++f) r = std::max(r, std::abs((Gg.at(f) - t.G.at(f)).value()));
    out.push_back(make(tag + ".lanczos", r, std::max(max_abs(Gg), max_abs(t.G))));
    ParamForm v1 = noether_V(c, t), v2 = noether_V_weyl(c);
    out.push_back(make(tag + ".V_direct", max_abs(v1 - v2), std::max(max_abs(v1), max_abs(v2))));
    // |W|^2 as the trace-free quartic combination, at the level of F.
    NoetherTriple a = triple_quartic(c, Quartic::Angle0), b = triple_quartic(c, Quartic::Trace0),
                  s = triple_quartic(c, Quartic::Square0), n = triple_quartic(c, Quartic::Norm04);
    double r2 = 0;
    for (std::size_t f = 0; f < t.F.size(); ++f) {
      Vec d = a.F.at(f) * 2.0 - b.F.at(f) * 2.0 - s.F.at(f) * 2.0 + n.F.at(f) * (1.0 / 3.0) - t.F.at(f);
      r2 = std::max(r2, vmax(d));
    }
    out.push_back(make(tag + ".F_combination", r2, max_abs(t.F)));
  }
  return out;
}

ResidualSet lemma_lower_suite(const GeometryPoint& gp, double a, double alpha) {
  GeometryPoint c = gp.capped(2);
  NoetherTriple t = triple_lower(c, a, alpha);
  ResidualSet out;
  quartic_family(c, t, c.h, "lower", out);
  return out;
}

ResidualSet bach_suite(const GeometryPoint& gp) {
  ResidualSet out;
  CurvatureSet cs = curvature_extrinsic(gp);
  ScalarT C = cotton(gp, cs);
  ScalarT WD = weyl_divergence(gp, cs);
  std::array<Vec, 4> up;
  for (int j = 0; j < kDim; ++j) up[j] = gp.dphi_up(j);
  ParamForm ell(2, 1, gp.m());
  ParamForm ell_w(2, 1, gp.m());
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      Vec x = zero_vec(gp.m()), y = zero_vec(gp.m());
      for (int k = 0; k < kDim; ++k) {
        x += up[k] * C(a, b, k);
        y += up[k] * WD(a, b, k);
      }
      ell(a, b) = x;
      ell_w(a, b) = y;
    }
  out.push_back(make("bach.cotton_weyl", max_abs(ell - ell_w), std::max(max_abs(ell), max_abs(ell_w))));

  ScalarT B = bach(gp, cs);
  ParamForm V = noether_V_weyl(gp);
  ParamForm dl = codifferential(gp, ell);
  double r = 0, s = 0;
  for (int b = 0; b < kDim; ++b) {
    Vec bt = zero_vec(gp.m());
    for (int j = 0; j < kDim; ++j) bt += up[j] * B(b, j);
    Vec res = V(b) * -0.25 + dl(b) - bt;
    r = std::max(r, vmax(res));
    s = std::max({s, 0.25 * vmax(V(b)), vmax(dl(b)), vmax(bt)});
  }
  out.push_back(make("bach.L_system", r, s));

  TTReport tt = certify_tt(gp, B);
  out.push_back(make("bach.symmetric", tt.symmetry, tt.scale));
  out.push_back(make("bach.trace", tt.trace, tt.scale));
  out.push_back(make("bach.divergence", tt.divergence, tt.scale));

  Multivector el = el_operator(gp, EnergySpec::single(TermKind::EA));
  ScalarT Bup = gp.raise_all(B);
  Vec bh = zero_vec(gp.m());
  for (std::size_t f = 0; f < Bup.size(); ++f) bh += gp.h.at(f) * Bup.at(f);
  Multivector res = el + values(bh);
  double sc = 0, rr = 0;
  for (std::size_t k = 0; k < res.size(); ++k) {
    rr = std::max(rr, std::abs(res[k]));
    sc = std::max({sc, std::abs(el[k]), std::abs(bh[k].value())});
  }
  out.push_back(make("bach.constrained_el", rr, sc, false));
  return out;
}

ResidualSet el_suite(const GeometryPoint& gp) {
  ResidualSet out;
  GeometryPoint c = gp.capped(2);
  const EnergySpec ea = EnergySpec::single(TermKind::EA);
  ParamForm V = noether_V(c, triple_ea(c));
  Vec dV = codifferential(c, V)(0);
  Multivector dv = values(dV);
  ExplicitEL ex = el_explicit_ea(gp);
  auto mx = [](const Multivector& v) {
    double m = 0;
    for (double x : v.coeffs()) m = std::max(m, std::abs(x));
    return m;
  };
  const double scale = std::max({mx(dv), mx(ex.rest), kGradCoeffDerived * mx(ex.grad)});
  out.push_back(make("el.explicit_vs_noether", mx(ex.with(kGradCoeffDerived) - dv), scale));
  out.push_back(make("el.explicit_printed_vs_noether", mx(ex.with(kGradCoeffPrinted) - dv),
                     std::max(scale, kGradCoeffPrinted * mx(ex.grad)), false));
  out.push_back(make("el.tangential_part", max_abs(c.tangent(dV)), max_abs(dV)));

  Vec dX = codifferential(c, x_field(c))(0);
  Multivector g = guven_residual(gp);
  Vec hh = zero_vec(c.m());
  ScalarT Hhup = c.raise_all(c.Hh());
  for (std::size_t f = 0; f < Hhup.size(); ++f) hh += c.h.at(f) * Hhup.at(f);
  out.push_back(make("guven.dstar_X", mx(g),
                     std::max({max_abs(dX), max_abs(c.LapH()), max_abs(hh), 8 * max_abs(c.H * c.H2())})));

  ParamForm dphi = dphi_form(c);
  Vec u = form_inner(c, u_field(c, ea, false), dphi, Pairing::Interior);
  Vec ue = form_inner(c, u_field(c, ea, true), dphi, Pairing::Interior);
  const double su = std::max(max_abs(u), 2 * max_abs(dX));
  out.push_back(make("huma4.U_dphi", max_abs(u + dX * 2.0), su));
  out.push_back(make("huma4.U_dphi_extra", max_abs(ue + dX * 2.0), std::max(su, max_abs(ue)), false));
  return out;
}

TTReport certify_tt(const GeometryPoint& gp, const ScalarT& T) {
  TTReport r;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) r.symmetry = std::max(r.symmetry, std::abs((T(i, j) - T(j, i)).value()));
  r.trace = std::abs(gp.trace(T, 0, 1).at(0).value());
  ScalarT dT = gp.nabla(T);
  ScalarT div = gp.trace(dT, 0, 1);
  for (int b = 0; b < kDim; ++b) r.divergence = std::max(r.divergence, std::abs(div(b).value()));
  r.scale = std::max(max_abs(T), max_abs(dT));
  return r;
}

Residual tt_forward_residual(const GeometryPoint& gp, const ScalarT& T) {
  std::array<Vec, 4> up;
  for (int j = 0; j < kDim; ++j) up[j] = gp.dphi_up(j);
  ParamForm y(1, 1, gp.m());
  for (int j = 0; j < kDim; ++j) {
    Vec acc = zero_vec(gp.m());
    for (int a = 0; a < kDim; ++a) acc += up[a] * T(a, j);
    y(j) = acc;
  }
  Vec lhs = codifferential(gp, y)(0);
  ScalarT Tup = gp.raise_all(T);
  Vec th = zero_vec(gp.m());
  for (std::size_t f = 0; f < Tup.size(); ++f) th += gp.h.at(f) * Tup.at(f);
  ScalarT div = gp.trace(gp.nabla(T), 0, 2);  // nabla^j T_aj
  Vec dt = zero_vec(gp.m());
  for (int a = 0; a < kDim; ++a) dt += up[a] * div(a);
  return make("tt.forward", max_abs(lhs - th - dt), std::max({max_abs(lhs), max_abs(th), max_abs(dt)}));
}

}  // namespace curv
