#pragma once

#include <array>
#include <string>
#include <vector>

#include "curv/energies.hpp"
#include "curv/forms.hpp"
#include "curv/geometry.hpp"
#include "curv/patch.hpp"

namespace curv {

// Terms of a conformally invariant energy: E_A plus the trace-free quartics and
// the Weyl energy.
enum class TermKind { EA, H04, ANGLE4, H0SQ2, TR4, WEYL };
constexpr int kTermCount = 6;
const char* term_name(TermKind k);
TermKind term_from_name(const std::string& name);  // throws on unknown names
DensityKind term_density(TermKind k);

struct EnergySpec {
  std::array<double, kTermCount> coeff{};

  double& operator[](TermKind k) { return coeff[int(k)]; }
  double operator[](TermKind k) const { return coeff[int(k)]; }
  static EnergySpec single(TermKind k, double c = 1.0);
  // "ea=1,h0_4=0.5"; names as in term_name. Throws on unknown names.
  static EnergySpec parse(const std::string& text);
  std::string str() const;
  double evaluate(const EnergyIntegrals& e) const;
};

// Quartics in h. Raw forms first, then the four trace-free ones, then |W|^2.
enum class Quartic {
  Angle,     // <h^4> = (h^ij . h^kl)(h_ij . h_kl)
  Trace,     // Tr h^4
  Square,    // |h^2|^2
  Norm4,     // |h|^4
  MixedHh,   // 4 <h^2, H.h>
  Hh2,       // 16 |H.h|^2
  H2h2,      // 16 |H|^2 |h|^2
  H4,        // 256 |H|^4
  Angle0,    // <h0^4>
  Trace0,    // Tr h0^4
  Square0,   // |h0^2|^2
  Norm04,    // |h0|^4
  Weyl       // |W|^2
};
constexpr int kQuarticCount = 13;
const char* quartic_name(Quartic q);
Quartic quartic_from_name(const std::string& name);
const std::array<Quartic, kQuarticCount>& all_quartics();

// (G, F, C) with all indices down. F and C are normal-valued.
struct NoetherTriple {
  ScalarT G;  // G_ij
  VecT F;     // F_ij
  VecT C;     // C_j
  Jet E;      // the integrand itself

  NoetherTriple& operator+=(const NoetherTriple& o);
  NoetherTriple& operator*=(double s);
};
NoetherTriple zero_triple(int m);

// Triple of |pi_n dH|^2.
NoetherTriple triple_dirichlet(const GeometryPoint& gp);
// Triple of a |H.h|^2 + alpha |H|^4.
NoetherTriple triple_lower(const GeometryPoint& gp, double a, double alpha);
// E_A = |pi_n dH|^2 - |H.h|^2 + 7|H|^4.
NoetherTriple triple_ea(const GeometryPoint& gp);
// Triple of a quartic: F = dE/dh, G = -F^{rb}.h^s_b + E g^rs, C = 0. For the
// Weyl energy G is returned in the reduced form -4 W^{iakb} P_ab.
NoetherTriple triple_quartic(const GeometryPoint& gp, Quartic q);
// The generic quartic G for |W|^2, kept for the comparison with the reduced form.
ScalarT weyl_G_generic(const GeometryPoint& gp, const NoetherTriple& t);
NoetherTriple triple_for(const GeometryPoint& gp, const EnergySpec& spec);
Quartic term_quartic(TermKind k);  // throws for EA

// V_j = G^i_j d_i Phi - pi_n nabla^i F_ij + C_j.
ParamForm noether_V(const GeometryPoint& gp, const NoetherTriple& t);
// V for |W|^2 written directly through W, P and h.
ParamForm noether_V_weyl(const GeometryPoint& gp);

// Euler-Lagrange field with the sign of the first variation:
// dE/deps = int B . el dvol for normal variations B. Equals -d*V.
// Needs Phi through order 6 when E_A or a quartic is present.
Multivector el_operator(const GeometryPoint& gp, const EnergySpec& spec);
// d*V at value level (no sign flip).
Multivector divergence_V(const GeometryPoint& gp, const EnergySpec& spec);
// Closed-form Euler-Lagrange field for E_A, split so the coefficient of the
// pi_n nabla_j(H nabla^j |H|^2) term can be chosen: field = rest + c * grad.
struct ExplicitEL {
  Multivector rest, grad;
  Multivector with(double c) const { return rest + grad * c; }
};
ExplicitEL el_explicit_ea(const GeometryPoint& gp);
constexpr double kGradCoeffPrinted = 8.0;
constexpr double kGradCoeffDerived = 4.0;

// X_j = pi_n nabla_j H - (2|H|^2 g_ij - H.h_ij) d^i Phi.
ParamForm x_field(const GeometryPoint& gp);
// d*X - (Delta_perp H + <H.h, h> - 8|H|^2 H), value level.
Multivector guven_residual(const GeometryPoint& gp);

// U_i = -F_ij ^ d^j Phi + 2 H ^ pi_n nabla_i H - 1/3 f_ij ^ d^j Phi with
// f = |H|^2 (h - 4 H g), F from the E_A + quartic part of spec. With
// `with_extra` the term 2 (H.h_ij) H ^ d^j Phi is added as well.
ParamForm u_field(const GeometryPoint& gp, const EnergySpec& spec, bool with_extra = false);

// One pointwise identity: residual magnitude against the magnitude of the
// terms it balances. `asserted` is false for values that are only reported.
struct Residual {
  std::string id;
  double value = 0;
  double scale = 0;
  bool asserted = true;
  // value <= rel_tol * scale + abs_tol; the absolute part only matters where
  // both sides vanish identically (scale at roundoff).
  bool passes(double rel_tol, double abs_tol = 1e-12) const { return value <= rel_tol * scale + abs_tol; }
};
using ResidualSet = std::vector<Residual>;

// Conservation-law identities of the total triple of spec (E_A + quartics):
// prop1_i:   G^i_i - c_A Delta|H|^2
// prop1_ii:  h_m^j . (-nabla^i F_ij + C_j) - nabla^i G_im
// prop1_iii: (-pi_n nabla^i F_ij + C_j) ^ d^j Phi - nabla^i (-F_ij ^ d^j Phi + 2 c_A H ^ pi_n nabla_i H)
// prop1_iii_extra (reported): same with 2 c_A (H.h_ij) H ^ d^j Phi inside the divergence.
// Needs Phi through order 5.
ResidualSet prop1_suite(const GeometryPoint& gp, const EnergySpec& spec);
// For the trace-free quartics and |W|^2: trace F, F^rs ^ h_rs, h0.nabla F - 3 nabla E,
// h^i_j . nabla_k F^kj + nabla_k G^ik, the wedge-divergence identity, symmetry of
// h.F, <h, F> - 4E, trace G, and (Weyl only) the reduced-G and direct-V forms.
ResidualSet lemma_quartic_suite(const GeometryPoint& gp, Quartic q);
// Same family for a |H.h|^2 + alpha |H|^4 (h in place of h0).
ResidualSet lemma_lower_suite(const GeometryPoint& gp, double a, double alpha);
// Cotton form against the Weyl divergence, -1/4 V_W + d*l - B^ij d_j Phi, Bach
// symmetry/trace/divergence, and (reported) the constrained residual el + <B, h>.
ResidualSet bach_suite(const GeometryPoint& gp);
// Dual paths for the Euler-Lagrange field and the X, U fields.
ResidualSet el_suite(const GeometryPoint& gp);

struct TTReport {
  double symmetry = 0, trace = 0, divergence = 0, scale = 0;
  bool certified(double tol) const;
};
TTReport certify_tt(const GeometryPoint& gp, const ScalarT& T);
// d*(T^ij d_i Phi) - <T, h> - (nabla^j T_ij) d^i Phi for a symmetric field T.
Residual tt_forward_residual(const GeometryPoint& gp, const ScalarT& T);

// Flat-ambient first variation of a closed immersion.
struct VariationRow {
  double eps = 0;
  double fd = 0;       // (E(+eps) - E(-eps)) / (2 eps)
  double rel_err = 0;  // |fd - rhs| / |rhs|
};
struct VariationResult {
  double rhs = 0;  // int B . el dvol
  // int B . (closed-form E_A field) with the printed and the derived gradient
  // coefficient; only filled when spec has an E_A part (unit coefficient).
  double rhs_explicit_printed = 0, rhs_explicit_derived = 0;
  std::vector<VariationRow> rows;
  double richardson = 0;  // from the two smallest eps
  double richardson_rel = 0;
  double slope = 0;       // log2 error ratio of the two largest eps
  std::size_t nodes = 0;
};

// Perturbation is Phi + eps b(Phi). Tangential parts of b do not change the
// first variation on a closed immersion, so rhs uses b directly.
VariationResult variation_check(const ImmersionPatch& base, const EnergySpec& spec, const AmbientField& b,
                                const std::vector<double>& eps, std::array<int, 4> grid_fd,
                                std::array<int, 4> grid_el);

}  // namespace curv
