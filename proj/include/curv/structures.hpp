#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "curv/forms.hpp"
#include "curv/geometry.hpp"
#include "curv/noether.hpp"

namespace curv {

// Value-level frame of a point: inverse metric, d Phi, eta and the normal
// projector. All pointwise structure algebra runs on this.
struct PointFrame {
  int m = 0;
  Tensor<double> ginv;
  PointForm dphi;  // (1, 1)
  PointForm eta;   // (2, 2), eta_ij = d_i Phi ^ d_j Phi
  std::vector<double> proj;  // m x m normal projector, row major

  static PointFrame at(const GeometryPoint& gp);
  // Phi(u) = (u, 0, ..): unit metric, d_i Phi = e_i.
  static PointFrame flat(int m);
  Multivector normal(const Multivector& v) const;  // vectors only
};

// Pointwise algebra, 1-vector / 2-vector valued 2-forms. A = l ⌐· dPhi,
// B = 2 l ∧· dPhi, C = l ⌐∧ dPhi, D = 2 l ∧∧ dPhi.
// clarisse:  -3C - [eta ⌐• C + D ⌐• eta + eta ⌐ A - B ⌐ eta]
// clarisse2:  3A - [eta ⌐· C - D ⌐· eta]
ResidualSet propito_check(const PointFrame& fr, const PointForm& ell);
// eta^{ai} • (v ^ d_i Phi) + 3 v ^ d^a Phi for a normal vector v.
Residual bullet_normal_identity(const PointFrame& fr, const Multivector& v);

// Exact forms behind the divergence identity for 2-forms A, B with jets
// (pr = Scale for real forms, Dot or Bullet for 2-vector valued ones):
// first_line: A_ai (dB)^{aib} - 2 A_ai nabla^a B^{ib} - A_ai nabla^b B^{ai}
// choisi:     A ⌐ d*B -/+ dB ⌐ A - [d*(A ⊙ B) - d<A, B> + Rem]
//             (minus for Scale/Dot, plus for Bullet) with
//             Rem_b = (d*A)_i ⊛ B^i_b + 1/2 (nabla_b A_ai) ⊛ B^{ai} - (nabla^a A^i_b) ⊛ B_{ai}
// Needs A, B through order 2 at gp's point.
ResidualSet strucrs_check(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr);

// Random normal-valued data at a point:
// prop_last.a: R_n ⌐⌐ dPhi - <eta •, R_n> ⌐ dPhi, R_n = f_j ^ d^j Phi + (normal ^ normal)
// prop_last.b: pi_n(R_t ⌐⌐ dPhi) for tangent-valued R_t
// prop_last.c: <eta, S> ⌐ dPhi + S ⌐ dPhi (asserted)
// prop_last.c_printed: <eta, S> ⌐ dPhi - S ⌐ dPhi (reported)
ResidualSet prop_last_check(const PointFrame& fr, std::mt19937_64& rng);

// (R ⌐⌐ dPhi)_b = R_ab ⌐ d^a Phi, ambient interior on the values.
PointForm rr_dphi(const PointFrame& fr, const PointForm& r);
// <eta •, R> and <eta, S> as 0-forms.
PointForm eta_bullet_inner(const PointFrame& fr, const PointForm& r);
PointForm eta_inner(const PointFrame& fr, const PointForm& s);
// Q ⌐ dPhi for a 2-vector valued 0-form Q: (Q ⌐ dPhi)_i = Q ⌐ d_i Phi.
PointForm values_interior_dphi(const PointFrame& fr, const PointForm& q);

// L-system contractions on a minimal immersion with L = 0: G^i_i and the
// wedge part of the L-system equations.
ResidualSet lsystem_zero_check(const GeometryPoint& gp, const EnergySpec& spec);

// ---- Periodic grid forms ----------------------------------------------

// n^4 nodes on [0, length)^4 with period length in every axis.
struct PeriodicGrid {
  int n = 16;
  double length = 6.283185307179586;

  double h() const { return length / n; }
  std::size_t nodes() const { return std::size_t(n) * n * n * n; }
  std::size_t index(const std::array<int, 4>& i) const;
  std::array<int, 4> coords(std::size_t node) const;
  Point4 point(std::size_t node) const;
  // Node shifted by s steps along axis k (periodic).
  std::size_t shift(std::size_t node, int k, int s) const;
};

// Sorted index sets of a given degree and their lookup.
const std::vector<std::array<int, 4>>& index_sets(int p);
int index_set_position(int p, const std::array<int, 4>& sorted);

// Multivector valued p-form sampled on a periodic grid. Independent
// components only (sorted index sets); storage is channel-major per
// component: data[(comp * channels + ch) * nodes + node].
struct GridForm {
  PeriodicGrid grid;
  int p = 0, q = 0, m = 0;
  int comps = 0, channels = 0;
  std::vector<double> data;

  GridForm() = default;
  GridForm(const PeriodicGrid& g, int p, int q, int m);

  double& at(int comp, int ch, std::size_t node) { return data[(std::size_t(comp) * channels + ch) * grid.nodes() + node]; }
  double at(int comp, int ch, std::size_t node) const { return data[(std::size_t(comp) * channels + ch) * grid.nodes() + node]; }

  PointForm node_form(std::size_t node) const;  // full alternating array
  void set_node(std::size_t node, const PointForm& f);

  GridForm& operator+=(const GridForm& o);
  GridForm& operator-=(const GridForm& o);
  GridForm& operator*=(double s);
  friend GridForm operator+(GridForm a, const GridForm& b) { return a += b; }
  friend GridForm operator-(GridForm a, const GridForm& b) { return a -= b; }
  friend GridForm operator*(GridForm a, double s) { return a *= s; }

  double dot(const GridForm& o) const;  // sum over independent components
  double norm() const;
  double max_abs() const;
  void remove_mean();
};

// Second-order central differences on the unit-metric chart:
// (dS)_T = sum_r (-1)^r D_{T_r} S_{T \ T_r},  (d*S)_J = sum_{i not in J} D_i S_{iJ}.
// With D^T = -D these satisfy d^T = -d* and (d*)^T = -d.
GridForm grid_d(const GridForm& a);
GridForm grid_codiff(const GridForm& a);

struct CoexactResult {
  GridForm form;
  int iterations = 0;
  double normal_residual = 0;        // |A^T (A x - t)| / |A^T t|
  double codiff_residual = 0;        // |d* L - target| / |target|
  double d_residual = 0;             // |d L - d_target| / max(|d_target|, 1)
  std::vector<double> history;       // normal residual per iteration
};

// CG failure carries the residual history.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 10000;
};

// Least squares min |d* L - target|^2 + |d L - d_target|^2 over mean-zero grid
// p-forms (p = target.p + 1) by CG on the normal equations. d_target may be
// empty (default form) for a zero right-hand side.
CoexactResult solve_coexact(const GridForm& target, const GridForm& d_target, const SolverOptions& opt = {});

// Smooth periodic random p-form: each coefficient a short sum of
// a sin(k . u + phase) with integer wave vectors |k_i| <= 2.
GridForm random_grid_form(const PeriodicGrid& g, int p, int q, int m, std::mt19937_64& rng);
// Evaluates a pointwise map on every node.
GridForm map_nodes(const GridForm& a, int p, int q, const std::function<PointForm(const PointForm&)>& f);

// Potentials for a manufactured closed L on the flat periodic chart.
struct PotentialSet {
  GridForm L;  // (2, 1)
  GridForm S;  // (2, 0)
  GridForm R;  // (2, 2)
  GridForm U;  // (1, 2), defined from L and the manufactured R
  CoexactResult l_solve, s_solve, r_solve;  // l_solve: trace correction of L
};

struct SrReport {
  PotentialSet pots;
  ResidualSet residuals;
};

// Manufactured pipeline: L = d lambda minus a closed correction that removes
// (d* L)^j . d_j Phi (reported as solve.L_trace, solve.L_closed), R0 random, U := L ⌐∧ dPhi - d* R0; S
// and R are recovered by solve_coexact from (L ⌐· dPhi, 2 L ∧· dPhi) and
// (L ⌐∧ dPhi - U, 2 L ∧∧ dPhi). Residual ids:
// solve.S_codiff, solve.R_codiff, solve.S_d (gauge target), solve.R_d,
// sysSR1.first, sysSR1.second (derived +Y, +Z), sysSR1.first_printed and
// sysSR1.second_printed (reported, -Y, -Z), corollary.first, corollary.second,
// corollary.laplace_q, return.exact, return.printed (reported), return.S_only.
// `zero_l` runs the same pipeline with L = 0 and R0 = 0.
SrReport sr_manufactured(const PeriodicGrid& g, int m, std::uint64_t seed, const SolverOptions& opt = {},
                         bool zero_l = false);

// Max nodal error of the discrete codifferential of a smooth periodic 2-form
// against its exact value, for grids n and 2n; order = log2(e_n / e_2n).
struct ConvergenceRow {
  int n = 0;
  double error = 0;
};
struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double order = 0;
};
ConvergenceStudy codiff_convergence(const std::vector<int>& ns, std::uint64_t seed);

}  // namespace curv
