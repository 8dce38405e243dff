#pragma once

#include <array>
#include <string>
#include <vector>

#include "curv/geometry.hpp"
#include "curv/patch.hpp"

namespace curv {

enum class DensityKind { EA, EC, H04, ANGLE4, H0SQ2, TR4, W2, CGB, DH2 };
constexpr int kDensityCount = 9;
inline constexpr double kPi2 = 9.869604401089358;  // pi^2
const char* density_name(DensityKind k);
DensityKind density_from_name(const std::string& name);  // throws on unknown names
const std::array<DensityKind, kDensityCount>& all_densities();

// Conformally invariant integrands and their ingredients at one point.
struct EnergyDensity {
  double ea = 0;       // |pi_n dH|^2 - |H.h|^2 + 7|H|^4
  double ec = 0;       // |pi_n dh|^2 - 12|H.h|^2 + 6|H|^2|h|^2 + 60|H|^4
  double q_h0_4 = 0;   // |h0|^4
  double q_angle = 0;  // <h0^4>
  double q_h0sq = 0;   // |h0^2|^2
  double q_tr = 0;     // Tr_g h0^4
  double w2 = 0;       // |W|^2 from the extrinsic Weyl tensor
  double cgb = 0;      // |Rm|^2 - 4|Ric|^2 + R^2
  double dH2 = 0;      // |pi_n dH|^2 alone (not conformally invariant)
  double dvol = 0;

  double get(DensityKind k) const;
};

// Requires Phi through order 3.
EnergyDensity density(const GeometryPoint& gp);

// The quartic combination 2<h0^4> - 2 Tr h0^4 - 2|h0^2|^2 + 1/3 |h0|^4.
double w2_quartic(const EnergyDensity& e);

struct SimonsResidual {
  double lhs = 0, rhs = 0, residual = 0, scale = 0;
};
// Pointwise Simons chain: 8 nabla_ij(H.h^ij - 4|H|^2 g^ij) + Delta R + c against
// 32 ea - 2 ec + 6|h0^2|^2 - 2<h0^4> + 3|W|^2. Requires order 4.
SimonsResidual simons_pointwise_residual(const GeometryPoint& gp);

struct QuadratureGrid {
  std::array<std::vector<double>, 4> nodes, weights;
  std::size_t size() const;
};

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);
// n nodes per axis: trapezoid on periodic axes, Gauss-Legendre on intervals.
QuadratureGrid make_grid(const ImmersionPatch& patch, std::array<int, 4> n);
QuadratureGrid make_grid(const ImmersionPatch& patch, int n);

struct EnergyIntegrals {
  std::array<double, kDensityCount> value{};
  double volume = 0;
  std::size_t nodes = 0;
  double get(DensityKind k) const { return value[int(k)]; }
};

// Integrates all densities at once. Throws for non-closed patches.
EnergyIntegrals integrate_all(const ImmersionPatch& patch, const QuadratureGrid& grid);
double integrate(const ImmersionPatch& patch, DensityKind kind, const QuadratureGrid& grid);
// Same sums over the chart box of a patch that need not be closed; no
// topological claim attaches to the result.
EnergyIntegrals integrate_domain(const ImmersionPatch& patch, const QuadratureGrid& grid);

// Deterministic pairwise summation.
double pairwise_sum(const double* v, std::size_t n);

struct SimidResult {
  double lhs = 0, rhs = 0, residual = 0;
};
// 16 E_A - E_C + int(3|h0^2|^2 - <h0^4>) against 16 pi^2 chi - 3/2 int |W|^2.
SimidResult simid_check(const ImmersionPatch& patch, const QuadratureGrid& grid);
SimidResult simid_from(const EnergyIntegrals& e, int euler);

struct ConformalRow {
  DensityKind kind;
  double before = 0, after = 0, relative_change = 0;
  // max |density dvol (mapped) - density dvol (original)| over nodes; only
  // filled for pointwise invariant densities (quartics and |W|^2), else -1.
  double pointwise_change = -1;
};
std::vector<ConformalRow> conformal_invariance_check(const ImmersionPatch& patch, const MoebiusMap& map,
                                                     const QuadratureGrid& grid);

}  // namespace curv
