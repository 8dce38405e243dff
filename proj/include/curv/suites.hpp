#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "curv/energies.hpp"
#include "curv/noether.hpp"
#include "curv/structures.hpp"

namespace curv {

// Label of the displayed equation or statement an identity id belongs to,
// e.g. "simo4" for simons.*; "" when the id is unknown.
std::string paper_anchor(const std::string& identity_id);
// Tolerance (relative to the natural scale) an identity is held to.
double identity_tolerance(const std::string& identity_id);

// Pointwise residual families. All need jets of order 6 in gp.
// gauss.riemann, weyl.extrinsic, weyl.trace_free, weyl.norm, codazzi,
// lanczos.weyl. codazzi_factor other than 4 is the negative control.
ResidualSet geometry_suite(const GeometryPoint& gp, double codazzi_factor = 4.0);
// simons.pointwise.
ResidualSet simons_suite(const GeometryPoint& gp);
// prop1 (for spec), the conformal quartic lemmas, the lower-order lemma, Bach,
// Euler-Lagrange dual paths, Guven, huma4 and tt.forward for the Bach tensor.
ResidualSet noether_suite(const GeometryPoint& gp, const EnergySpec& spec);
// clarisse, clarisse2 (random l, normal-valued for odd k), bullet_normal,
// prop_last, and for k % 4 == 0 strucrs for all three pairings on random
// jets (about 0.5 s per point, 200 times the pure algebra).
ResidualSet structures_suite(const GeometryPoint& gp, const Point4& u, std::mt19937_64& rng, int k);

// One identity aggregated over the sample points of one preset.
struct IdentityRow {
  std::string identity_id;
  std::string paper_anchor;
  std::string preset;
  std::string suite;
  int point_count = 0;
  double max_residual = 0;
  double scale = 0;        // largest natural scale seen
  double worst_ratio = 0;  // max residual / scale over points with scale > 0
  double tolerance = 0;
  bool asserted = true;
  bool pass = true;  // every point within tolerance * scale + 1e-12
};

struct IdentityReport {
  std::vector<IdentityRow> rows;
  double el_sign = -1;  // W = el_sign * d*V
  bool pass() const;    // all asserted rows
  std::vector<std::string> failures() const;
};

struct SuiteConfig {
  std::vector<std::string> suites = {"geometry", "energies", "noether", "structures"};
  std::vector<std::string> presets = {"sphere", "torus", "s2xs2"};
  int points = 100;
  std::uint64_t seed = 7;
  double perturbation = 0.05;  // normal perturbation size of every preset
  double codazzi_factor = 4.0;
  EnergySpec spec = EnergySpec::parse("ea=1,h0_4=0.3,angle4=-0.2,h0sq2=0.5,tr4=0.7,w2=0.25");
  int grid = 8;               // periodic grid for the (S, R) pipeline
  int translation_grid = 32;  // {n, n, 2, 2} nodes for noether.translation
  int threads = 1;
  // Identity-id prefix -> tolerance; the longest matching prefix wins over
  // identity_tolerance.
  std::map<std::string, double> tolerance;
};

// Names accepted in SuiteConfig::suites.
const std::vector<std::string>& suite_names();

// The preset as sampled by the suites: preset(name) perturbed along its
// normal bundle by eps (nothing when eps = 0).
ImmersionPatch suite_preset(const std::string& name, double eps, std::uint64_t seed);

// Runs every selected suite on every preset. Points are spread over
// `threads` workers; rows are reduced in point order, so the report does not
// depend on the thread count. Throws std::invalid_argument on an empty or
// unknown suite selection.
IdentityReport run_identity_suites(const SuiteConfig& cfg);

// Divergence theorem for the Noether field: |int d*V dvol| against
// int |d*V| dvol on a closed patch. id "noether.translation". On the
// symmetric torus with eps = 0.05 the trapezoid ratio is 9e-6, 7e-9, 2e-12
// at n = 16, 24, 32.
Residual translation_invariance(const ImmersionPatch& patch, const EnergySpec& spec, std::array<int, 4> grid);

// SO(2) x SO(2)-symmetric perturbed Clifford torus and a matching variation
// field: every scalar integrand is constant in u2, u3.
ImmersionPatch symmetric_torus(double eps, std::uint64_t seed);
TrigField symmetric_field(std::uint64_t seed);

// First variation against int B . W on the symmetric torus, per spec:
// variation.<spec> (relative error at eps = 1e-4, tolerance 1e-5) and
// variation_slope.<spec> (|slope - 2| over eps = 1e-2, 5e-3).
std::vector<IdentityRow> variation_suite(const std::vector<EnergySpec>& specs,
                                         const std::map<std::string, double>& tolerance = {});

// Sign s with W = s d*V, from the first variation of E_A on the symmetric
// torus (slope and agreement are in `check`).
struct SignResolution {
  double sign = -1;
  VariationResult check;
};
SignResolution resolve_el_sign();

}  // namespace curv
