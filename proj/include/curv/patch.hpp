#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "curv/jet.hpp"

namespace curv {

using JetVec = std::vector<Jet>;  // one jet per ambient channel
using Point4 = std::array<double, 4>;
using JetPoint = std::array<Jet, 4>;

class ImmersionError : public std::runtime_error {
 public:
  explicit ImmersionError(const std::string& what) : std::runtime_error(what) {}
};

// How a parameter axis is integrated: periodic axes use the trapezoid rule,
// open intervals (polar angles, patches) use Gauss-Legendre.
enum class AxisKind { Periodic, Interval };

struct ImmersionPatch {
  std::string name;
  int m = 0;
  std::function<JetVec(const JetPoint&)> chart;
  // Orthonormal normal frame of the unperturbed chart, if known in closed form.
  std::function<std::vector<JetVec>(const JetPoint&)> normal_frame;
  Point4 lo{}, hi{};
  std::array<AxisKind, 4> axes{};
  bool closed = false;
  int euler = 0;  // Euler characteristic; only meaningful when closed
  int orientation = 1;
  std::vector<std::string> history;

  bool contains(const Point4& u) const;
  // A deterministic interior sample point for index k (used by suites).
  Point4 sample(std::uint64_t seed, int k) const;
};

// Taylor data of Phi at u through the given order; checks the immersion
// condition on the Gram matrix of first derivatives.
JetVec eval_jet(const ImmersionPatch& patch, const Point4& u, int order = Jet::kOrder);

// Preset registry.
ImmersionPatch preset_flat(int m = 5);
ImmersionPatch preset_sphere(double r);
ImmersionPatch preset_clifford_torus(double a);
ImmersionPatch preset_s2xs2(double a, double b);
ImmersionPatch preset_helicoid_product(double c1, double c2);
// Name-based lookup: flat, sphere, torus, s2xs2, helicoid. Parameters are
// positional (radius / radii / pitches); missing ones take defaults.
ImmersionPatch preset(const std::string& name, const std::vector<double>& params = {});

// Smooth ambient vector field b(x) = sum_k A_k sin(w_k . x + phase_k).
struct TrigField {
  int m = 0;
  std::vector<std::vector<double>> amp, freq;
  std::vector<double> phase;
  static TrigField random(int m, std::uint64_t seed, int terms = 3, double max_freq = 1.5);
  JetVec operator()(const JetVec& x) const;
};

// Phi + sum_k c_k B_k with B_k the normal projection of fields[k] taken on the
// base patch. Requires a closed-form normal frame. Halves the amplitude and
// retries (at most 5 times) if the immersion check fails on sample points.
ImmersionPatch perturb_normal(const ImmersionPatch& base, double eps, std::uint64_t seed);
ImmersionPatch perturb_normal_fields(const ImmersionPatch& base, const std::vector<TrigField>& fields,
                                     const std::vector<double>& coeffs);

// Any smooth map R^m -> R^m evaluated on jets.
using AmbientField = std::function<JetVec(const JetVec&)>;

// Phi + eps b(Phi) for an ambient field b; no normal frame is attached.
ImmersionPatch perturb_ambient(const ImmersionPatch& base, const TrigField& b, double eps);
ImmersionPatch perturb_ambient(const ImmersionPatch& base, const AmbientField& b, double eps);

struct MoebiusStep {
  enum class Kind { Translation, Rotation, Dilation, Inversion } kind;
  std::vector<double> vec;  // translation vector or inversion center
  std::vector<std::vector<double>> rot;
  double scale = 1.0;
};

struct MoebiusMap {
  std::vector<MoebiusStep> steps;
  MoebiusMap& translate(std::vector<double> t);
  MoebiusMap& rotate(std::vector<std::vector<double>> q);
  MoebiusMap& dilate(double s);
  MoebiusMap& invert(std::vector<double> center);
  JetVec apply(const JetVec& x) const;
  std::vector<double> apply(const std::vector<double>& x) const;
};

// Rotation by angle t in the (i, j) coordinate plane of R^m.
std::vector<std::vector<double>> plane_rotation(int m, int i, int j, double t);

ImmersionPatch apply_moebius(const MoebiusMap& map, const ImmersionPatch& patch);

// Portable uniform double in [0, 1) from a 64-bit generator draw.
double unit_uniform(std::uint64_t bits);

}  // namespace curv
