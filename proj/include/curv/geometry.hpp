#pragma once

#include <array>
#include <optional>
#include <vector>

#include "curv/jet.hpp"
#include "curv/multivector.hpp"
#include "curv/patch.hpp"
#include "curv/tensor.hpp"

namespace curv {

using Vec = BasicMultivector<Jet>;  // ambient multivector with jet coefficients
using ScalarT = Tensor<Jet>;
using VecT = Tensor<Vec>;

Vec partial(const Vec& v, int k);
Vec make_vec(const JetVec& x);
Vec zero_vec(int m, int grade = 1);
double value_norm(const Vec& v);  // Euclidean norm of the coefficient values
Multivector values(const Vec& v);

// Pointwise induced geometry of an immersion from the Taylor data of Phi.
// Degrees: Phi at order N gives g at N-1, h and Christoffels at N-2.
class GeometryPoint {
 public:
  explicit GeometryPoint(const JetVec& phi);

  int m() const { return m_; }
  int order() const { return order_; }

  std::array<Vec, 4> dphi;  // d_i Phi
  VecT d2phi;               // d_i d_j Phi
  ScalarT g, ginv;
  Jet sqrt_det_g;
  ScalarT gamma;            // gamma(k, i, j) = Christoffel symbol Gamma^k_ij
  std::array<Vec, 4> frame;  // orthonormal tangent frame (Gram-Schmidt)
  VecT h;                   // second fundamental form h_ij (normal-valued)
  Vec H;                    // mean curvature vector, 1/4 g^ij h_ij
  VecT h0;                  // h - g H

  // Normal projection through the Gram-Schmidt frame.
  Vec normal(const Vec& v) const;
  // Same projection written as v - g^kl (v . d_k Phi) d_l Phi.
  Vec normal_metric(const Vec& v) const;
  Vec tangent(const Vec& v) const { return v - normal(v); }
  // d^i Phi = g^ij d_j Phi.
  Vec dphi_up(int i) const;

  // Covariant derivatives; the new derivative index comes first.
  ScalarT nabla(const ScalarT& t) const;
  VecT nabla_flat(const VecT& t) const;    // ambient values differentiated as R^m-valued
  VecT nabla_normal(const VecT& t) const;  // pi_n applied after differentiation
  // g^{ab} contraction of slots s1 < s2.
  ScalarT trace(const ScalarT& t, int s1, int s2) const;
  VecT trace(const VecT& t, int s1, int s2) const;
  // All slots raised with g^{-1}.
  ScalarT raise_all(const ScalarT& t) const;
  VecT raise_all(const VecT& t) const;
  // Full contraction A_{i..} B^{i..} (B given with lower indices).
  Jet full_dot(const ScalarT& a, const ScalarT& b) const;
  Jet full_dot(const VecT& a, const VecT& b) const;

  // Cached derived fields.
  const VecT& DH() const;    // pi_n nabla_i H
  const Vec& LapH() const;   // Delta_perp H
  const VecT& Dh() const;    // pi_n nabla_k h_ij
  const ScalarT& Hh() const;  // H . h_ij
  Jet H2() const { return dot(H, H); }

  // Copy with every jet (including DH, LapH, Hh) cut to degree <= d. Used to
  // keep products cheap when only low-order output is needed.
  GeometryPoint capped(int d) const;
  // Drops DH, LapH, Dh, Hh; needed after editing the public fields directly.
  void clear_caches() const {
    dh_cache_.reset();
    dH_cache_.reset();
    lap_cache_.reset();
    hh_cache_.reset();
  }

 private:
  int m_ = 0;
  int order_ = 0;
  mutable std::optional<VecT> dh_cache_, dH_cache_;
  mutable std::optional<Vec> lap_cache_;
  mutable std::optional<ScalarT> hh_cache_;
};

GeometryPoint geometry_at(const ImmersionPatch& patch, const Point4& u, int order = Jet::kOrder);

// Kulkarni-Nomizu product of symmetric 2-tensors.
ScalarT kulkarni_nomizu(const ScalarT& a, const ScalarT& b);
// Normal-valued product (h ⊙· h)_{ijkl} with dot products of the values.
ScalarT kulkarni_nomizu_dot(const VecT& a, const VecT& b);

struct CurvatureSet {
  ScalarT Rm;   // Rm_ijkl = h_ik.h_jl - h_il.h_jk
  ScalarT Ric;  // Ric_ik = g^jl Rm_ijkl
  Jet R;
  ScalarT P;    // Ric - R/6 g
  ScalarT W;    // Rm - 1/2 P o g
};

CurvatureSet curvature_extrinsic(const GeometryPoint& gp);
// Riemann tensor from metric derivatives only (Christoffels of g), in the same
// index convention as the Gauss equation.
ScalarT curvature_intrinsic(const GeometryPoint& gp);
// Weyl tensor from the trace-free second fundamental form.
ScalarT weyl_extrinsic(const GeometryPoint& gp);
// The same combination with the coefficients (-1/2, -1/6) as they appear in
// the source display; kept for the record of the discrepancy.
ScalarT weyl_extrinsic_as_printed(const GeometryPoint& gp);
// C_abc = nabla_a P_bc - nabla_b P_ac.
ScalarT cotton(const GeometryPoint& gp, const CurvatureSet& cs);
// 2 g^ij nabla_j W_icab, indexed (a, b, c).
ScalarT weyl_divergence(const GeometryPoint& gp, const CurvatureSet& cs);
// B_ab = Delta P_ab - nabla^c nabla_a P_cb + P^ij W_aibj.
ScalarT bach(const GeometryPoint& gp, const CurvatureSet& cs);

// pi_n nabla_i h^ij - factor * pi_n nabla^j H (factor 4 in dimension 4).
std::array<Vec, 4> codazzi_residual(const GeometryPoint& gp, double factor = 4.0);

Jet cap(const Jet& x, int d);
Vec cap(const Vec& v, int d);
ScalarT cap(const ScalarT& t, int d);
VecT cap(const VecT& t, int d);

// Maximum absolute coefficient value over a tensor's entries.
double max_abs(const ScalarT& t);
double max_abs(const VecT& t);
double max_abs(const Vec& v);
double max_abs(const Multivector& v);

}  // namespace curv
