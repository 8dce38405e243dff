#pragma once

#include <random>

#include "curv/form_algebra.hpp"
#include "curv/geometry.hpp"

namespace curv {

using ParamForm = BasicForm<Jet>;    // jet coefficients, metric from a GeometryPoint
using PointForm = BasicForm<double>;  // plain values, metric passed explicitly

// 0-form holding a single multivector.
ParamForm scalar_form(const Vec& v);
// d Phi as a vector-valued 1-form.
ParamForm dphi_form(const GeometryPoint& gp);
// eta_ij = d_i Phi ^ d_j Phi.
ParamForm eta_form(const GeometryPoint& gp);

// (dA)_{i0..ip} = (p+1) nabla_[i0 A_i1..ip].
ParamForm exterior_d(const GeometryPoint& gp, const ParamForm& a);
// (d* A)_{i1..} = g^{jk} nabla_k A_{j i1..}.
ParamForm codifferential(const GeometryPoint& gp, const ParamForm& a);
// (*A)_{i..} = (1/p!) eps_{i.. j..} A^{j..} with eps = |g|^{1/2} sign.
ParamForm hodge(const GeometryPoint& gp, const ParamForm& a);

// Metric-aware algebra (form_interior, form_inner, form_odot) at a point; the
// templates in form_algebra.hpp take ginv directly.
ParamForm form_interior(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr);
Vec form_inner(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr);
ParamForm form_odot(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr);
// Normal projection of every component.
ParamForm form_normal(const GeometryPoint& gp, const ParamForm& a);

double max_abs(const ParamForm& a);
double max_abs(const PointForm& a);

// Values of a jet form, and the value-level metric of a point.
PointForm values(const ParamForm& a);
ParamForm to_jets(const PointForm& a);
Tensor<double> ginv_values(const GeometryPoint& gp);

// Random smooth form with jets about u (exact through degree `order`): every
// coefficient is a short sum of a sin(w . x + phase) terms. Used as generic
// input by property checks.
ParamForm random_form(std::mt19937_64& rng, const Point4& u, int p, int q, int m, int order = Jet::kOrder);
// Same with constant coefficients in [-1, 1].
ParamForm random_constant_form(std::mt19937_64& rng, int p, int q, int m);

}  // namespace curv
