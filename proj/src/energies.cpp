#include "curv/energies.hpp"

#include <cmath>
#include <stdexcept>

namespace curv {

namespace {

constexpr std::array<const char*, kDensityCount> kNames = {"EA",    "EC", "H04", "ANGLE4", "H0SQ2",
                                                           "TR4",   "W2", "CGB", "DH2"};

using VecVals = std::vector<std::vector<double>>;  // flat tensor index -> ambient vector

double vdot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

VecVals to_values(const VecT& t) {
  VecVals r(t.size());
  for (std::size_t f = 0; f < t.size(); ++f) {
    const Vec& v = t.at(f);
    r[f].resize(v.size());
    for (std::size_t b = 0; b < v.size(); ++b) r[f][b] = v[b].value();
  }
  return r;
}

// Raises every slot of a rank-r value tensor.
VecVals raise_values(const VecVals& t, int rank, const double gi[4][4]) {
  VecVals cur = t;
  const std::size_t m = t.empty() ? 0 : t[0].size();
  for (int s = 0; s < rank; ++s) {
    const std::size_t stride = std::size_t(1) << (2 * (rank - 1 - s));
    VecVals nxt(cur.size(), std::vector<double>(m, 0.0));
    for (std::size_t f = 0; f < cur.size(); ++f) {
      const int i = int((f / stride) & 3u);
      const std::size_t base = f - std::size_t(i) * stride;
      for (int a = 0; a < 4; ++a) {
        const auto& src = cur[base + std::size_t(a) * stride];
        for (std::size_t c = 0; c < m; ++c) nxt[f][c] += gi[i][a] * src[c];
      }
    }
    cur = std::move(nxt);
  }
  return cur;
}

// Value of pi_n nabla t for a normal-valued tensor (new index first), read
// off the first-order Taylor coefficients; avoids jet arithmetic.
VecVals nabla_normal_values(const GeometryPoint& gp, const VecT& t) {
  const int r = t.rank();
  const std::size_t n = t.size(), m = std::size_t(gp.m());
  VecVals val = to_values(t), out(4 * n, std::vector<double>(m, 0.0));
  double gam[4][4][4], fr[4][16];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) gam[a][b][c] = gp.gamma(a, b, c).value();
  for (int a = 0; a < 4; ++a)
    for (std::size_t c = 0; c < m; ++c) fr[a][c] = gp.frame[a][c].value();
  for (std::size_t f = 0; f < n; ++f) {
    auto idx = t.unflatten(f);
    for (int j = 0; j < 4; ++j) {
      std::vector<double>& acc = out[std::size_t(j) * n + f];
      for (std::size_t c = 0; c < m; ++c) acc[c] = t.at(f)[c].coeff(1 + j);
      for (int s = 0; s < r; ++s) {
        auto jdx = idx;
        for (int l = 0; l < 4; ++l) {
          jdx[s] = l;
          const double G = gam[l][j][idx[s]];
          const auto& src = val[t.flatten(jdx)];
          for (std::size_t c = 0; c < m; ++c) acc[c] -= G * src[c];
        }
      }
      for (int a = 0; a < 4; ++a) {
        double p = 0;
        for (std::size_t c = 0; c < m; ++c) p += fr[a][c] * acc[c];
        for (std::size_t c = 0; c < m; ++c) acc[c] -= p * fr[a][c];
      }
    }
  }
  return out;
}

double full_contract(const VecVals& low, const VecVals& up) {
  double s = 0;
  for (std::size_t f = 0; f < low.size(); ++f) s += vdot(low[f], up[f]);
  return s;
}

using DT = Tensor<double>;

DT raise_scalar(const DT& t, const double gi[4][4]) {
  DT cur = t;
  const int rank = t.rank();
  for (int s = 0; s < rank; ++s) {
    const std::size_t stride = std::size_t(1) << (2 * (rank - 1 - s));
    DT nxt(rank, 0.0);
    for (std::size_t f = 0; f < cur.size(); ++f) {
      const int i = int((f / stride) & 3u);
      const std::size_t base = f - std::size_t(i) * stride;
      double acc = 0;
      for (int a = 0; a < 4; ++a) acc += gi[i][a] * cur.at(base + std::size_t(a) * stride);
      nxt.at(f) = acc;
    }
    cur = std::move(nxt);
  }
  return cur;
}

double norm2(const DT& t, const double gi[4][4]) {
  DT up = raise_scalar(t, gi);
  double s = 0;
  for (std::size_t f = 0; f < t.size(); ++f) s += t.at(f) * up.at(f);
  return s;
}

DT kn(const DT& a, const DT& b) {
  DT r(4, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          r(i, j, k, l) = a(i, k) * b(j, l) + a(j, l) * b(i, k) - a(i, l) * b(j, k) - a(j, k) * b(i, l);
  return r;
}

struct Quartics {
  double h0_4, angle, h0sq, tr, h0_2;
};

Quartics quartics(const VecVals& h0, const double gi[4][4]) {
  VecVals up = raise_values(h0, 2, gi);
  double A[4][4][4][4], B[4][4][4][4];  // A = h0_ij . h0_kl, B = h0^ij . h0^kl
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          A[i][j][k][l] = vdot(h0[4 * i + j], h0[4 * k + l]);
          B[i][j][k][l] = vdot(up[4 * i + j], up[4 * k + l]);
        }
  Quartics q{};
  double n2 = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) n2 += vdot(h0[4 * i + j], up[4 * i + j]);
  q.h0_2 = n2;
  q.h0_4 = n2 * n2;
  // (h0^2)_ij = g^kl h0_ik . h0_lj, then |h0^2|^2 = g^ia g^jb (h0^2)_ij (h0^2)_ab
  double sq[4][4] = {}, squp[4][4] = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) sq[i][j] += gi[k][l] * A[i][k][l][j];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) squp[i][j] += gi[i][a] * gi[j][b] * sq[a][b];
  double angle = 0, tr = 0, h0sq = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      h0sq += sq[i][j] * squp[i][j];
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          angle += B[i][j][k][l] * A[i][j][k][l];
          tr += B[i][j][k][l] * A[i][k][j][l];
        }
    }
  q.angle = angle;
  q.tr = tr;
  q.h0sq = h0sq;
  return q;
}

}  // namespace

const char* density_name(DensityKind k) { return kNames[int(k)]; }

DensityKind density_from_name(const std::string& name) {
  for (int i = 0; i < kDensityCount; ++i)
    if (name == kNames[i]) return DensityKind(i);
  throw std::invalid_argument("unknown density '" + name + "'");
}

const std::array<DensityKind, kDensityCount>& all_densities() {
  static const std::array<DensityKind, kDensityCount> all = {
      DensityKind::EA,  DensityKind::EC, DensityKind::H04, DensityKind::ANGLE4, DensityKind::H0SQ2,
      DensityKind::TR4, DensityKind::W2, DensityKind::CGB, DensityKind::DH2};
  return all;
}

double EnergyDensity::get(DensityKind k) const {
  switch (k) {
    case DensityKind::EA: return ea;
    case DensityKind::EC: return ec;
    case DensityKind::H04: return q_h0_4;
    case DensityKind::ANGLE4: return q_angle;
    case DensityKind::H0SQ2: return q_h0sq;
    case DensityKind::TR4: return q_tr;
    case DensityKind::W2: return w2;
    case DensityKind::CGB: return cgb;
    case DensityKind::DH2: return dH2;
  }
  return 0;
}

EnergyDensity density(const GeometryPoint& gp) {
  if (gp.order() < 3) throw DepthError("energy densities need Phi through order 3");
  double gi[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gi[i][j] = gp.ginv(i, j).value();
  EnergyDensity e;
  VecT Ht(0);
  Ht.at(0) = gp.H;
  VecVals h = to_values(gp.h), h0 = to_values(gp.h0);
  VecVals dH = nabla_normal_values(gp, Ht), dh = nabla_normal_values(gp, gp.h);
  std::vector<double> H(gp.H.size());
  for (std::size_t b = 0; b < H.size(); ++b) H[b] = gp.H[b].value();
  const double H2 = vdot(H, H);
  const double h2 = full_contract(h, raise_values(h, 2, gi));
  VecVals Hh(16, std::vector<double>(1));
  for (int f = 0; f < 16; ++f) Hh[f][0] = vdot(H, h[f]);
  const double Hh2 = full_contract(Hh, raise_values(Hh, 2, gi));
  e.dH2 = full_contract(dH, raise_values(dH, 1, gi));
  const double dh2 = full_contract(dh, raise_values(dh, 3, gi));
  e.ea = e.dH2 - Hh2 + 7 * H2 * H2;
  e.ec = dh2 - 12 * Hh2 + 6 * H2 * h2 + 60 * H2 * H2;
  Quartics q = quartics(h0, gi);
  e.q_h0_4 = q.h0_4;
  e.q_angle = q.angle;
  e.q_h0sq = q.h0sq;
  e.q_tr = q.tr;
  // Curvature from values: Rm by the Gauss equation, W by the trace-free
  // extrinsic formula.
  DT g(2, 0.0), A(4, 0.0), A0(4, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = gp.g(i, j).value();
  for (std::size_t f = 0; f < 256; ++f) {
    auto x = A.unflatten(f);
    A.at(f) = vdot(h[4 * x[0] + x[1]], h[4 * x[2] + x[3]]);
    A0.at(f) = vdot(h0[4 * x[0] + x[1]], h0[4 * x[2] + x[3]]);
  }
  DT Rm(4, 0.0), W(4, 0.0), Ric(2, 0.0), sq(2, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          Rm(i, j, k, l) = A(i, k, j, l) - A(i, l, j, k);
          W(i, j, k, l) = A0(i, k, j, l) - A0(i, l, j, k);  // 1/2 h0 (.)KN h0
        }
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l) {
          Ric(i, k) += gi[j][l] * Rm(i, j, k, l);
          sq(i, k) += gi[j][l] * A0(i, j, l, k);
        }
  double R = 0;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) R += gi[i][k] * Ric(i, k);
  DT sqg = kn(sq, g), gg = kn(g, g);
  for (std::size_t f = 0; f < 256; ++f) W.at(f) += 0.5 * sqg.at(f) - q.h0_2 / 12.0 * gg.at(f);
  e.w2 = norm2(W, gi);
  e.cgb = norm2(Rm, gi) - 4 * norm2(Ric, gi) + R * R;
  e.dvol = gp.sqrt_det_g.value();
  return e;
}

double w2_quartic(const EnergyDensity& e) {
  return 2 * e.q_angle - 2 * e.q_tr - 2 * e.q_h0sq + e.q_h0_4 / 3.0;
}

SimonsResidual simons_pointwise_residual(const GeometryPoint& gp) {
  if (gp.order() < 4) throw DepthError("Simons residual needs Phi through order 4");
  const Jet H2 = gp.H2();
  ScalarT T(2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) T(i, j) = gp.Hh()(i, j) - 4.0 * H2 * gp.g(i, j);
  ScalarT ddT = gp.nabla(gp.nabla(T));  // (i, j, a, b)
  double div2 = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          div2 += gp.ginv(i, a).value() * gp.ginv(j, b).value() * ddT(i, j, a, b).value();
  CurvatureSet cs = curvature_extrinsic(gp);
  ScalarT R0(0);
  R0.at(0) = cs.R;
  const double lapR = gp.trace(gp.nabla(gp.nabla(R0)), 0, 1).at(0).value();
  EnergyDensity e = density(gp);
  SimonsResidual s;
  s.lhs = 8 * div2 + lapR + e.cgb;
  s.rhs = 32 * e.ea - 2 * e.ec + 6 * e.q_h0sq - 2 * e.q_angle + 3 * e.w2;
  s.residual = std::abs(s.lhs - s.rhs);
  s.scale = std::max({std::abs(8 * div2), std::abs(lapR), std::abs(e.cgb), std::abs(32 * e.ea),
                      std::abs(2 * e.ec), std::abs(6 * e.q_h0sq), std::abs(2 * e.q_angle),
                      std::abs(3 * e.w2), 1e-300});
  return s;
}

std::size_t QuadratureGrid::size() const {
  std::size_t n = 1;
  for (const auto& a : nodes) n *= a.size();
  return n;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      // recompute the derivative at the converged root
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
    }
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    const double wi = 2 / ((1 - z * z) * dp * dp) * half;
    x[i] = mid - half * z;
    x[n - 1 - i] = mid + half * z;
    w[i] = w[n - 1 - i] = wi;
  }
}

QuadratureGrid make_grid(const ImmersionPatch& patch, std::array<int, 4> n) {
  QuadratureGrid g;
  for (int a = 0; a < 4; ++a) {
    if (n[a] < 1) throw std::invalid_argument("grid: node count must be positive");
    if (patch.axes[a] == AxisKind::Periodic) {
      const double h = (patch.hi[a] - patch.lo[a]) / n[a];
      for (int k = 0; k < n[a]; ++k) {
        g.nodes[a].push_back(patch.lo[a] + (k + 0.5) * h);
        g.weights[a].push_back(h);
      }
    } else {
      gauss_legendre(n[a], patch.lo[a], patch.hi[a], g.nodes[a], g.weights[a]);
    }
  }
  return g;
}

QuadratureGrid make_grid(const ImmersionPatch& patch, int n) { return make_grid(patch, {n, n, n, n}); }

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

namespace {

// Per-node density * dvol * weight, one row per density kind, plus volume.
std::vector<std::vector<double>> node_values(const ImmersionPatch& patch, const QuadratureGrid& grid,
                                             bool weighted) {
  std::vector<std::vector<double>> rows(kDensityCount + 1, std::vector<double>(grid.size()));
  std::size_t f = 0;
  for (std::size_t a = 0; a < grid.nodes[0].size(); ++a)
    for (std::size_t b = 0; b < grid.nodes[1].size(); ++b)
      for (std::size_t c = 0; c < grid.nodes[2].size(); ++c)
        for (std::size_t d = 0; d < grid.nodes[3].size(); ++d, ++f) {
          Point4 u{grid.nodes[0][a], grid.nodes[1][b], grid.nodes[2][c], grid.nodes[3][d]};
          double w = weighted ? grid.weights[0][a] * grid.weights[1][b] * grid.weights[2][c] *
                                    grid.weights[3][d]
                              : 1.0;
          EnergyDensity e = density(geometry_at(patch, u, 3));
          for (int k = 0; k < kDensityCount; ++k) rows[k][f] = w * e.dvol * e.get(DensityKind(k));
          rows[kDensityCount][f] = w * e.dvol;
        }
  return rows;
}

void require_closed(const ImmersionPatch& patch) {
  if (!patch.closed) throw std::invalid_argument("integral claims require closed Sigma (preset '" +
                                                 patch.name + "' is not closed)");
}

}  // namespace

EnergyIntegrals integrate_all(const ImmersionPatch& patch, const QuadratureGrid& grid) {
  require_closed(patch);
  auto rows = node_values(patch, grid, true);
  EnergyIntegrals r;
  for (int k = 0; k < kDensityCount; ++k) r.value[k] = pairwise_sum(rows[k].data(), rows[k].size());
  r.volume = pairwise_sum(rows[kDensityCount].data(), grid.size());
  r.nodes = grid.size();
  return r;
}

EnergyIntegrals integrate_domain(const ImmersionPatch& patch, const QuadratureGrid& grid) {
  auto rows = node_values(patch, grid, true);
  EnergyIntegrals r;
  for (int k = 0; k < kDensityCount; ++k) r.value[k] = pairwise_sum(rows[k].data(), rows[k].size());
  r.volume = pairwise_sum(rows[kDensityCount].data(), grid.size());
  r.nodes = grid.size();
  return r;
}

double integrate(const ImmersionPatch& patch, DensityKind kind, const QuadratureGrid& grid) {
  return integrate_all(patch, grid).get(kind);
}

SimidResult simid_from(const EnergyIntegrals& e, int euler) {
  SimidResult s;
  s.lhs = 16 * e.get(DensityKind::EA) - e.get(DensityKind::EC) + 3 * e.get(DensityKind::H0SQ2) -
          e.get(DensityKind::ANGLE4);
  s.rhs = 16 * M_PI * M_PI * euler - 1.5 * e.get(DensityKind::W2);
  s.residual = std::abs(s.lhs - s.rhs);
  return s;
}

SimidResult simid_check(const ImmersionPatch& patch, const QuadratureGrid& grid) {
  return simid_from(integrate_all(patch, grid), patch.euler);
}

std::vector<ConformalRow> conformal_invariance_check(const ImmersionPatch& patch, const MoebiusMap& map,
                                                     const QuadratureGrid& grid) {
  require_closed(patch);
  ImmersionPatch mapped = apply_moebius(map, patch);
  auto a = node_values(patch, grid, true);
  auto b = node_values(mapped, grid, true);
  std::vector<ConformalRow> out;
  for (DensityKind k : all_densities()) {
    if (k == DensityKind::CGB) continue;
    ConformalRow row;
    row.kind = k;
    const auto& ra = a[int(k)];
    const auto& rb = b[int(k)];
    row.before = pairwise_sum(ra.data(), ra.size());
    row.after = pairwise_sum(rb.data(), rb.size());
    row.relative_change = std::abs(row.after - row.before) /
                          std::max({std::abs(row.before), std::abs(row.after), 1e-300});
    const bool pointwise = k == DensityKind::H04 || k == DensityKind::ANGLE4 || k == DensityKind::H0SQ2 ||
                           k == DensityKind::TR4 || k == DensityKind::W2;
    if (pointwise) {
      double worst = 0;
      for (std::size_t f = 0; f < ra.size(); ++f) worst = std::max(worst, std::abs(ra[f] - rb[f]));
      row.pointwise_change = worst;
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace curv
