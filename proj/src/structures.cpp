#include "curv/structures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curv {

namespace {

// Residual from a difference form and the forms it balances.
Residual make_residual(const std::string& id, double value, std::initializer_list<double> terms,
                       bool asserted = true) {
  Residual r;
  r.id = id;
  r.value = value;
  for (double t : terms) r.scale = std::max(r.scale, t);
  r.asserted = asserted;
  return r;
}

Multivector raised_dphi(const PointFrame& fr, int a) {
  Multivector acc(fr.m, 1);
  for (int b = 0; b < kDim; ++b) acc += fr.dphi(b) * fr.ginv(a, b);
  return acc;
}

Multivector random_vector(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Multivector v(m, 1);
  for (auto& c : v.coeffs()) c = d(rng);
  return v;
}

PointForm random_point_form(std::mt19937_64& rng, int p, int q, int m) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Tensor<Multivector> t(p);
  for (auto& v : t.data()) {
    v = Multivector(m, q);
    for (auto& c : v.coeffs()) c = d(rng);
  }
  return antisymmetrize(t, q, m);
}

PointForm normal_part(const PointFrame& fr, PointForm a) {
  for (auto& v : a.c.data()) v = fr.normal(v);
  return a;
}

// Nodal maximum of a pointwise residual and of the terms it balances.
struct NodeMax {
  double value = 0, scale = 0;
  void add(const PointForm& res, std::initializer_list<const PointForm*> terms) {
    value = std::max(value, max_abs(res));
    for (const PointForm* t : terms) scale = std::max(scale, max_abs(*t));
  }
};

}  // namespace

// ---- Point frames -----------------------------------------------------

PointFrame PointFrame::at(const GeometryPoint& gp) {
  PointFrame fr;
  fr.m = gp.m();
  fr.ginv = ginv_values(gp);
  fr.dphi = values(dphi_form(gp));
  fr.eta = values(eta_form(gp));
  fr.proj.assign(std::size_t(fr.m) * fr.m, 0.0);
  for (int r = 0; r < fr.m; ++r) fr.proj[r * fr.m + r] = 1.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int r = 0; r < fr.m; ++r)
        for (int s = 0; s < fr.m; ++s)
          fr.proj[r * fr.m + s] -= fr.dphi(i)[r] * fr.ginv(i, j) * fr.dphi(j)[s];
  return fr;
}

PointFrame PointFrame::flat(int m) {
  if (m < 5) throw std::invalid_argument("flat frame: ambient dimension must be at least 5");
  PointFrame fr;
  fr.m = m;
  fr.ginv = Tensor<double>(2, 0.0);
  for (int i = 0; i < kDim; ++i) fr.ginv(i, i) = 1.0;
  fr.dphi = PointForm(1, 1, m);
  for (int i = 0; i < kDim; ++i) fr.dphi(i) = Multivector::basis(m, i);
  fr.eta = PointForm(2, 2, m);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      if (i != j) fr.eta(i, j) = wedge(fr.dphi(i), fr.dphi(j));
  fr.proj.assign(std::size_t(m) * m, 0.0);
  for (int r = kDim; r < m; ++r) fr.proj[r * m + r] = 1.0;
  return fr;
}

Multivector PointFrame::normal(const Multivector& v) const {
  if (v.grade() != 1) throw GradeError("normal projection needs a vector");
  Multivector out(m, 1);
  for (int r = 0; r < m; ++r)
    for (int s = 0; s < m; ++s) out[r] += proj[r * m + s] * v[s];
  return out;
}

// ---- Pointwise algebra --------------------------------------------------

ResidualSet propito_check(const PointFrame& fr, const PointForm& ell) {
  if (ell.p != 2 || ell.q != 1) throw std::invalid_argument("propito_check: needs a vector valued 2-form");
  const auto& g = fr.ginv;
  PointForm A = form_interior(g, ell, fr.dphi, Pairing::Dot);
  PointForm B = form_wedge(ell, fr.dphi, Pairing::Dot) * 2.0;
  PointForm C = form_interior(g, ell, fr.dphi, Pairing::Wedge);
  PointForm D = form_wedge(ell, fr.dphi, Pairing::Wedge) * 2.0;

  PointForm t1 = form_interior(g, fr.eta, C, Pairing::Bullet);
  PointForm t2 = form_interior(g, D, fr.eta, Pairing::Bullet);
  PointForm t3 = form_interior(g, fr.eta, A, Pairing::Scale);
  PointForm t4 = form_interior(g, B, fr.eta, Pairing::Scale);
  PointForm r1 = C * -3.0 - (t1 + t2 + t3 - t4);

  PointForm s1 = form_interior(g, fr.eta, C, Pairing::Dot);
  PointForm s2 = form_interior(g, D, fr.eta, Pairing::Dot);
  PointForm r2 = A * 3.0 - (s1 - s2);

  return {make_residual("clarisse", max_abs(r1),
                        {3 * max_abs(C), max_abs(t1), max_abs(t2), max_abs(t3), max_abs(t4)}),
          make_residual("clarisse2", max_abs(r2), {3 * max_abs(A), max_abs(s1), max_abs(s2)})};
}

Residual bullet_normal_identity(const PointFrame& fr, const Multivector& v) {
  auto eta_up = raise_with(fr.ginv, fr.eta.c);
  double value = 0, scale = 0;
  for (int a = 0; a < kDim; ++a) {
    Multivector acc(fr.m, 2);
    for (int i = 0; i < kDim; ++i) acc += bullet(eta_up(a, i), wedge(v, fr.dphi(i)));
    Multivector rhs = wedge(v, raised_dphi(fr, a)) * 3.0;
    value = std::max(value, max_abs(acc + rhs));
    scale = std::max({scale, max_abs(acc), max_abs(rhs)});
  }
  return make_residual("bullet_normal", value, {scale});
}

PointForm rr_dphi(const PointFrame& fr, const PointForm& r) {
  return form_interior(fr.ginv, r, fr.dphi, Pairing::Interior);
}

PointForm eta_bullet_inner(const PointFrame& fr, const PointForm& r) {
  PointForm out(0, 2, fr.m);
  out.c.at(0) = form_inner(fr.ginv, fr.eta, r, Pairing::Bullet);
  return out;
}

PointForm eta_inner(const PointFrame& fr, const PointForm& s) {
  PointForm out(0, 2, fr.m);
  out.c.at(0) = form_inner(fr.ginv, fr.eta, s, Pairing::Scale);
  return out;
}

PointForm values_interior_dphi(const PointFrame& fr, const PointForm& q) {
  if (q.p != 0 || q.q != 2) throw std::invalid_argument("values_interior_dphi: needs a 2-vector valued 0-form");
  PointForm out(1, 1, fr.m);
  for (int i = 0; i < kDim; ++i) out(i) = interior(q.c.at(0), fr.dphi(i));
  return out;
}

ResidualSet prop_last_check(const PointFrame& fr, std::mt19937_64& rng) {
  const int m = fr.m;
  ResidualSet out;

  // R_n = f_j ^ d^j Phi + x ^ y0 with f_j, x normal valued and y0 normal.
  {
    Tensor<Multivector> t(2, Multivector(m, 2));
    for (int j = 0; j < kDim; ++j) {
      PointForm f = normal_part(fr, random_point_form(rng, 2, 1, m));
      Multivector up = raised_dphi(fr, j);
      for (std::size_t k = 0; k < t.size(); ++k) t.at(k) += wedge(f.c.at(k), up);
    }
    PointForm x = normal_part(fr, random_point_form(rng, 2, 1, m));
    Multivector y0 = fr.normal(random_vector(rng, m));
    for (std::size_t k = 0; k < t.size(); ++k) t.at(k) += wedge(x.c.at(k), y0);
    PointForm rn = antisymmetrize(t, 2, m);
    PointForm lhs = rr_dphi(fr, rn);
    PointForm rhs = values_interior_dphi(fr, eta_bullet_inner(fr, rn));
    out.push_back(make_residual("prop_last.a", max_abs(lhs - rhs), {max_abs(lhs), max_abs(rhs)}));
  }
  // R_t = r_ab^{cd} eta_cd.
  {
    Tensor<Multivector> t(2, Multivector(m, 2));
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& v : t.data())
      for (int c = 0; c < kDim; ++c)
        for (int e = c + 1; e < kDim; ++e) v += fr.eta(c, e) * d(rng);
    PointForm rt = antisymmetrize(t, 2, m);
    PointForm w = rr_dphi(fr, rt);
    double value = 0;
    for (const auto& v : w.c.data()) value = std::max(value, max_abs(fr.normal(v)));
    out.push_back(make_residual("prop_last.b", value, {max_abs(w)}));
  }
  {
    PointForm s = random_point_form(rng, 2, 0, m);
    PointForm lhs = values_interior_dphi(fr, eta_inner(fr, s));
    PointForm sd = form_interior(fr.ginv, s, fr.dphi, Pairing::Scale);
    out.push_back(make_residual("prop_last.c", max_abs(lhs + sd), {max_abs(lhs), max_abs(sd)}));
    out.push_back(make_residual("prop_last.c_printed", max_abs(lhs - sd), {max_abs(lhs), max_abs(sd)}, false));
  }
  return out;
}

// ---- Jet-level divergence identity ------------------------------------------

ResidualSet strucrs_check(const GeometryPoint& gp, const ParamForm& a, const ParamForm& b, Pairing pr) {
  if (a.p != 2 || b.p != 2) throw std::invalid_argument("strucrs_check: needs 2-forms");
  const int m = gp.m();
  const int qv = form_detail::value_grade(pr, a.q, b.q);
  auto pair = [pr](const Vec& x, const Vec& y) { return pair_values(pr, x, y); };

  VecT a_up = gp.raise_all(a.c);
  VecT b_up = gp.raise_all(b.c);
  ParamForm db = exterior_d(gp, b);
  VecT nb = gp.nabla_flat(b.c);  // nb(k, i, j) = nabla_k B_ij
  VecT na = gp.nabla_flat(a.c);

  ResidualSet out;
  {
    double value = 0, scale = 0;
    for (int bb = 0; bb < kDim; ++bb) {
      Vec t1(m, qv), t2(m, qv), t3(m, qv);
      for (int x = 0; x < kDim; ++x)
        for (int i = 0; i < kDim; ++i) {
          t1 += pair(a_up(x, i), db(x, i, bb));
          t2 += pair(a_up(x, i), nb(x, i, bb)) * 2.0;
          t3 += pair(a_up(x, i), nb(bb, x, i));
        }
      value = std::max(value, max_abs(t1 - t2 - t3));
      scale = std::max({scale, max_abs(t1), max_abs(t2), max_abs(t3)});
    }
    out.push_back(make_residual("strucrs.first_line", value, {scale}));
  }

  // Rem_b = (d*A)^i ⊛ B_ib + 1/2 (nabla_b A_ai) ⊛ B^{ai} - (nabla^a A^i_b) ⊛ B_ai
  ParamForm rem(1, qv, m);
  {
    VecT dsa_up = gp.raise_all(codifferential(gp, a).c);
    for (int bb = 0; bb < kDim; ++bb) {
      Vec acc(m, qv);
      for (int i = 0; i < kDim; ++i) acc += pair(dsa_up(i), b(i, bb));
      for (int x = 0; x < kDim; ++x)
        for (int i = 0; i < kDim; ++i) acc += pair(na(bb, x, i), b_up(x, i)) * 0.5;
      for (int x = 0; x < kDim; ++x)
        for (int i = 0; i < kDim; ++i) {
          Vec up(m, a.q);
          for (int c = 0; c < kDim; ++c)
            for (int d = 0; d < kDim; ++d) up += na(c, d, bb) * (gp.ginv(x, c) * gp.ginv(i, d));
          acc -= pair(up, b(x, i));
        }
      rem(bb) = acc;
    }
  }
  ParamForm t1 = form_interior(gp, a, codifferential(gp, b), pr);
  ParamForm t2 = form_interior(gp, db, a, pr);
  ParamForm lhs = pr == Pairing::Bullet ? t1 + t2 : t1 - t2;
  ParamForm div = codifferential(gp, form_odot(gp, a, b, pr));
  ParamForm grad = exterior_d(gp, scalar_form(form_inner(gp, a, b, pr)));
  ParamForm res = lhs - (div - grad + rem);
  out.push_back(make_residual("strucrs.choisi", max_abs(res),
                              {max_abs(t1), max_abs(t2), max_abs(div), max_abs(grad), max_abs(rem)}));
  return out;
}

// ---- L-system on minimal immersions -------------------------------------------

ResidualSet lsystem_zero_check(const GeometryPoint& gp, const EnergySpec& spec) {
  NoetherTriple t = triple_for(gp, spec);
  // F + f / 3 with f = |H|^2 (h - 4 H g).
  Jet h2 = dot(gp.H, gp.H);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t.F(i, j) += (gp.h(i, j) - gp.H * (4.0 * gp.g(i, j))) * (h2 * (1.0 / 3.0));
  ParamForm v = noether_V(gp, t);
  double trace = std::abs(gp.trace(t.G, 0, 1).at(0).value());
  double wedge_part = 0;
  Vec acc(gp.m(), 2);
  for (int j = 0; j < kDim; ++j)
    for (int k = 0; k < kDim; ++k) acc += wedge(v(j), gp.dphi[k]) * gp.ginv(j, k);
  wedge_part = max_abs(acc);
  // Both sides vanish identically here; scale 1 makes the tolerance absolute.
  return {make_residual("lsystem.trace", trace, {1.0}), make_residual("lsystem.wedge", wedge_part, {1.0})};
}

// ---- Periodic grids -------------------------------------------------------------

std::size_t PeriodicGrid::index(const std::array<int, 4>& i) const {
  return std::size_t(i[0]) + std::size_t(n) * (i[1] + std::size_t(n) * (i[2] + std::size_t(n) * i[3]));
}

std::array<int, 4> PeriodicGrid::coords(std::size_t node) const {
  std::array<int, 4> c{};
  for (int k = 0; k < 4; ++k) {
    c[k] = int(node % n);
    node /= n;
  }
  return c;
}

Point4 PeriodicGrid::point(std::size_t node) const {
  auto c = coords(node);
  return {c[0] * h(), c[1] * h(), c[2] * h(), c[3] * h()};
}

std::size_t PeriodicGrid::shift(std::size_t node, int k, int s) const {
  auto c = coords(node);
  c[k] = ((c[k] + s) % n + n) % n;
  return index(c);
}

const std::vector<std::array<int, 4>>& index_sets(int p) {
  static const std::array<std::vector<std::array<int, 4>>, 5> all = [] {
    std::array<std::vector<std::array<int, 4>>, 5> out;
    for (int mask = 0; mask < 16; ++mask) {
      std::array<int, 4> s{};
      int k = 0;
      for (int i = 0; i < 4; ++i)
        if (mask & (1 << i)) s[k++] = i;
      out[k].push_back(s);
    }
    for (auto& v : out) std::sort(v.begin(), v.end());
    return out;
  }();
  return all.at(p);
}

int index_set_position(int p, const std::array<int, 4>& sorted) {
  const auto& sets = index_sets(p);
  for (std::size_t k = 0; k < sets.size(); ++k)
    if (std::equal(sorted.begin(), sorted.begin() + p, sets[k].begin())) return int(k);
  throw std::invalid_argument("index set not found");
}

GridForm::GridForm(const PeriodicGrid& g, int p_, int q_, int m_)
    : grid(g), p(p_), q(q_), m(m_), comps(int(index_sets(p_).size())),
      channels(int(BladeTable::get(m_, q_).blades.size())) {
  data.assign(std::size_t(comps) * channels * grid.nodes(), 0.0);
}

PointForm GridForm::node_form(std::size_t node) const {
  PointForm f(p, q, m);
  const auto& perms = form_detail::permutations(p);
  const auto& sets = index_sets(p);
  for (int c = 0; c < comps; ++c) {
    Multivector v(m, q);
    for (int ch = 0; ch < channels; ++ch) v[ch] = at(c, ch, node);
    for (const auto& s : perms) {
      std::array<int, 5> idx{};
      for (int k = 0; k < p; ++k) idx[k] = sets[c][s.p[k]];
      f.c.at(f.c.flatten(idx)) = s.sign > 0 ? v : v * -1.0;
    }
  }
  return f;
}

void GridForm::set_node(std::size_t node, const PointForm& f) {
  if (f.p != p || f.q != q || f.m != m) throw std::invalid_argument("grid form: shape mismatch");
  const auto& sets = index_sets(p);
  for (int c = 0; c < comps; ++c) {
    std::array<int, 5> idx{};
    for (int k = 0; k < p; ++k) idx[k] = sets[c][k];
    const Multivector& v = f.c.at(f.c.flatten(idx));
    for (int ch = 0; ch < channels; ++ch) at(c, ch, node) = v.empty() ? 0.0 : v[ch];
  }
}

GridForm& GridForm::operator+=(const GridForm& o) {
  if (o.data.size() != data.size() || o.p != p || o.q != q) throw std::invalid_argument("grid form: shape mismatch");
  for (std::size_t k = 0; k < data.size(); ++k) data[k] += o.data[k];
  return *this;
}

GridForm& GridForm::operator-=(const GridForm& o) {
  if (o.data.size() != data.size() || o.p != p || o.q != q) throw std::invalid_argument("grid form: shape mismatch");
  for (std::size_t k = 0; k < data.size(); ++k) data[k] -= o.data[k];
  return *this;
}

GridForm& GridForm::operator*=(double s) {
  for (double& x : data) x *= s;
  return *this;
}

double GridForm::dot(const GridForm& o) const {
  // Fixed-order blocked sum so results do not depend on grid traversal.
  double total = 0;
  const std::size_t block = 4096;
  for (std::size_t s = 0; s < data.size(); s += block) {
    double part = 0;
    const std::size_t e = std::min(data.size(), s + block);
    for (std::size_t k = s; k < e; ++k) part += data[k] * o.data[k];
    total += part;
  }
  return total;
}

double GridForm::norm() const { return std::sqrt(dot(*this)); }

double GridForm::max_abs() const {
  double r = 0;
  for (double x : data) r = std::max(r, std::abs(x));
  return r;
}

void GridForm::remove_mean() {
  const std::size_t nn = grid.nodes();
  for (std::size_t s = 0; s < data.size(); s += nn) {
    double mean = 0;
    for (std::size_t k = 0; k < nn; ++k) mean += data[s + k];
    mean /= double(nn);
    for (std::size_t k = 0; k < nn; ++k) data[s + k] -= mean;
  }
}

namespace {

// out[comp_out] += sign * D_k in[comp_in], all channels.
void add_central(GridForm& out, int comp_out, const GridForm& in, int comp_in, int k, double sign) {
  const PeriodicGrid& g = in.grid;
  const double f = sign / (2.0 * g.h());
  const std::size_t nn = g.nodes();
  std::size_t stride = 1;
  for (int j = 0; j < k; ++j) stride *= std::size_t(g.n);
  const std::size_t span = stride * g.n;
  for (int ch = 0; ch < in.channels; ++ch) {
    const double* src = &in.data[(std::size_t(comp_in) * in.channels + ch) * nn];
    double* dst = &out.data[(std::size_t(comp_out) * out.channels + ch) * nn];
    for (std::size_t base = 0; base < nn; base += span)
      for (std::size_t off = 0; off < span; ++off) {
        const std::size_t up = off + stride < span ? off + stride : off + stride - span;
        const std::size_t dn = off >= stride ? off - stride : off + span - stride;
        dst[base + off] += f * (src[base + up] - src[base + dn]);
      }
  }
}

}  // namespace

GridForm grid_d(const GridForm& a) {
  if (a.p >= kDim) throw std::invalid_argument("grid_d: degree already maximal");
  GridForm out(a.grid, a.p + 1, a.q, a.m);
  const auto& sets = index_sets(a.p + 1);
  for (int c = 0; c < out.comps; ++c)
    for (int r = 0; r <= a.p; ++r) {
      std::array<int, 4> sub{};
      int k = 0;
      for (int s = 0; s <= a.p; ++s)
        if (s != r) sub[k++] = sets[c][s];
      add_central(out, c, a, index_set_position(a.p, sub), sets[c][r], r % 2 ? -1.0 : 1.0);
    }
  return out;
}

GridForm grid_codiff(const GridForm& a) {
  if (a.p == 0) throw std::invalid_argument("grid_codiff of a 0-form");
  GridForm out(a.grid, a.p - 1, a.q, a.m);
  const auto& sets = index_sets(a.p - 1);
  for (int c = 0; c < out.comps; ++c) {
    const auto& j = sets[c];
    for (int i = 0; i < kDim; ++i) {
      if (std::find(j.begin(), j.begin() + (a.p - 1), i) != j.begin() + (a.p - 1)) continue;
      int below = 0;
      std::array<int, 4> full{};
      int k = 0;
      for (int s = 0; s < a.p - 1; ++s) {
        if (j[s] < i) ++below;
      }
      for (int s = 0; s < below; ++s) full[k++] = j[s];
      full[k++] = i;
      for (int s = below; s < a.p - 1; ++s) full[k++] = j[s];
      add_central(out, c, a, index_set_position(a.p, full), i, below % 2 ? -1.0 : 1.0);
    }
  }
  return out;
}

CoexactResult solve_coexact(const GridForm& target, const GridForm& d_target, const SolverOptions& opt) {
  const int p = target.p + 1;
  if (p > kDim) throw std::invalid_argument("solve_coexact: target degree too high");
  const bool has_d = !d_target.data.empty();
  if (has_d && (d_target.p != p + 1 || d_target.q != target.q)) throw std::invalid_argument("solve_coexact: d target shape");

  // Normal operator N = -(d d* + d* d), right-hand side -(d t1 + d* t2).
  auto apply = [p](const GridForm& x) {
    GridForm y = grid_d(grid_codiff(x));
    if (p < kDim) y += grid_codiff(grid_d(x));
    return y *= -1.0;
  };
  GridForm rhs = grid_d(target) * -1.0;
  if (has_d) rhs -= grid_codiff(d_target);
  rhs.remove_mean();

  CoexactResult res;
  res.form = GridForm(target.grid, p, target.q, target.m);
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.codiff_residual = target.norm();
    res.d_residual = has_d ? d_target.norm() : 0.0;
    return res;
  }
  GridForm& x = res.form;
  GridForm r = rhs;
  GridForm dir = r;
  double rr = r.dot(r);
  int it = 0;
  while (std::sqrt(rr) > opt.tol * bnorm) {
    if (it >= opt.max_iter)
      throw SolverError("solve_coexact: CG did not converge in " + std::to_string(opt.max_iter) + " iterations",
                        res.history);
    GridForm ad = apply(dir);
    const double alpha = rr / dir.dot(ad);
    for (std::size_t k = 0; k < x.data.size(); ++k) {
      x.data[k] += alpha * dir.data[k];
      r.data[k] -= alpha * ad.data[k];
    }
    const double rr_new = r.dot(r);
    for (std::size_t k = 0; k < dir.data.size(); ++k) dir.data[k] = r.data[k] + (rr_new / rr) * dir.data[k];
    rr = rr_new;
    ++it;
    res.history.push_back(std::sqrt(rr) / bnorm);
  }
  x.remove_mean();
  res.iterations = it;
  res.normal_residual = std::sqrt(rr) / bnorm;
  const double tn = target.norm();
  res.codiff_residual = (grid_codiff(x) - target).norm() / (tn > 0 ? tn : 1.0);
  if (has_d) {
    const double dn = d_target.norm();
    res.d_residual = (grid_d(x) - d_target).norm() / (dn > 0 ? dn : 1.0);
  } else if (p < kDim) {
    res.d_residual = grid_d(x).norm();
  }
  return res;
}

// ---- Random periodic data -------------------------------------------------

namespace {

struct TrigTerm {
  double amp, phase;
  std::array<int, 4> k;
};

// Independent coefficients of a smooth periodic form as sums of sines.
struct TrigForm {
  int p, q, m, comps, channels;
  std::vector<std::vector<TrigTerm>> coeff;  // [comp * channels + ch]

  TrigForm(int p_, int q_, int m_, std::mt19937_64& rng)
      : p(p_), q(q_), m(m_), comps(int(index_sets(p_).size())),
        channels(int(BladeTable::get(m_, q_).blades.size())) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::uniform_int_distribution<int> kd(-2, 2);
    coeff.resize(std::size_t(comps) * channels);
    for (auto& c : coeff)
      for (int t = 0; t < 3; ++t) c.push_back({d(rng), 3.0 * d(rng), {kd(rng), kd(rng), kd(rng), kd(rng)}});
  }
  static double arg(const TrigTerm& t, const Point4& u) {
    return t.k[0] * u[0] + t.k[1] * u[1] + t.k[2] * u[2] + t.k[3] * u[3] + t.phase;
  }
  double value(int c, int ch, const Point4& u) const {
    double s = 0;
    for (const auto& t : coeff[std::size_t(c) * channels + ch]) s += t.amp * std::sin(arg(t, u));
    return s;
  }
  double deriv(int c, int ch, int i, const Point4& u) const {
    double s = 0;
    for (const auto& t : coeff[std::size_t(c) * channels + ch]) s += t.amp * t.k[i] * std::cos(arg(t, u));
    return s;
  }
  GridForm sample(const PeriodicGrid& g) const {
    GridForm out(g, p, q, m);
    for (std::size_t node = 0; node < g.nodes(); ++node) {
      Point4 u = g.point(node);
      for (int c = 0; c < comps; ++c)
        for (int ch = 0; ch < channels; ++ch) out.at(c, ch, node) = value(c, ch, u);
    }
    return out;
  }
  // Exact codifferential sampled on g (unit metric).
  GridForm codiff(const PeriodicGrid& g) const {
    GridForm out(g, p - 1, q, m);
    const auto& sets = index_sets(p - 1);
    for (std::size_t node = 0; node < g.nodes(); ++node) {
      Point4 u = g.point(node);
      for (int c = 0; c < out.comps; ++c) {
        const auto& j = sets[c];
        for (int i = 0; i < kDim; ++i) {
          if (std::find(j.begin(), j.begin() + (p - 1), i) != j.begin() + (p - 1)) continue;
          int below = 0;
          for (int s = 0; s < p - 1; ++s)
            if (j[s] < i) ++below;
          std::array<int, 4> full{};
          int k = 0;
          for (int s = 0; s < below; ++s) full[k++] = j[s];
          full[k++] = i;
          for (int s = below; s < p - 1; ++s) full[k++] = j[s];
          const int src = index_set_position(p, full);
          for (int ch = 0; ch < channels; ++ch)
            out.at(c, ch, node) += (below % 2 ? -1.0 : 1.0) * deriv(src, ch, i, u);
        }
      }
    }
    return out;
  }
};

}  // namespace

GridForm random_grid_form(const PeriodicGrid& g, int p, int q, int m, std::mt19937_64& rng) {
  return TrigForm(p, q, m, rng).sample(g);
}

GridForm map_nodes(const GridForm& a, int p, int q, const std::function<PointForm(const PointForm&)>& f) {
  GridForm out(a.grid, p, q, a.m);
  for (std::size_t node = 0; node < a.grid.nodes(); ++node) out.set_node(node, f(a.node_form(node)));
  return out;
}

ConvergenceStudy codiff_convergence(const std::vector<int>& ns, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TrigForm tf(2, 0, 5, rng);
  ConvergenceStudy st;
  for (int n : ns) {
    PeriodicGrid g{n};
    GridForm err = grid_codiff(tf.sample(g)) - tf.codiff(g);
    st.rows.push_back({n, err.max_abs()});
  }
  if (st.rows.size() >= 2) {
    const auto& a = st.rows[st.rows.size() - 2];
    const auto& b = st.rows.back();
    st.order = std::log(a.error / b.error) / std::log(double(b.n) / a.n);
  }
  return st;
}

// ---- Manufactured (S, R) system -------------------------------------------------

SrReport sr_manufactured(const PeriodicGrid& g, int m, std::uint64_t seed, const SolverOptions& opt, bool zero_l) {
  std::mt19937_64 rng(seed);
  const PointFrame fr = PointFrame::flat(m);
  const auto& gi = fr.ginv;
  const std::size_t nn = g.nodes();

  SrReport rep;
  PotentialSet& P = rep.pots;
  GridForm lambda = random_grid_form(g, 1, 1, m, rng);
  GridForm r0 = random_grid_form(g, 2, 2, m, rng);
  if (zero_l) {
    lambda *= 0.0;
    r0 *= 0.0;
  }
  // A closed dlambda does not satisfy (d*L)^j . d_j Phi = 0, which the S
  // equation needs. Subtract K_ij = x_i e_j - x_j e_i with d*x = f / 3,
  // dx = 0, where f is that trace: K is closed and carries trace 3 d*x.
  GridForm l1 = grid_d(lambda);
  auto trace_part = [&](const GridForm& l) {
    GridForm c = grid_codiff(l), f(g, 0, 0, m);
    for (int j = 0; j < kDim; ++j)
      for (std::size_t node = 0; node < nn; ++node) f.at(0, 0, node) += c.at(j, j, node);
    return f;
  };
  GridForm f = trace_part(l1);
  P.l_solve = solve_coexact(f * (1.0 / 3.0), GridForm(), opt);
  P.L = l1;
  for (std::size_t node = 0; node < nn; ++node) {
    PointForm x = P.l_solve.form.node_form(node);
    PointForm k(2, 1, m);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        if (i != j) k(i, j) = Multivector::basis(m, j) * x(i)[0] - Multivector::basis(m, i) * x(j)[0];
    PointForm ln = P.L.node_form(node) - k;
    P.L.set_node(node, ln);
  }

  GridForm A(g, 1, 0, m), B(g, 3, 0, m), C(g, 1, 2, m), D(g, 3, 2, m);
  for (std::size_t node = 0; node < nn; ++node) {
    PointForm ell = P.L.node_form(node);
    A.set_node(node, form_interior(gi, ell, fr.dphi, Pairing::Dot));
    B.set_node(node, form_wedge(ell, fr.dphi, Pairing::Dot) * 2.0);
    C.set_node(node, form_interior(gi, ell, fr.dphi, Pairing::Wedge));
    D.set_node(node, form_wedge(ell, fr.dphi, Pairing::Wedge) * 2.0);
  }
  P.U = C - grid_codiff(r0);

  P.s_solve = solve_coexact(A, B, opt);
  P.r_solve = solve_coexact(C - P.U, D, opt);
  P.S = P.s_solve.form;
  P.R = P.r_solve.form;

  ResidualSet& out = rep.residuals;
  GridForm cS = grid_codiff(P.S), dS = grid_d(P.S), cR = grid_codiff(P.R), dR = grid_d(P.R);
  const GridForm rt = C - P.U;
  out.push_back(make_residual("solve.L_trace", trace_part(P.L).norm(), {f.norm()}, false));
  out.push_back(make_residual("solve.L_closed", grid_d(P.L).norm(), {P.L.norm()}, false));
  out.push_back(make_residual("solve.S_codiff", (cS - A).norm(), {A.norm()}));
  out.push_back(make_residual("solve.R_codiff", (cR - rt).norm(), {rt.norm()}));
  out.push_back(make_residual("solve.S_d", (dS - B).norm(), {B.norm()}, false));
  out.push_back(make_residual("solve.R_d", (dR - D).norm(), {D.norm()}, false));

  // (S, R) system at every node, and the pieces reused below.
  GridForm Y(g, 1, 2, m), Z(g, 1, 0, m), u_dphi(g, 0, 1, m), ret_exact(g, 0, 1, m);
  NodeMax first, second, first_p, second_p, ret;
  for (std::size_t node = 0; node < nn; ++node) {
    PointForm crn = cR.node_form(node), drn = dR.node_form(node);
    PointForm csn = cS.node_form(node), dsn = dS.node_form(node);
    PointForm un = P.U.node_form(node);
    PointForm y = un * 3.0 + form_interior(gi, fr.eta, un, Pairing::Bullet);
    PointForm z = form_interior(gi, fr.eta, un, Pairing::Dot);
    Y.set_node(node, y);
    Z.set_node(node, z);

    PointForm t1 = form_interior(gi, fr.eta, crn, Pairing::Bullet);
    PointForm t2 = form_interior(gi, drn, fr.eta, Pairing::Bullet);
    PointForm t3 = form_interior(gi, fr.eta, csn, Pairing::Scale);
    PointForm t4 = form_interior(gi, dsn, fr.eta, Pairing::Scale);
    PointForm lhs1 = crn * -3.0;
    PointForm br1 = t1 + t2 + t3 - t4;
    first.add(lhs1 - (br1 + y), {&lhs1, &t1, &t2, &t3, &t4, &y});
    first_p.add(lhs1 - (br1 - y), {&lhs1, &t1, &t2, &t3, &t4, &y});

    PointForm s1 = form_interior(gi, fr.eta, crn, Pairing::Dot);
    PointForm s2 = form_interior(gi, drn, fr.eta, Pairing::Dot);
    PointForm lhs2 = csn * 3.0;
    second.add(lhs2 - (s1 - s2 + z), {&lhs2, &s1, &s2, &z});
    second_p.add(lhs2 - (s1 - s2 - z), {&lhs2, &s1, &s2, &z});

    PointForm rr = form_interior(gi, crn, fr.dphi, Pairing::Interior);
    PointForm ss = form_interior(gi, csn, fr.dphi, Pairing::Scale);
    PointForm uu = form_interior(gi, un, fr.dphi, Pairing::Interior);
    u_dphi.set_node(node, uu);
    PointForm rs = rr + ss + uu;
    ret_exact.set_node(node, rs);
    ret.add(rs, {&rr, &ss, &uu});
  }
  out.push_back(make_residual("sysSR1.first", first.value, {first.scale}));
  out.push_back(make_residual("sysSR1.second", second.value, {second.scale}));
  out.push_back(make_residual("sysSR1.first_printed", first_p.value, {first_p.scale}, false));
  out.push_back(make_residual("sysSR1.second_printed", second_p.value, {second_p.scale}, false));
  out.push_back(make_residual("return.exact", ret.value, {ret.scale}));

  // Divergence form: d*(3R + eta ⊙• R + eta ⊙ S) - dq + Y = 0 and
  // d*(3S - eta ⊙· R) + d<eta ·, R> - Z = 0, q = <eta •, R> + <eta, S>.
  GridForm p1(g, 2, 2, m), q(g, 0, 2, m), p2(g, 2, 0, m), w(g, 0, 0, m);
  GridForm rd(g, 1, 1, m), eta_s(g, 1, 1, m), s_d(g, 1, 1, m);
  for (std::size_t node = 0; node < nn; ++node) {
    PointForm rn = P.R.node_form(node), sn = P.S.node_form(node);
    p1.set_node(node, rn * 3.0 + form_odot(gi, fr.eta, rn, Pairing::Bullet) + form_odot(gi, fr.eta, sn, Pairing::Scale));
    PointForm es = eta_inner(fr, sn);
    q.set_node(node, eta_bullet_inner(fr, rn) + es);
    p2.set_node(node, sn * 3.0 - form_odot(gi, fr.eta, rn, Pairing::Dot));
    PointForm wn(0, 0, m);
    wn.c.at(0) = form_inner(gi, fr.eta, rn, Pairing::Dot);
    w.set_node(node, wn);
    PointForm sd = form_interior(gi, sn, fr.dphi, Pairing::Scale);
    rd.set_node(node, rr_dphi(fr, rn) + sd);
    eta_s.set_node(node, values_interior_dphi(fr, es));
    s_d.set_node(node, sd);
  }
  {
    GridForm a = grid_codiff(p1), b = grid_d(q);
    out.push_back(make_residual("corollary.first", (a - b + Y).max_abs(), {a.max_abs(), b.max_abs(), Y.max_abs()}));
    GridForm c = grid_codiff(p2), d = grid_d(w);
    out.push_back(make_residual("corollary.second", (c + d - Z).max_abs(), {c.max_abs(), d.max_abs(), Z.max_abs()}));
    GridForm lq = grid_codiff(b), dy = grid_codiff(Y);
    out.push_back(make_residual("corollary.laplace_q", (lq - dy).max_abs(), {lq.max_abs(), dy.max_abs()}));
  }
  {
    GridForm a = grid_codiff(rd);
    out.push_back(
        make_residual("return.printed", (a + u_dphi).max_abs(), {a.max_abs(), u_dphi.max_abs()}, false));
    GridForm x = grid_codiff(s_d), y = grid_codiff(eta_s);
    out.push_back(make_residual("return.S_only", (x + y).max_abs(), {x.max_abs(), y.max_abs()}));
  }
  return rep;
}

}  // namespace curv
