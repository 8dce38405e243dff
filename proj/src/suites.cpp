#include "curv/suites.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace curv {

namespace {

bool starts_with(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

ScalarT diff(const ScalarT& a, const ScalarT& b) {
  ScalarT r(a.rank());
  for (std::size_t f = 0; f < a.size(); ++f) r.at(f) = a.at(f) - b.at(f);
  return r;
}

Residual make(const std::string& id, double value, double scale, bool asserted = true) {
  return Residual{id, value, scale, asserted};
}

// Prefix -> anchor label, longest prefix first.
const std::vector<std::pair<std::string, std::string>>& anchor_table() {
  static const std::vector<std::pair<std::string, std::string>> t = {
      {"gauss.", "nota"},
      {"weyl.", "defweyl"},
      {"codazzi", "eq0"},
      {"lanczos.", "ojo3"},
      {"simons.", "simo4"},
      {"simid.", "simid"},
      {"cgb.", "simo4"},
      {"prop1_", "prop1"},
      {"lower.", "lem3"},
      {"bach.cotton_weyl", "ojo3"},
      {"bach.L_system", "ojo3"},
      {"bach.constrained_el", "bachwill"},
      {"bach.", "bawi"},
      {"tt.forward", "ThPS"},
      {"el.first_variation", "varo"},
      {"variation", "varo"},
      {"el.", "horrib"},
      {"guven.", "lem4"},
      {"huma4.", "huma4"},
      {"noether.translation", "varoo"},
      {"clarisse2", "clarisse2"},
      {"clarisse", "clarisse"},
      {"bullet_normal", "propito"},
      {"prop_last.", "last"},
      {"strucrs.choisi", "choisi"},
      {"strucrs.", "strucRS"},
      {"lsystem.", "sysL2"},
      {"solve.L", "sysL2"},
      {"solve.S", "defS"},
      {"solve.R", "defR"},
      {"sysSR1.", "sysSR1"},
      {"corollary.", "COSR"},
      {"return.", "Threturn"},
  };
  return t;
}

bool is_quartic_tag(const std::string& id) {
  for (Quartic q : all_quartics())
    if (starts_with(id, std::string(quartic_name(q)) + ".")) return true;
  return false;
}

}  // namespace

std::string paper_anchor(const std::string& id) {
  for (const auto& [prefix, label] : anchor_table())
    if (starts_with(id, prefix)) return label;
  if (is_quartic_tag(id)) return id.find("wedge_divergence") != std::string::npos ? "cor2" : "lem1";
  return "";
}

double identity_tolerance(const std::string& id) {
  if (id == "el.first_variation" || starts_with(id, "variation.")) return 1e-5;
  if (starts_with(id, "variation_slope.")) return 0.05;
  if (starts_with(id, "el.")) return 1e-7;
  if (starts_with(id, "clarisse") || starts_with(id, "bullet_normal") || starts_with(id, "prop_last.")) return 1e-12;
  if (starts_with(id, "strucrs.") || starts_with(id, "lsystem.")) return 1e-10;
  if (starts_with(id, "solve.")) return 1e-8;
  if (starts_with(id, "sysSR1.") || starts_with(id, "corollary.") || starts_with(id, "return.")) return 1e-9;
  if (id == "noether.translation") return 1e-9;
  if (starts_with(id, "simid.s2xs2")) return 1e-6;
  return 1e-8;
}

ResidualSet geometry_suite(const GeometryPoint& gp, double codazzi_factor) {
  ResidualSet out;
  CurvatureSet cs = curvature_extrinsic(gp);
  const double rm = max_abs(cs.Rm);
  ScalarT intr = curvature_intrinsic(gp);
  out.push_back(make("gauss.riemann", max_abs(diff(intr, cs.Rm)), std::max(rm, max_abs(intr))));

  ScalarT we = weyl_extrinsic(gp);
  out.push_back(make("weyl.extrinsic", max_abs(diff(we, cs.W)), std::max(rm, max_abs(we))));
  double tr = 0;
  for (auto [s1, s2] : {std::pair{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})
    tr = std::max(tr, max_abs(gp.trace(we, s1, s2)));
  out.push_back(make("weyl.trace_free", tr, rm));
  const double rm2 = gp.full_dot(cs.Rm, cs.Rm).value();
  const double classical =
      rm2 - 2 * gp.full_dot(cs.Ric, cs.Ric).value() + cs.R.value() * cs.R.value() / 3;
  out.push_back(make("weyl.norm", std::abs(gp.full_dot(we, we).value() - classical), rm2));

  double cod = 0;
  for (const auto& c : codazzi_residual(gp, codazzi_factor)) cod = std::max(cod, max_abs(c));
  double cod_scale = max_abs(gp.Dh());
  out.push_back(make("codazzi", cod, cod_scale));

  // W^{iabj} W^k_{abj} = 1/4 |W|^2 g^{ik}
  ScalarT up = gp.raise_all(cs.W);
  const double w2 = gp.full_dot(cs.W, cs.W).value();
  double lan = 0, lan_scale = 0;
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      double s = 0, sa = 0;
      for (int l = 0; l < kDim; ++l)
        for (int a = 0; a < kDim; ++a)
          for (int b = 0; b < kDim; ++b)
            for (int j = 0; j < kDim; ++j) {
              const double t = gp.ginv(k, l).value() * up(i, a, b, j).value() * cs.W(l, a, b, j).value();
              s += t;
              sa += std::abs(t);
            }
      lan = std::max(lan, std::abs(s - 0.25 * w2 * gp.ginv(i, k).value()));
      lan_scale = std::max(lan_scale, sa);
    }
  out.push_back(make("lanczos.weyl", lan, lan_scale));
  return out;
}

ResidualSet simons_suite(const GeometryPoint& gp) {
  SimonsResidual s = simons_pointwise_residual(gp);
  return {make("simons.pointwise", s.residual, s.scale)};
}

ResidualSet noether_suite(const GeometryPoint& gp, const EnergySpec& spec) {
  ResidualSet out = prop1_suite(gp, spec);
  auto add = [&](const ResidualSet& rs) { out.insert(out.end(), rs.begin(), rs.end()); };
  for (Quartic q : all_quartics())
    if (q >= Quartic::Angle0) add(lemma_quartic_suite(gp, q));
  add(lemma_lower_suite(gp, 1.0, 3.0));
  add(bach_suite(gp));
  add(el_suite(gp));
  out.push_back(tt_forward_residual(gp, bach(gp, curvature_extrinsic(gp))));
  return out;
}

ResidualSet structures_suite(const GeometryPoint& gp, const Point4& u, std::mt19937_64& rng, int k) {
  ResidualSet out;
  PointFrame fr = PointFrame::at(gp);
  PointForm ell = values(random_constant_form(rng, 2, 1, fr.m));
  if (k % 2)
    for (auto& v : ell.c.data()) v = fr.normal(v);
  for (auto& r : propito_check(fr, ell)) out.push_back(r);

  std::uniform_real_distribution<double> d(-1, 1);
  Multivector v(fr.m, 1);
  for (auto& c : v.coeffs()) c = d(rng);
  Residual bn = bullet_normal_identity(fr, fr.normal(v));
  bn.id = "bullet_normal";
  out.push_back(bn);

  for (auto& r : prop_last_check(fr, rng)) out.push_back(r);

  if (k % 4) return out;
  GeometryPoint g3 = gp.capped(3);
  for (Pairing pr : {Pairing::Scale, Pairing::Dot, Pairing::Bullet}) {
    const int q = pr == Pairing::Scale ? 0 : 2;
    ParamForm a = random_form(rng, u, 2, q, fr.m, 3), b = random_form(rng, u, 2, q, fr.m, 3);
    const char* tag = pr == Pairing::Scale ? ".scale" : pr == Pairing::Dot ? ".dot" : ".bullet";
    for (auto& r : strucrs_check(g3, a, b, pr)) {
      r.id += tag;
      out.push_back(r);
    }
  }
  return out;
}

bool IdentityReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const IdentityRow& r) { return !r.asserted || r.pass; });
}

std::vector<std::string> IdentityReport::failures() const {
  std::vector<std::string> out;
  for (const auto& r : rows)
    if (r.asserted && !r.pass) out.push_back(r.identity_id + " on " + r.preset);
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"geometry", "energies", "noether", "structures"};
  return n;
}

ImmersionPatch suite_preset(const std::string& name, double eps, std::uint64_t seed) {
  ImmersionPatch p = preset(name);
  if (eps == 0) return p;
  return perturb_normal(p, eps, seed);
}

namespace {

// Folds per-point residual sets (in point order) into rows.
const std::map<std::string, double>* g_no_overrides = nullptr;

double tolerance_for(const std::string& id, const std::map<std::string, double>* overrides) {
  if (overrides) {
    // Longest matching prefix wins.
    const std::string* best = nullptr;
    double tol = 0;
    for (const auto& [prefix, t] : *overrides)
      if (starts_with(id, prefix) && (!best || prefix.size() > best->size())) {
        best = &prefix;
        tol = t;
      }
    if (best) return tol;
  }
  return identity_tolerance(id);
}

void aggregate(const std::vector<ResidualSet>& per_point, const std::string& preset, const std::string& suite,
               std::vector<IdentityRow>& rows, const std::map<std::string, double>* overrides = g_no_overrides) {
  std::map<std::string, std::size_t> pos;
  for (const auto& rs : per_point)
    for (const auto& r : rs) {
      auto it = pos.find(r.id);
      if (it == pos.end()) {
        IdentityRow row;
        row.identity_id = r.id;
        row.paper_anchor = paper_anchor(r.id);
        row.preset = preset;
        row.suite = suite;
        row.tolerance = tolerance_for(r.id, overrides);
        row.asserted = r.asserted;
        it = pos.emplace(r.id, rows.size()).first;
        rows.push_back(row);
      }
      IdentityRow& row = rows[it->second];
      row.point_count += 1;
      row.max_residual = std::max(row.max_residual, r.value);
      row.scale = std::max(row.scale, r.scale);
      if (r.scale > 0) row.worst_ratio = std::max(row.worst_ratio, r.value / r.scale);
      if (!r.passes(row.tolerance)) row.pass = false;
    }
}

template <class F>
std::vector<ResidualSet> per_point(int points, int threads, F&& f) {
  std::vector<ResidualSet> out(points);
  threads = std::max(1, std::min(threads, points));
  if (threads == 1) {
    for (int k = 0; k < points; ++k) out[k] = f(k);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int k = t; k < points; k += threads) out[k] = f(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::mt19937_64 point_rng(std::uint64_t seed, int k) {
  std::seed_seq s{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(k)};
  return std::mt19937_64(s);
}

Residual single(const std::string& id, double value, double scale) { return Residual{id, value, scale, true}; }

}  // namespace

IdentityReport run_identity_suites(const SuiteConfig& cfg) {
  if (cfg.suites.empty()) throw std::invalid_argument("no suites selected");
  for (const auto& s : cfg.suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw std::invalid_argument("unknown suite '" + s + "'");
  if (cfg.points < 1) throw std::invalid_argument("points must be positive");
  auto has = [&](const char* s) { return std::find(cfg.suites.begin(), cfg.suites.end(), s) != cfg.suites.end(); };

  IdentityReport rep;
  for (const auto& name : cfg.presets) {
    ImmersionPatch p = suite_preset(name, cfg.perturbation, cfg.seed);
    auto sets = per_point(cfg.points, cfg.threads, [&](int k) {
      const Point4 u = p.sample(cfg.seed, k);
      GeometryPoint gp = geometry_at(p, u);
      ResidualSet out;
      if (has("geometry")) {
        for (auto& r : geometry_suite(gp, cfg.codazzi_factor)) out.push_back(r);
      }
      if (has("energies")) {
        for (auto& r : simons_suite(gp)) out.push_back(r);
      }
      if (has("noether")) {
        for (auto& r : noether_suite(gp, cfg.spec)) out.push_back(r);
      }
      if (has("structures")) {
        std::mt19937_64 rng = point_rng(cfg.seed, k);
        for (auto& r : structures_suite(gp, u, rng, k)) out.push_back(r);
      }
      return out;
    });
    aggregate(sets, p.name, "pointwise", rep.rows, &cfg.tolerance);
  }

  if (has("energies")) {
    // Integral identities on the round presets.
    struct Closed {
      std::string label;
      ImmersionPatch p;
      std::array<int, 4> n;
    };
    std::vector<Closed> cl = {{"sphere", preset_sphere(1.0), {12, 12, 12, 2}},
                              {"s2xs2", preset_s2xs2(1.0, 1.3), {16, 1, 16, 1}},
                              {"torus", preset_clifford_torus(1.0), {4, 4, 4, 4}}};
    for (auto& c : cl) {
      EnergyIntegrals e = integrate_all(c.p, make_grid(c.p, c.n));
      SimidResult s = simid_from(e, c.p.euler);
      const double cgb_exact = 32 * kPi2 * c.p.euler;
      const double vol_scale = e.volume;
      std::vector<ResidualSet> one(1);
      one[0].push_back(single("simid." + c.label, s.residual, std::max(std::abs(s.lhs), std::abs(s.rhs))));
      one[0].push_back(single("cgb." + c.label, std::abs(e.get(DensityKind::CGB) - cgb_exact),
                              cgb_exact != 0 ? cgb_exact : vol_scale));
      aggregate(one, c.p.name, "integral", rep.rows, &cfg.tolerance);
      for (auto& r : rep.rows)
        if (r.suite == "integral" && r.preset == c.p.name) r.point_count = int(e.nodes);
    }
  }

  if (has("noether")) {
    SignResolution sr = resolve_el_sign();
    rep.el_sign = sr.sign;
    std::vector<ResidualSet> one(1);
    ImmersionPatch t = symmetric_torus(0.05, 7);
    const int n = cfg.translation_grid;
    one[0].push_back(translation_invariance(t, cfg.spec, {n, n, 2, 2}));
    one[0].push_back(single("el.first_variation", sr.check.rows.back().rel_err * std::abs(sr.check.rhs),
                            std::abs(sr.check.rhs)));
    aggregate(one, t.name, "integral", rep.rows, &cfg.tolerance);
  }

  if (has("structures")) {
    ImmersionPatch hel = preset_helicoid_product(1.0, 1.5);
    const int n = std::min(cfg.points, 10);
    auto sets = per_point(n, cfg.threads, [&](int k) {
      return lsystem_zero_check(geometry_at(hel, hel.sample(cfg.seed, k)), EnergySpec::single(TermKind::EA));
    });
    aggregate(sets, hel.name, "pointwise", rep.rows, &cfg.tolerance);

    SrReport sr = sr_manufactured(PeriodicGrid{cfg.grid}, 5, cfg.seed);
    std::vector<ResidualSet> one{sr.residuals};
    const std::size_t before = rep.rows.size();
    aggregate(one, "flat-periodic-" + std::to_string(cfg.grid), "grid", rep.rows, &cfg.tolerance);
    for (std::size_t i = before; i < rep.rows.size(); ++i) rep.rows[i].point_count = int(sr.pots.L.grid.nodes());
  }
  return rep;
}

Residual translation_invariance(const ImmersionPatch& patch, const EnergySpec& spec, std::array<int, 4> n) {
  if (!patch.closed) throw std::invalid_argument("translation_invariance needs a closed immersion");
  QuadratureGrid q = make_grid(patch, n);
  std::vector<std::vector<double>> comp(patch.m);
  std::vector<double> mag;
  for (std::size_t a = 0; a < q.nodes[0].size(); ++a)
    for (std::size_t b = 0; b < q.nodes[1].size(); ++b)
      for (std::size_t c = 0; c < q.nodes[2].size(); ++c)
        for (std::size_t d = 0; d < q.nodes[3].size(); ++d) {
          Point4 u{q.nodes[0][a], q.nodes[1][b], q.nodes[2][c], q.nodes[3][d]};
          const double w = q.weights[0][a] * q.weights[1][b] * q.weights[2][c] * q.weights[3][d];
          GeometryPoint gp = geometry_at(patch, u);
          Multivector dv = divergence_V(gp, spec) * (w * gp.sqrt_det_g.value());
          double nrm = 0;
          for (int k = 0; k < patch.m; ++k) {
            comp[k].push_back(dv[k]);
            nrm += dv[k] * dv[k];
          }
          mag.push_back(std::sqrt(nrm));
        }
  double total = 0;
  for (auto& c : comp) {
    const double s = pairwise_sum(c.data(), c.size());
    total += s * s;
  }
  return Residual{"noether.translation", std::sqrt(total), pairwise_sum(mag.data(), mag.size()), true};
}

namespace {

// Keeps only the first two ambient planes (components and frequencies), so
// the field commutes with rotations of the last two.
TrigField planar(TrigField f) {
  for (auto& a : f.amp)
    for (int k = 4; k < f.m; ++k) a[k] = 0;
  for (auto& w : f.freq)
    for (int k = 4; k < f.m; ++k) w[k] = 0;
  return f;
}

}  // namespace

ImmersionPatch symmetric_torus(double eps, std::uint64_t seed) {
  return perturb_normal_fields(preset_clifford_torus(1.0), {planar(TrigField::random(8, seed, 3, 0.8))}, {eps});
}

TrigField symmetric_field(std::uint64_t seed) { return planar(TrigField::random(8, seed, 2, 0.8)); }

std::vector<IdentityRow> variation_suite(const std::vector<EnergySpec>& specs,
                                         const std::map<std::string, double>& tolerance) {
  ImmersionPatch base = symmetric_torus(0.1, 7);
  TrigField b = symmetric_field(99);
  std::vector<IdentityRow> rows;
  for (const auto& spec : specs) {
    VariationResult r = variation_check(base, spec, b, {1e-2, 5e-3, 1e-4}, {32, 32, 1, 1}, {32, 32, 1, 1});
    std::vector<ResidualSet> one(1);
    const std::string tag = spec.str();
    one[0].push_back(single("variation." + tag, r.rows.back().rel_err * std::abs(r.rhs), std::abs(r.rhs)));
    one[0].push_back(single("variation_slope." + tag, std::abs(r.slope - 2.0), 1.0));
    aggregate(one, base.name, "integral", rows, &tolerance);
  }
  return rows;
}

SignResolution resolve_el_sign() {
  SignResolution s;
  // el_operator is -d*V; the finite-difference derivative agrees with
  // int B . el_operator when the sign is -1 and with its negative otherwise.
  s.check = variation_check(symmetric_torus(0.1, 7), EnergySpec::single(TermKind::EA), symmetric_field(99),
                            {1e-2, 5e-3, 1e-4}, {32, 32, 1, 1}, {32, 32, 1, 1});
  const double fd = s.check.rows.back().fd;
  s.sign = fd * s.check.rhs >= 0 ? -1.0 : 1.0;
  return s;
}

}  // namespace curv
