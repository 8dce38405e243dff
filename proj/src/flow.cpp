#include "curv/flow.hpp"

#include <cmath>

#include "curv/patch.hpp"

namespace curv {

namespace {

std::vector<TrigField> flow_fields(const FlowConfig& cfg) {
  std::vector<TrigField> f;
  for (int k = 0; k < cfg.fields; ++k) f.push_back(TrigField::random(5, cfg.seed + 1000 * k, 3, 1.5));
  return f;
}

struct Evaluator {
  const FlowConfig& cfg;
  ImmersionPatch base = preset_sphere(1.0);
  std::vector<TrigField> fields;
  QuadratureGrid grid;

  explicit Evaluator(const FlowConfig& c) : cfg(c), fields(flow_fields(c)), grid(make_grid(base, c.grid)) {}

  double operator()(const std::vector<double>& c) const {
    EnergyIntegrals e = integrate_all(perturb_normal_fields(base, fields, c), grid);
    return e.get(DensityKind::EA) + cfg.beta * e.get(DensityKind::H04);
  }
};

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void validate(const FlowConfig& cfg) {
  if (!(cfg.beta > 1.0 / 12)) throw std::invalid_argument("flow: beta must exceed 1/12 for the 8 pi^2 bound");
  if (cfg.fields < 1) throw std::invalid_argument("flow: needs at least one field");
  if (!(cfg.eps >= 0 && cfg.eps <= 0.2)) throw std::invalid_argument("flow: eps must lie in [0, 0.2]");
  if (!(cfg.step > 0 && cfg.fd_h > 0)) throw std::invalid_argument("flow: step and fd_h must be positive");
  if (cfg.max_iter < 0) throw std::invalid_argument("flow: max_iter must be non-negative");
  for (int n : cfg.grid)
    if (n < 1) throw std::invalid_argument("flow: grid sizes must be positive");
}

}  // namespace

bool FlowResult::monotone() const {
  for (std::size_t k = 1; k < trajectory.size(); ++k)
    if (!(trajectory[k].energy < trajectory[k - 1].energy)) return false;
  return true;
}

double flow_energy(const FlowConfig& cfg, const std::vector<double>& c) { return Evaluator(cfg)(c); }

FlowResult run_flow(const FlowConfig& cfg) {
  validate(cfg);
  Evaluator E(cfg);
  const int K = cfg.fields;
  FlowResult res;

  std::vector<double> c(K, cfg.eps);
  double e = E(c);
  auto gradient = [&](const std::vector<double>& x) {
    std::vector<double> g(K);
    for (int k = 0; k < K; ++k) {
      std::vector<double> p = x, m = x;
      p[k] += cfg.fd_h;
      m[k] -= cfg.fd_h;
      g[k] = (E(p) - E(m)) / (2 * cfg.fd_h);
    }
    return g;
  };
  std::vector<double> g = gradient(c);
  res.trajectory.push_back({0, e, norm(g), 0, c});

  double tau = cfg.step;
  for (int it = 1;; ++it) {
    const double gn = norm(g);
    if (gn <= cfg.grad_tol) {
      res.stop_reason = "gradient below tolerance";
      break;
    }
    if (it > cfg.max_iter) {
      res.stop_reason = "iteration limit";
      break;
    }
    // Armijo backtracking from twice the last accepted step.
    bool accepted = false;
    std::vector<double> cn(K);
    double en = e;
    for (int h = 0; h <= cfg.max_halvings; ++h, tau *= 0.5) {
      for (int k = 0; k < K; ++k) cn[k] = c[k] - tau * g[k];
      try {
        en = E(cn);
      } catch (const ImmersionError&) {
        continue;
      }
      if (en <= e - 1e-4 * tau * gn * gn && en < e) {
        accepted = true;
        break;
      }
    }
    if (!accepted) throw FlowError("flow: line search found no decrease", res);
    const double drop = e - en;
    c = cn;
    e = en;
    g = gradient(c);
    res.trajectory.push_back({it, e, norm(g), tau, c});
    tau *= 2;
    if (drop <= cfg.rel_tol * e) {
      res.stop_reason = "energy decrease below tolerance";
      break;
    }
  }
  return res;
}

}  // namespace curv
