#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "curv/energies.hpp"

namespace curv {

// Gradient descent for E_A + beta int |h0|^4 over normal perturbations of the
// unit S^4: Phi_c = Phi + sum_k c_k pi_n(b_k(Phi)) with random trigonometric
// fields b_k. The energy is the quadrature value on a fixed grid.
struct FlowConfig {
  double beta = 0.1;
  double eps = 0.05;  // initial c_k = eps for every k
  int fields = 3;
  std::uint64_t seed = 3;
  std::array<int, 4> grid{8, 8, 8, 8};
  int max_iter = 40;
  double step = 1e-3;       // first trial step; later steps start at twice the last accepted one
  double fd_h = 1e-4;       // central difference in coefficient space
  double grad_tol = 1e-6;   // stop when |grad| falls below this
  double rel_tol = 1e-10;   // stop when an accepted step decreases E by less than rel_tol * E
  int max_halvings = 40;
};

struct FlowStep {
  int iter = 0;
  double energy = 0;
  double grad_norm = 0;
  double step = 0;  // accepted step that produced this state (0 for the start)
  std::vector<double> coeffs;
};

struct FlowResult {
  std::vector<FlowStep> trajectory;
  std::string stop_reason;
  double lower_bound = 8 * kPi2;
  bool monotone() const;
  double final_energy() const { return trajectory.back().energy; }
  int iterations() const { return int(trajectory.size()) - 1; }
};

// Line search failure; carries the trajectory so far.
class FlowError : public std::runtime_error {
 public:
  FlowError(const std::string& what, FlowResult partial) : std::runtime_error(what), partial_(std::move(partial)) {}
  const FlowResult& partial() const { return partial_; }

 private:
  FlowResult partial_;
};

// Throws std::invalid_argument for beta <= 1/12 (no lower bound) or a bad
// configuration; FlowError when backtracking finds no decrease.
FlowResult run_flow(const FlowConfig& cfg);

// E_A + beta int |h0|^4 of Phi_c on cfg.grid.
double flow_energy(const FlowConfig& cfg, const std::vector<double>& c);

}  // namespace curv
