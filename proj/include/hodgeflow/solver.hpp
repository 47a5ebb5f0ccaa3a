#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hodgeflow/density.hpp"
#include "hodgeflow/grid.hpp"
#include "hodgeflow/sphere.hpp"

namespace hodgeflow {

// Discrete flow energy of a sphere-valued map u on a torus grid:
//
//   E(u) = integrate( e(Q) ),   Q[c] = sum_a |du_a[c]|^2,
//
// with e the variational density of the chosen law. Minimizers over the
// sphere constraint solve the discrete Euler-Lagrange system: the tangential
// part of
//
//   R = codifferential( rho(Q) du ) - rho(Q) A(du, du),   A(du,du) = -Q u,
//
// vanishes. All solver output lives in CriticalPointReport; non-convergence
// is reported, never thrown.

struct SolveOptions {
  long max_iterations = 50000;
  double gradient_norm_tolerance = 1e-8;  // L2 norm of the projected gradient
  double initial_step = 0.1;
  double backtracking_factor = 0.5;
  double sufficient_decrease = 1e-4;  // Armijo constant
  // Reject steps that push any cell's Q to this bound or beyond. Defaults to
  // the model's admissible bound; always additionally capped by it.
  std::optional<double> q_max;
  std::uint64_t seed = 0;  // recorded in reports; initial maps are built upstream
};

void validate_options(const SolveOptions& opts);

struct RegimeCounts {
  long tranquil = 0;
  long sonic = 0;
  long shooting = 0;
};

struct CriticalPointReport {
  double final_energy = 0.0;
  double gradient_norm = 0.0;   // L2 norm of the projected gradient at exit
  double residual_norm = 0.0;   // L2 norm of the tangential Euler-Lagrange residual
  long iterations = 0;          // accepted descent steps
  double max_q = 0.0;
  double min_rho = 0.0;
  RegimeCounts regimes;
  bool converged = false;       // true iff gradient_norm <= tolerance
  std::string termination;      // gradient_tolerance | max_iterations | step_underflow
};

// Throws std::domain_error if any cell reaches the admissible Q bound.
double energy(const TorusGrid& g, const DensityModel& model, const SphereMap& u);

// Full residual field R (its normal part is not meaningful; criticality is
// the vanishing of the tangential part).
AmbientField euler_lagrange_residual(const TorusGrid& g, const DensityModel& model,
                                     const SphereMap& u);

// L2 norm of tangent_project_field(u, euler_lagrange_residual(...)).
double tangential_residual_norm(const TorusGrid& g, const DensityModel& model,
                                const SphereMap& u);

// Projected gradient of the energy. Scaling convention: the returned field is
// the Riesz representative of the first variation in the vol-weighted L2
// inner product, i.e. for every tangential direction W
//
//   d/dt E(project(u + t W)) |_{t=0}  =  inner(grad, W)
//                                     =  vol * sum_c <grad[c], W[c]>,
//
// which works out to grad = 2 * tangent_project(u, codifferential(rho(Q) du)).
// The volume weight cancels between the two sides; tests pin this against
// central finite differences.
AmbientField energy_gradient(const TorusGrid& g, const DensityModel& model,
                             const SphereMap& u);

// Projected gradient descent with Armijo backtracking. A constant map (or any
// point already within tolerance) returns immediately with 0 iterations. A
// step-size underflow below 1e-16 ends the run with converged = false and
// termination = "step_underflow".
std::pair<SphereMap, CriticalPointReport> minimize(const TorusGrid& g,
                                                   const DensityModel& model,
                                                   SphereMap u0,
                                                   const SolveOptions& opts);

// Per-cell classification of Q(du) plus the histogram.
std::pair<std::vector<FlowRegime>, RegimeCounts> regime_map(
    const TorusGrid& g, const DensityModel& model, const SphereMap& u,
    double sonic_tol = 1e-9);

}  // namespace hodgeflow
