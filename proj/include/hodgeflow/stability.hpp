#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hodgeflow/density.hpp"
#include "hodgeflow/grid.hpp"
#include "hodgeflow/solver.hpp"
#include "hodgeflow/sphere.hpp"

namespace hodgeflow {

// Second-variation probes of the flow energy around a map u, plus the closed
// form that predicts instability of non-trivial critical points into sphere
// targets of dimension m >= 2.

// d^2/dt^2 E(project(u + t V)) |_{t=0} by symmetric differences with one
// Richardson step: with D(t) = (E(t) - 2 E(0) + E(-t)) / t^2 the returned
// value is (4 D(t/2) - D(t)) / 3. V must be tangential along u (checked).
// If a trial point leaves the admissible Q region, t shrinks by half until it
// fits; below t = 1e-10 the probe gives up and throws std::domain_error.
double second_variation_fd(const TorusGrid& g, const DensityModel& model,
                           const SphereMap& u, const AmbientField& v,
                           double t_step = 1e-4);

// Mixed probe: the symmetric bilinear form B(V, W) evaluated with the exactly
// symmetric 4-point stencil
//
//   B(V,W) ~ [E(+t,+t) - E(+t,-t) - E(-t,+t) + E(-t,-t)] / (4 t^2),
//
// where E(a,b) = E(project(u + a V + b W)). Matches second_variation_fd on
// V = W up to the schemes' truncation orders.
double second_variation_mixed(const TorusGrid& g, const DensityModel& model,
                              const SphereMap& u, const AmbientField& v,
                              const AmbientField& w, double t_step = 1e-4);

// Pointwise integrand Q (Q rho'(Q) + (2 - m) rho(Q)), m = dimension of the
// target sphere S^m. Its integral over the domain is the variational index
// that forces every stable critical point to be constant when it is negative
// on non-constant maps.
double instability_integrand(const DensityModel& model, double q, int sphere_m);

// integrate(instability_integrand(model, Q[c], u.m())) over the grid.
double instability_index(const TorusGrid& g, const DensityModel& model,
                         const SphereMap& u);

struct StabilityOptions {
  int probes = 8;              // random probes beyond the deterministic ones
  std::uint64_t seed = 0;
  double t_step = 1e-4;
  double negative_tol = 1e-8;  // second variation below -negative_tol flags descent
  double trivial_q_tol = 1e-12;
  int smoothing_passes = 1;     // applied to random probes before normalization
  bool keep_probe_fields = false;  // retain the probe directions in the report
};

struct ProbeRecord {
  std::string kind;    // "basis" or "random"
  int index = 0;       // ambient axis, or random probe number
  double value = 0.0;  // second variation along the L2-normalized probe
};

struct StabilityReport {
  std::string verdict;  // Trivial-map | Unstable | Stable-up-to-probes
  double min_value = 0.0;
  double max_value = 0.0;
  double index_value = 0.0;  // instability_index at u
  std::vector<ProbeRecord> probe_values;
  // Parallel to probe_values when keep_probe_fields was set; empty otherwise.
  std::vector<AmbientField> probe_fields;
  std::uint64_t seed = 0;
  double gradient_norm = 0.0;
  // The Unstable/Stable verdicts carry weight only near a critical point;
  // false flags a probe of a point with gradient norm > 100x the default
  // solver tolerance.
  bool near_critical = true;
  double max_q = 0.0;
};

// Probes u with the tangent projections of the ambient basis vectors (skipping
// directions that project to nearly nothing) followed by `probes` random
// smoothed tangential directions, all L2-normalized. Verdict Unstable iff some
// probe value < -negative_tol; a map with max Q <= trivial_q_tol short-circuits
// to Trivial-map. Probe evaluations run in parallel subject to
// HODGEFLOW_THREADS.
StabilityReport stability_probe(const TorusGrid& g, const DensityModel& model,
                                const SphereMap& u, const StabilityOptions& opts);

struct TheoremExperimentConfig {
  int target_m = 2;  // dimension of the target sphere S^m, at least 2
  StabilityOptions probe_options;
  SolveOptions solve_options;
  bool minimize_first = true;
};

struct TheoremExperimentResult {
  std::string verdict;  // pass | fail | inconclusive
  std::string detail;
  CriticalPointReport solve_report;
  StabilityReport stability_report;
  bool trivial = false;  // the examined critical point is (numerically) constant
};

// End-to-end check of the triviality prediction: drive u0 to a critical point,
// then demand that a non-constant limit (max cell Q > 1e-6) shows a descent
// direction, and that a constant limit shows none. Non-convergence is
// inconclusive, not failure.
TheoremExperimentResult theorem_experiment(const TorusGrid& g,
                                           const DensityModel& model,
                                           SphereMap u0,
                                           const TheoremExperimentConfig& cfg);

}  // namespace hodgeflow
