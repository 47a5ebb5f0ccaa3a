#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hodgeflow/density.hpp"
#include "hodgeflow/grid.hpp"
#include "hodgeflow/solver.hpp"
#include "hodgeflow/sphere.hpp"
#include "hodgeflow/stability.hpp"

namespace hodgeflow {

// Strict JSON experiment configuration. Every parser rejects unknown keys and
// names the offending field in its error message; all failures are
// ValidationError so the CLI can map them to the validation exit code.

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse text as JSON; parse failures become ValidationError mentioning `what`.
nlohmann::json parse_json_text(const std::string& text, const std::string& what);
nlohmann::json load_json_file(const std::string& path);

// Tagged model record: {"type":"polytropic","gamma":2.0}, {"type":"shallow",
// "C":2.0}, {"type":"limiting_exponential"}, {"type":"incompressible"},
// {"type":"surface_tension","base":{...},"mu":0.1} (base must not itself be
// surface_tension).
DensityModel parse_density_model(const nlohmann::json& j);

// {"n":1|2,"sizes":[..],"period":[..]}; period defaults to 2*pi per axis.
TorusGrid parse_grid(const nlohmann::json& j);

// {"type":"constant"|"wrap"|"random_perturbation", ...}; keys beyond those the
// chosen type consumes are rejected.
InitSpec parse_init(const nlohmann::json& j);

SolveOptions parse_solve_options(const nlohmann::json& j);

struct ExperimentConfig {
  TorusGrid grid;
  DensityModel model;
  int target_m;  // target sphere dimension; maps carry target_m + 1 components
  InitSpec init;
  SolveOptions options;
  StabilityOptions probe_options;
  bool minimize_first = true;
};

// Experiment document for minimize / stability / theorem-check. `subcommand`
// selects which top-level keys are allowed. Requires "version": 1.
ExperimentConfig parse_experiment(const nlohmann::json& j,
                                  const std::string& subcommand);

}  // namespace hodgeflow
