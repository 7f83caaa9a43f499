#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sperk/config.hpp"
#include "sperk/integrators.hpp"

namespace sperk {

// Column-named table with cells already formatted (numerics at 17
// significant digits), so CSV output is byte-stable across runs.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string to_csv() const;
};

std::string format_cell(double v);
std::string format_cell(int v);

struct ExperimentOutput {
  std::string kind;
  std::string problem;
  ResultTable table;
  nlohmann::json sidecar;  // full effective configuration, seeds, decision flags
};

// Dispatches on cfg.experiment: run, convergence, tv_scan, dt_scan,
// shock_speed, shu_osher.  Sub-run divergence is recorded in the table, not
// fatal to a scan.  Scans honor cfg.jobs; row order is deterministic.
ExperimentOutput run_experiment(const RunConfig& cfg);

// Writes <base>.csv and <base>.json under the output directory (SPERK_OUT_DIR
// overrides cfg.out_dir; cfg.out_name overrides the timestamped base name).
// Returns the CSV path.
std::string write_outputs(const ExperimentOutput& out, const RunConfig& cfg);

// Single-step helpers used by the conservation checks: one partitioned step
// from `state`, returning the new state and the mass-balance defect
// dM + dt*(F_eff(right boundary) - F_eff(left boundary)) of component 0,
// which is zero (to rounding) exactly when the update telescopes.
struct StepWithDefect {
  GridField next;
  double mass_defect = 0.0;
};
StepWithDefect step_with_mass_defect(const SemiDiscreteProblem& problem, const GridField& state,
                                     const StepSpec& spec, const Mask& mask);

}  // namespace sperk
