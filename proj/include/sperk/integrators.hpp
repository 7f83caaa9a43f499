#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sperk/mask.hpp"
#include "sperk/problem.hpp"
#include "sperk/tableau.hpp"

namespace sperk {

// Stage states, fluxes and right-hand sides of one explicit RK step, shared
// by every weight set applied afterwards.  Weighted per-interface flux sums
// B^k_j = sum_j b^k f_j(Y^(j)) are cached per label; all step combiners work
// in this interface-flux space so that a mask identically selecting one label
// is bitwise identical to the single-method step.
class StageWorkspace {
 public:
  StageWorkspace(const SemiDiscreteProblem& problem, const EmbeddedTableau& tableau,
                 GridField base, double dt);

  const SemiDiscreteProblem& problem() const { return *problem_; }
  const EmbeddedTableau& tableau() const { return *tableau_; }
  const GridField& base() const { return base_; }
  double dt() const { return dt_; }

  const GridField& stage_state(int j) const { return stage_states_[j]; }
  const InterfaceFluxes& stage_fluxes(int j) const { return stage_fluxes_[j]; }
  const std::vector<double>& stage_rhs(int j) const { return stage_rhs_[j]; }

  // Weighted interface flux sums for one weight set ((n+1)*m values).
  const std::vector<double>& combined_fluxes(const std::string& label) const;

  // Reuses an existing assembly of the base state as stage 1 (requires c_1=0).
  static StageWorkspace with_first_stage(const SemiDiscreteProblem& problem,
                                         const EmbeddedTableau& tableau, GridField base,
                                         double dt, InterfaceFluxes base_fluxes);

 private:
  StageWorkspace() = default;
  void build(InterfaceFluxes* first_stage);

  const SemiDiscreteProblem* problem_ = nullptr;
  const EmbeddedTableau* tableau_ = nullptr;
  GridField base_;
  double dt_ = 0.0;
  std::vector<GridField> stage_states_;
  std::vector<InterfaceFluxes> stage_fluxes_;
  std::vector<std::vector<double>> stage_rhs_;
  mutable std::map<std::string, std::vector<double>> combined_;
};

// Standard update with one weight set.
GridField step_single(const StageWorkspace& ws, const std::string& label);

// Per-node weight selection (paper's equation-based partitioning): node i is
// advanced with chi_i of the first label and 1-chi_i of the second.  Values
// strictly inside (0,1) realize the blended form.  Not conservative across
// mask jumps.
GridField step_equation_partitioned(const StageWorkspace& ws, const Mask& node_mask,
                                    const std::vector<std::string>& labels);

// Per-interface weight selection (flux-based partitioning): the combined flux
// F_j = chi_j B_j + (1-chi_j) Bhat_j is flux-differenced, which telescopes and
// conserves mass for any mask.
GridField step_flux_partitioned(const StageWorkspace& ws, const Mask& interface_mask,
                                const std::vector<std::string>& labels);

// Generalizations to r weight sets with indicator masks forming a partition
// of unity at every node/interface.
GridField step_equation_partitioned(const StageWorkspace& ws, const std::vector<Mask>& indicators,
                                    const std::vector<std::string>& labels);
GridField step_flux_partitioned(const StageWorkspace& ws, const std::vector<Mask>& indicators,
                                const std::vector<std::string>& labels);

// Node-wise convex combination of weight sets; node_weights is row-major
// n x labels.size() with rows summing to 1 (within 1e-12).
GridField step_blended(const StageWorkspace& ws, const std::vector<double>& node_weights,
                       const std::vector<std::string>& labels);

// Godunov splitting of the masked flux split: a forward Euler substep on
// G_chi followed by one on G_{1-chi}.  First-order in general and O(1) wrong
// on locally constant data; kept as the counterexample to embedded sharing.
GridField step_godunov_split(const SemiDiscreteProblem& problem, const GridField& state,
                             const Mask& interface_mask, double dt);

enum class StepMode { single, equation, flux, blended };
std::string to_string(StepMode m);
StepMode step_mode_from_string(const std::string& s);

struct StepSpec {
  const EmbeddedTableau* tableau = nullptr;
  StepMode mode = StepMode::single;
  std::vector<std::string> labels;  // one for single; first is chosen where chi = 1
  double dt = 0.0;                  // advance overwrites this per step
};

struct StepDiagnostics {
  double mass = 0.0;          // dx * sum of component 0
  double tv = 0.0;            // total variation of component 0
  double chi_fraction = 0.0;  // mean mask value (fraction of ones for binary masks)
  double max_abs = 0.0;
};

struct RunResult {
  GridField final_state;
  std::vector<double> times;                  // length steps+1
  std::vector<StepDiagnostics> diagnostics;   // length steps+1
  std::vector<double> frame_times;
  std::vector<GridField> frames;
  int steps = 0;
  bool completed = true;
  int diverged_step = -1;
  double diverged_time = 0.0;
  nlohmann::json provenance;
};

struct AdvanceOptions {
  double cfl = 1.2;
  std::optional<double> fixed_dt;  // bypasses the CFL rule (advection-diffusion scans)
  int frame_stride = 0;            // 0 = keep no intermediate frames
  double divergence_cap = 1e10;
  std::function<void(int, double)> progress;  // called after every step
};

// Time loop: dt = cfl*dx/alpha_max re-estimated every step (or fixed_dt),
// final step clipped to land exactly on t_final, mask recomputed from U^n and
// held fixed during the step.  Divergence is reported in the result rather
// than thrown.  The strategy is copied, so repeated calls with the same
// strategy object replay the same random masks.
RunResult advance(const SemiDiscreteProblem& problem, const GridField& initial_state,
                  const StepSpec& spec, const MaskStrategy& mask_strategy, double t_final,
                  const AdvanceOptions& options);

}  // namespace sperk
