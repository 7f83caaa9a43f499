#include "sperk/integrators.hpp"

#include <algorithm>
#include <cmath>

#include "sperk/metrics.hpp"
#include "sperk/spatial.hpp"

namespace sperk {

namespace {

constexpr double kStageCap = 1e10;

void check_stage_finite(const GridField& y, int stage_index, double cap) {
  for (double v : y.values) {
    if (!std::isfinite(v) || std::abs(v) > cap)
      throw DivergenceError("divergence in Runge-Kutta stage " + std::to_string(stage_index + 1),
                            stage_index, 0.0);
  }
}

}  // namespace

StageWorkspace::StageWorkspace(const SemiDiscreteProblem& problem, const EmbeddedTableau& tableau,
                               GridField base, double dt) {
  problem_ = &problem;
  tableau_ = &tableau;
  base_ = std::move(base);
  dt_ = dt;
  build(nullptr);
}

StageWorkspace StageWorkspace::with_first_stage(const SemiDiscreteProblem& problem,
                                                const EmbeddedTableau& tableau, GridField base,
                                                double dt, InterfaceFluxes base_fluxes) {
  StageWorkspace ws;
  ws.problem_ = &problem;
  ws.tableau_ = &tableau;
  ws.base_ = std::move(base);
  ws.dt_ = dt;
  ws.build(&base_fluxes);
  return ws;
}

void StageWorkspace::build(InterfaceFluxes* first_stage) {
  if (dt_ < 0.0) throw ValidationError("step size must be non-negative");
  const int s = tableau_->stages();
  if (tableau_->c()[0] != 0.0)
    throw ValidationError("stage reuse requires c_1 = 0 (explicit methods)");

  stage_states_.reserve(s);
  stage_fluxes_.reserve(s);
  stage_rhs_.reserve(s);

  for (int j = 0; j < s; ++j) {
    GridField y = base_;
    for (int k = 0; k < j; ++k) {
      const double w = dt_ * tableau_->a(j, k);
      if (w == 0.0) continue;
      const auto& rhs = stage_rhs_[k];
      for (size_t i = 0; i < y.values.size(); ++i) y.values[i] += w * rhs[i];
    }
    check_stage_finite(y, j, kStageCap);
    InterfaceFluxes flx =
        (j == 0 && first_stage != nullptr) ? std::move(*first_stage) : problem_->assemble(y);
    stage_rhs_.push_back(flux_difference_rhs(flx, base_.dx));
    stage_fluxes_.push_back(std::move(flx));
    stage_states_.push_back(std::move(y));
  }
}

const std::vector<double>& StageWorkspace::combined_fluxes(const std::string& label) const {
  auto it = combined_.find(label);
  if (it != combined_.end()) return it->second;
  const auto& b = tableau_->weight_set(label).b;
  const size_t len = stage_fluxes_[0].values.size();
  std::vector<double> acc(len, 0.0);
  for (int j = 0; j < tableau_->stages(); ++j) {
    const double w = b[j];
    if (w == 0.0) continue;
    const auto& f = stage_fluxes_[j].values;
    for (size_t i = 0; i < len; ++i) acc[i] += w * f[i];
  }
  return combined_.emplace(label, std::move(acc)).first->second;
}

GridField step_single(const StageWorkspace& ws, const std::string& label) {
  const auto& B = ws.combined_fluxes(label);
  const GridField& u = ws.base();
  const double nu = ws.dt() / u.dx;
  GridField out = u;
  const int m = u.m;
  for (int i = 0; i < u.n; ++i)
    for (int c = 0; c < m; ++c)
      out.at(i, c) = u.at(i, c) - nu * (B[static_cast<size_t>(i + 1) * m + c] -
                                        B[static_cast<size_t>(i) * m + c]);
  return out;
}

namespace {

void require_labels(const StageWorkspace& ws, const std::vector<std::string>& labels,
                    size_t minimum) {
  if (labels.size() < minimum)
    throw ValidationError("partitioned step needs at least " + std::to_string(minimum) +
                          " weight labels");
  for (const auto& l : labels) ws.tableau().weight_index(l);  // throws LookupError on miss
}

// u_i^{n+1} = u_i^n - nu * sum_k alpha_k(i) (B^k_{i+1} - B^k_i) with the
// label-k weight alpha_k supplied per node.
template <typename Alpha>
GridField combine_nodewise(const StageWorkspace& ws, Alpha alpha,
                           const std::vector<std::string>& labels) {
  const GridField& u = ws.base();
  const double nu = ws.dt() / u.dx;
  const int m = u.m;
  const int r = static_cast<int>(labels.size());
  std::vector<const std::vector<double>*> B(r);
  for (int k = 0; k < r; ++k) B[k] = &ws.combined_fluxes(labels[k]);

  GridField out = u;
  for (int i = 0; i < u.n; ++i) {
    for (int c = 0; c < m; ++c) {
      double acc = 0.0;
      for (int k = 0; k < r; ++k) {
        const auto& bk = *B[k];
        acc += alpha(i, k) * (bk[static_cast<size_t>(i + 1) * m + c] -
                              bk[static_cast<size_t>(i) * m + c]);
      }
      out.at(i, c) = u.at(i, c) - nu * acc;
    }
  }
  return out;
}

// Combined interface flux F_j = sum_k alpha_k(j) B^k_j, flux-differenced so
// the update telescopes regardless of the mask.
template <typename Alpha>
GridField combine_fluxwise(const StageWorkspace& ws, Alpha alpha,
                           const std::vector<std::string>& labels) {
  const GridField& u = ws.base();
  const double nu = ws.dt() / u.dx;
  const int m = u.m;
  const int r = static_cast<int>(labels.size());
  std::vector<const std::vector<double>*> B(r);
  for (int k = 0; k < r; ++k) B[k] = &ws.combined_fluxes(labels[k]);

  std::vector<double> F(static_cast<size_t>(u.n + 1) * m, 0.0);
  for (int j = 0; j <= u.n; ++j)
    for (int c = 0; c < m; ++c) {
      double acc = 0.0;
      for (int k = 0; k < r; ++k) acc += alpha(j, k) * (*B[k])[static_cast<size_t>(j) * m + c];
      F[static_cast<size_t>(j) * m + c] = acc;
    }

  GridField out = u;
  for (int i = 0; i < u.n; ++i)
    for (int c = 0; c < m; ++c)
      out.at(i, c) = u.at(i, c) - nu * (F[static_cast<size_t>(i + 1) * m + c] -
                                        F[static_cast<size_t>(i) * m + c]);
  return out;
}

}  // namespace

GridField step_equation_partitioned(const StageWorkspace& ws, const Mask& node_mask,
                                    const std::vector<std::string>& labels) {
  require_labels(ws, labels, 2);
  if (labels.size() != 2)
    throw ValidationError("a single mask drives exactly two labels; use indicator masks for more");
  if (node_mask.location != MaskLocation::node)
    throw ValidationError("equation-based partitioning needs a node-located mask");
  if (static_cast<int>(node_mask.values.size()) != ws.base().n)
    throw ValidationError("node mask length does not match the grid");
  node_mask.validate();
  const auto& chi = node_mask.values;
  return combine_nodewise(
      ws, [&chi](int i, int k) { return k == 0 ? chi[i] : 1.0 - chi[i]; }, labels);
}

GridField step_flux_partitioned(const StageWorkspace& ws, const Mask& interface_mask,
                                const std::vector<std::string>& labels) {
  require_labels(ws, labels, 2);
  if (labels.size() != 2)
    throw ValidationError("a single mask drives exactly two labels; use indicator masks for more");
  if (interface_mask.location != MaskLocation::interface)
    throw ValidationError("flux-based partitioning needs an interface-located mask");
  if (static_cast<int>(interface_mask.values.size()) != ws.base().n + 1)
    throw ValidationError("interface mask length does not match the grid");
  interface_mask.validate();
  const auto& chi = interface_mask.values;
  return combine_fluxwise(
      ws, [&chi](int j, int k) { return k == 0 ? chi[j] : 1.0 - chi[j]; }, labels);
}

namespace {

void validate_indicators(const std::vector<Mask>& indicators, size_t r, MaskLocation loc,
                         size_t expected_len) {
  if (indicators.size() != r) throw ValidationError("need one indicator mask per weight label");
  for (const auto& m : indicators) {
    if (m.location != loc) throw ValidationError("indicator mask at the wrong location");
    if (m.values.size() != expected_len)
      throw ValidationError("indicator mask length does not match the grid");
  }
  for (size_t i = 0; i < expected_len; ++i) {
    double sum = 0.0;
    for (const auto& m : indicators) sum += m.values[i];
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("indicator masks must form a partition of unity");
  }
}

}  // namespace

GridField step_equation_partitioned(const StageWorkspace& ws, const std::vector<Mask>& indicators,
                                    const std::vector<std::string>& labels) {
  require_labels(ws, labels, 2);
  validate_indicators(indicators, labels.size(), MaskLocation::node,
                      static_cast<size_t>(ws.base().n));
  return combine_nodewise(
      ws, [&indicators](int i, int k) { return indicators[k].values[i]; }, labels);
}

GridField step_flux_partitioned(const StageWorkspace& ws, const std::vector<Mask>& indicators,
                                const std::vector<std::string>& labels) {
  require_labels(ws, labels, 2);
  validate_indicators(indicators, labels.size(), MaskLocation::interface,
                      static_cast<size_t>(ws.base().n) + 1);
  return combine_fluxwise(
      ws, [&indicators](int j, int k) { return indicators[k].values[j]; }, labels);
}

GridField step_blended(const StageWorkspace& ws, const std::vector<double>& node_weights,
                       const std::vector<std::string>& labels) {
  require_labels(ws, labels, 1);
  const int n = ws.base().n;
  const int r = static_cast<int>(labels.size());
  if (node_weights.size() != static_cast<size_t>(n) * r)
    throw ValidationError("blend weights must be n x labels row-major");
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 0; k < r; ++k) {
      const double w = node_weights[static_cast<size_t>(i) * r + k];
      if (w < 0.0) throw ValidationError("blend weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("blend weights at node " + std::to_string(i) + " sum to " +
                            std::to_string(sum));
  }
  return combine_nodewise(
      ws,
      [&node_weights, r](int i, int k) { return node_weights[static_cast<size_t>(i) * r + k]; },
      labels);
}

GridField step_godunov_split(const SemiDiscreteProblem& problem, const GridField& state,
                             const Mask& interface_mask, double dt) {
  if (interface_mask.location != MaskLocation::interface)
    throw ValidationError("Godunov splitting needs an interface-located mask");
  if (static_cast<int>(interface_mask.values.size()) != state.n + 1)
    throw ValidationError("interface mask length does not match the grid");
  const auto& chi = interface_mask.values;
  const double nu = dt / state.dx;
  const int m = state.m;

  // U* = U + dt G_chi(U)
  InterfaceFluxes f0 = problem.assemble(state);
  GridField mid = state;
  for (int i = 0; i < state.n; ++i)
    for (int c = 0; c < m; ++c)
      mid.at(i, c) = state.at(i, c) - nu * (chi[i + 1] * f0.at(i + 1, c) - chi[i] * f0.at(i, c));

  // U^{n+1} = U* + dt G_{1-chi}(U*)
  InterfaceFluxes f1 = problem.assemble(mid);
  GridField out = mid;
  for (int i = 0; i < state.n; ++i)
    for (int c = 0; c < m; ++c)
      out.at(i, c) = mid.at(i, c) -
                     nu * ((1.0 - chi[i + 1]) * f1.at(i + 1, c) - (1.0 - chi[i]) * f1.at(i, c));
  return out;
}

std::string to_string(StepMode m) {
  switch (m) {
    case StepMode::single: return "single";
    case StepMode::equation: return "equation";
    case StepMode::flux: return "flux";
    case StepMode::blended: return "blended";
  }
  return "?";
}

StepMode step_mode_from_string(const std::string& s) {
  if (s == "single") return StepMode::single;
  if (s == "equation") return StepMode::equation;
  if (s == "flux") return StepMode::flux;
  if (s == "blended") return StepMode::blended;
  throw LookupError("unknown step mode '" + s + "' (valid: single, equation, flux, blended)");
}

namespace {

StepDiagnostics diagnose(const GridField& state, const Mask& mask) {
  StepDiagnostics d;
  d.mass = total_mass(state)[0];
  d.tv = tv_seminorm(state);
  d.chi_fraction = mask.values.empty() ? 1.0 : mask.mean();
  d.max_abs = state.max_abs();
  return d;
}

GridField apply_mode(const StageWorkspace& ws, const StepSpec& spec, const Mask& mask,
                     const std::vector<std::string>& labels) {
  switch (spec.mode) {
    case StepMode::single:
      return step_single(ws, labels[0]);
    case StepMode::equation:
      return step_equation_partitioned(ws, mask, labels);
    case StepMode::flux:
      return step_flux_partitioned(ws, mask, labels);
    case StepMode::blended: {
      if (labels.size() != 2)
        throw ValidationError("blended advance expects two labels driven by one mask");
      if (mask.location != MaskLocation::node)
        throw ValidationError("blended advance needs a node-located mask");
      const int n = ws.base().n;
      std::vector<double> weights(static_cast<size_t>(n) * 2, 0.0);
      for (int i = 0; i < n; ++i) {
        weights[static_cast<size_t>(i) * 2 + 0] = mask.values[i];
        weights[static_cast<size_t>(i) * 2 + 1] = 1.0 - mask.values[i];
      }
      return step_blended(ws, weights, labels);
    }
  }
  throw ValidationError("unknown step mode");
}

}  // namespace

RunResult advance(const SemiDiscreteProblem& problem, const GridField& initial_state,
                  const StepSpec& spec, const MaskStrategy& mask_strategy, double t_final,
                  const AdvanceOptions& options) {
  if (spec.tableau == nullptr) throw ValidationError("advance needs a tableau");
  if (t_final < 0.0) throw ValidationError("advance needs t_final >= 0");
  if (!options.fixed_dt && !(options.cfl > 0.0)) throw ValidationError("advance needs cfl > 0");
  if (options.fixed_dt && !(*options.fixed_dt > 0.0))
    throw ValidationError("advance needs a positive fixed dt");
  if (!initial_state.all_finite()) throw ValidationError("initial state is not finite");

  std::vector<std::string> labels = spec.labels;
  if (labels.empty()) {
    for (const auto& w : spec.tableau->weight_sets()) labels.push_back(w.label);
    if (spec.mode == StepMode::single) labels.resize(1);
  }
  for (const auto& l : labels) spec.tableau->weight_index(l);

  // Flux mode needs interface masks; node-valued strategies are converted by
  // the adjacent-node minimum and the conversion is recorded in provenance.
  MaskStrategy strategy = mask_strategy;
  bool auto_to_interface = false;
  if (spec.mode == StepMode::flux && !strategy.interface_located()) {
    strategy = strategy.with_interface_output();
    auto_to_interface = true;
  }

  RunResult res;
  GridField state = initial_state;
  double t = 0.0;
  const double t_eps = 1e-12 * std::max(t_final, 1.0);

  auto evaluate_mask = [&](const GridField& u, const InterfaceFluxes* flx) {
    if (spec.mode == StepMode::single) return Mask{MaskLocation::node, {}};
    MaskStrategy::Context ctx;
    ctx.state = &u;
    ctx.fluxes = flx;
    ctx.problem = &problem;
    return strategy.evaluate(ctx);
  };

  auto record_frame = [&](double time, const GridField& u) {
    res.frame_times.push_back(time);
    res.frames.push_back(u);
  };

  // One assembly per state: it provides the mask data, the diagnostics of
  // U^n, and the first stage of the step taken from U^n.
  InterfaceFluxes cur_fluxes = problem.assemble(state);
  Mask cur_mask = evaluate_mask(state, &cur_fluxes);
  res.times.push_back(0.0);
  res.diagnostics.push_back(diagnose(state, cur_mask));
  if (options.frame_stride > 0) record_frame(0.0, state);

  int step = 0;
  while (t < t_final - t_eps) {
    double dt;
    if (options.fixed_dt) {
      dt = *options.fixed_dt;
    } else {
      dt = options.cfl * state.dx / problem.max_wave_speed(state);
    }
    if (!(dt > t_eps * 1e-3)) {
      res.completed = false;
      res.diverged_step = step;
      res.diverged_time = t;
      break;
    }
    bool clipped = false;
    if (t + dt >= t_final - t_eps) {
      dt = t_final - t;
      clipped = true;
    }

    try {
      StageWorkspace ws = StageWorkspace::with_first_stage(problem, *spec.tableau, state, dt,
                                                           std::move(cur_fluxes));
      GridField next = apply_mode(ws, spec, cur_mask, labels);
      if (!next.all_finite() || next.max_abs() > options.divergence_cap)
        throw DivergenceError("non-finite or exploding state", step, t);
      state = std::move(next);
    } catch (const DivergenceError&) {
      res.completed = false;
      res.diverged_step = step;
      res.diverged_time = t;
      break;
    }

    t = clipped ? t_final : t + dt;
    ++step;

    cur_fluxes = problem.assemble(state);
    cur_mask = evaluate_mask(state, &cur_fluxes);
    res.times.push_back(t);
    res.diagnostics.push_back(diagnose(state, cur_mask));
    if (options.frame_stride > 0 && (step % options.frame_stride == 0 || t >= t_final - t_eps))
      record_frame(t, state);
    if (options.progress) options.progress(step, t);
  }

  res.steps = step;
  res.final_state = std::move(state);
  res.provenance = {
      {"problem", problem.name},
      {"mode", to_string(spec.mode)},
      {"labels", labels},
      {"mask", strategy.name()},
      {"mask_auto_to_interface", auto_to_interface},
      {"t_final", t_final},
      {"cfl", options.cfl},
      {"fixed_dt", options.fixed_dt ? nlohmann::json(*options.fixed_dt) : nlohmann::json()},
      {"steps", res.steps},
      {"completed", res.completed},
      {"kappa", problem.kappa},
      {"weno_epsilon", problem.weno_epsilon},
      {"boundary", to_string(problem.boundary)},
      {"centering", to_string(problem.centering)},
      {"flux_splitting", "global_lax_friedrichs"},
      {"chi_one_selects_first_label", true},
  };
  return res;
}

}  // namespace sperk
