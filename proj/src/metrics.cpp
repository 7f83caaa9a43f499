#include "sperk/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sperk/integrators.hpp"

namespace sperk {

double tv_seminorm(const GridField& state, int component) {
  double tv = 0.0;
  for (int i = 0; i + 1 < state.n; ++i)
    tv += std::abs(state.at(i + 1, component) - state.at(i, component));
  if (state.boundary == Boundary::periodic && state.n > 1)
    tv += std::abs(state.at(0, component) - state.at(state.n - 1, component));
  return tv;
}

std::vector<double> total_mass(const GridField& state) {
  std::vector<double> mass(state.m, 0.0);
  for (int c = 0; c < state.m; ++c) {
    double acc = 0.0;
    for (int i = 0; i < state.n; ++i) acc += state.at(i, c);
    mass[c] = state.dx * acc;
  }
  return mass;
}

double error_norm(const GridField& state, const GridField& reference, NormTag norm) {
  if (state.n != reference.n || state.m != reference.m)
    throw ValidationError("error norm needs states on the same grid");
  if (norm == NormTag::max) {
    double out = 0.0;
    for (size_t i = 0; i < state.values.size(); ++i)
      out = std::max(out, std::abs(state.values[i] - reference.values[i]));
    return out;
  }
  double acc = 0.0;
  for (size_t i = 0; i < state.values.size(); ++i) {
    const double d = state.values[i] - reference.values[i];
    acc += d * d;
  }
  return std::sqrt(state.dx * acc);
}

double estimate_convergence_order(const std::vector<double>& errors,
                                  const std::vector<double>& dxs) {
  if (errors.size() < 2 || errors.size() != dxs.size())
    throw ValidationError("convergence order needs matching lists of at least two errors");
  for (double e : errors)
    if (!(e > 0.0)) throw ValidationError("convergence order undefined for non-positive errors");
  for (double d : dxs)
    if (!(d > 0.0)) throw ValidationError("convergence order needs positive dx values");

  const size_t n = errors.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(dxs[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw ValidationError("convergence order needs distinct dx values");
  return (n * sxy - sx * sy) / denom;
}

namespace {

// First down-crossing of `level` scanning from the left, linearly
// interpolated; the fronts tracked here fall from u_left > level to
// u_right < level.
double crossing_abscissa(const GridField& state, double level, int frame_index) {
  for (int i = 0; i + 1 < state.n; ++i) {
    const double a = state.at(i);
    const double b = state.at(i + 1);
    if (a >= level && b < level) {
      const double frac = (a - level) / (a - b);
      return state.node_x(i) + frac * state.dx;
    }
  }
  throw ValidationError("no level crossing found in frame " + std::to_string(frame_index));
}

}  // namespace

double estimate_shock_speed(const RunResult& run, double level) {
  if (!run.completed) throw ValidationError("shock speed needs a completed run");
  if (run.frames.size() < 2)
    throw ValidationError("shock speed needs at least two saved frames");

  const double t_end = run.frame_times.back();
  const double t_mid = 0.5 * t_end;
  std::vector<double> ts, xs;
  for (size_t k = 0; k < run.frames.size(); ++k) {
    if (run.frame_times[k] < t_mid) continue;
    ts.push_back(run.frame_times[k]);
    xs.push_back(crossing_abscissa(run.frames[k], level, static_cast<int>(k)));
  }
  if (ts.size() < 2) throw ValidationError("shock speed needs two frames in the fit window");

  const size_t n = ts.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sx += ts[i];
    sy += xs[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * xs[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw ValidationError("shock speed fit is degenerate");
  return (n * sxy - sx * sy) / denom;
}

double steepest_gradient_location(const GridField& state, int component) {
  int best = 0;
  double best_jump = -1.0;
  for (int i = 0; i + 1 < state.n; ++i) {
    const double jump = std::abs(state.at(i + 1, component) - state.at(i, component));
    if (jump > best_jump) {
      best_jump = jump;
      best = i;
    }
  }
  return 0.5 * (state.node_x(best) + state.node_x(best + 1));
}

}  // namespace sperk
