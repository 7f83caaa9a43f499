#pragma once

#include <vector>

#include "sperk/grid.hpp"

namespace sperk {

struct RunResult;

// Discrete total variation sum |u_{i+1} - u_i| of one component, wrapping
// under periodic boundaries.
double tv_seminorm(const GridField& state, int component = 0);

// dx * sum_i u_i per component.
std::vector<double> total_mass(const GridField& state);

enum class NormTag { l2, max };

// l2 = sqrt(dx * sum (u-r)^2) over all components; max = max |u-r|.
double error_norm(const GridField& state, const GridField& reference, NormTag norm);

// Least-squares slope of log(error) against log(dx); needs matching lists of
// at least two positive errors.
double estimate_convergence_order(const std::vector<double>& errors,
                                  const std::vector<double>& dxs);

// Tracks the level-crossing abscissa of a monotone front through the saved
// frames of the last half of a run and returns the least-squares slope of
// position against time.
double estimate_shock_speed(const RunResult& run, double level);

// Abscissa of the steepest gradient of one component (interface coordinate
// of the largest |u_{i+1} - u_i|).
double steepest_gradient_location(const GridField& state, int component = 0);

}  // namespace sperk
