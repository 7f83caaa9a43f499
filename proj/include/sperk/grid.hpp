#pragma once

#include <string>
#include <vector>

#include "sperk/error.hpp"

namespace sperk {

enum class Boundary { periodic, extrapolate };
enum class Centering { vertex, cell };

std::string to_string(Boundary b);
std::string to_string(Centering c);

// Uniform 1-D grid of n nodes with m solution components stored node-major.
// Node coordinates: vertex-centered x_i = x_lo + i*dx, cell-centered
// x_i = x_lo + (i + 1/2)*dx, with x_hi - x_lo = n*dx in both cases.
struct GridField {
  int n = 0;
  int m = 1;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double dx = 0.0;
  Boundary boundary = Boundary::periodic;
  Centering centering = Centering::vertex;
  std::vector<double> values;  // n*m

  GridField() = default;
  GridField(int n, int m, double x_lo, double x_hi, Boundary b, Centering c);

  double& at(int i, int comp = 0) { return values[static_cast<size_t>(i) * m + comp]; }
  double at(int i, int comp = 0) const { return values[static_cast<size_t>(i) * m + comp]; }

  double node_x(int i) const {
    return centering == Centering::vertex ? x_lo + i * dx : x_lo + (i + 0.5) * dx;
  }
  // Interface j sits between nodes j-1 and j, j = 0..n.
  double interface_x(int j) const {
    return centering == Centering::vertex ? x_lo + (j - 0.5) * dx : x_lo + j * dx;
  }

  // Maps any node index (including out-of-range ghosts) to a stored index:
  // periodic wrap, or clamp to the edge for constant-value extrapolation.
  int ghost_index(int i) const;

  double max_abs() const;
  bool all_finite() const;
};

// Interface values f_{j-1/2}; row j = 0..n holds the flux at the left edge of
// node j (row n is the right edge of the last node).  For periodic grids
// row 0 and row n are bitwise equal by construction.
struct InterfaceFluxes {
  int n = 0;  // number of nodes; n+1 interface rows
  int m = 1;
  std::vector<double> values;        // (n+1)*m
  std::vector<double> weno_weights;  // optional, (n+1)*3; positive-part weights of component 0

  InterfaceFluxes() = default;
  InterfaceFluxes(int n, int m) : n(n), m(m), values(static_cast<size_t>(n + 1) * m, 0.0) {}

  double& at(int j, int comp = 0) { return values[static_cast<size_t>(j) * m + comp]; }
  double at(int j, int comp = 0) const { return values[static_cast<size_t>(j) * m + comp]; }

  bool has_weno_weights() const { return !weno_weights.empty(); }
  double weight(int j, int k) const { return weno_weights[static_cast<size_t>(j) * 3 + k]; }
};

}  // namespace sperk
