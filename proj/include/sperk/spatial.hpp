#pragma once

#include <functional>
#include <vector>

#include "sperk/grid.hpp"

namespace sperk {

// rhs_i = -(f_{i+1/2} - f_{i-1/2}) / dx, component-wise; returns n*m values.
std::vector<double> flux_difference_rhs(const InterfaceFluxes& flx, double dx);

// First-order upwind flux for right-moving advection: f_{i+1/2} = a u_i.
InterfaceFluxes upwind_interface_flux(const GridField& state, double speed);

// Three-point centered advection plus diffusion of u^2:
// f_{i+1/2} = b(x) (u_{i+1}+u_i)/2 - a(x) (u_{i+1}^2 - u_i^2)/dx, periodic only.
InterfaceFluxes advdiff_interface_flux(const GridField& state,
                                       const std::function<double(double)>& a_fn,
                                       const std::function<double(double)>& b_fn);

// Point fluxes split into upwind/downwind parts, f_pm = (f +- alpha u)/2.
struct SplitPointFluxes {
  int n = 0;
  int m = 1;
  Boundary boundary = Boundary::periodic;
  std::vector<double> plus;   // n*m
  std::vector<double> minus;  // n*m
};

SplitPointFluxes llf_flux_split(const std::vector<double>& point_fluxes, const GridField& state,
                                double alpha);

// Single-stencil fifth-order WENO reconstruction of the left-biased flux at
// the interface right of v2, from point values v0..v4 = f_{j-2}..f_{j+2}.
struct WenoRecon {
  double value = 0.0;
  double w0 = 0.0, w1 = 0.0, w2 = 0.0;
};
WenoRecon weno5_kernel(double v0, double v1, double v2, double v3, double v4, double epsilon);

// Fifth-order WENO interface fluxes: the positive part uses the upwind-biased
// stencil, the negative part mirrors it about the interface, and the sum is
// returned with the positive-part weights of component 0 recorded per
// interface.  Needs at least 5 nodes.
InterfaceFluxes weno5_interface_flux(const SplitPointFluxes& split, double epsilon);

}  // namespace sperk
