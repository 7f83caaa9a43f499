#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sperk/grid.hpp"
#include "sperk/spatial.hpp"

namespace sperk {

enum class FluxAssembler { upwind, advdiff, weno_scalar, weno_euler };

std::string to_string(FluxAssembler a);

// A named PDE problem binding a flux assembler, flux parameters, and
// initial/boundary data on a fixed domain.
struct SemiDiscreteProblem {
  std::string name;
  int components = 1;
  FluxAssembler assembler = FluxAssembler::weno_scalar;

  // flux parameters
  double advection_speed = 1.0;   // upwind / weno advection
  double kappa = 0.5;             // Burgers f(u) = kappa u^2; 0 means advection flux
  double gas_gamma = 1.4;         // Euler
  double weno_epsilon = 1e-6;
  std::function<double(double)> a_fn;  // advdiff diffusion coefficient
  std::function<double(double)> b_fn;  // advdiff advection coefficient

  std::string ic;  // initial-condition tag
  double x_lo = 0.0, x_hi = 1.0;
  Boundary boundary = Boundary::periodic;
  Centering centering = Centering::vertex;

  GridField initial_state(int n) const;
  // Largest |df/du| (Euler: max |v| + sound speed) with a 1e-12 floor.
  double max_wave_speed(const GridField& state) const;
  InterfaceFluxes assemble(const GridField& state) const;
  std::vector<double> point_fluxes(const GridField& state) const;
};

struct ProblemParams {
  std::optional<double> kappa;
  std::optional<double> advection_speed;
  std::optional<double> epsilon;
  std::optional<std::string> spatial;  // advection only: "weno" (default) or "upwind"
  std::optional<std::string> ic;       // burgers: smooth | square | step2
};

// Names: "advection" (u = sin 2 pi x on [0,1]), "burgers" (smooth Eq-type,
// square wave, or step2 data), "advdiff" (variable-coefficient
// advection-diffusion on [0,1]), "euler_shu_osher".
SemiDiscreteProblem make_problem(const std::string& name, const ProblemParams& params = {});

// Accepts the flat aliases used by run configs (burgers_smooth, ...).
SemiDiscreteProblem make_problem_alias(const std::string& alias, const ProblemParams& params = {});
std::vector<std::string> problem_aliases();

}  // namespace sperk
