#include "sperk/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sperk {

namespace {

constexpr double kPi = std::numbers::pi;

double advdiff_a(double x) {
  const double c = std::cos(2.0 * kPi * x - 0.5 * kPi) + 1.0;
  return 1.0 / 1000.0 + 1.0 / 10000.0 * std::pow(c, 10);
}

double advdiff_b(double x) {
  const double c = std::cos(2.0 * kPi * x - 1.5 * kPi) + 1.0;
  return 1.0 + 0.1 * std::pow(c, 10);
}

}  // namespace

std::string to_string(FluxAssembler a) {
  switch (a) {
    case FluxAssembler::upwind: return "upwind";
    case FluxAssembler::advdiff: return "advdiff";
    case FluxAssembler::weno_scalar: return "weno_scalar";
    case FluxAssembler::weno_euler: return "weno_euler";
  }
  return "?";
}

GridField SemiDiscreteProblem::initial_state(int n) const {
  GridField state(n, components, x_lo, x_hi, boundary, centering);
  if (ic == "sine") {
    for (int i = 0; i < n; ++i) state.at(i) = std::sin(2.0 * kPi * state.node_x(i));
  } else if (ic == "smooth") {
    for (int i = 0; i < n; ++i) {
      const double x = state.node_x(i);
      const double phi = x - std::sin(2.0 * kPi * x) / (4.0 * kPi);
      state.at(i) = 0.5 - 0.5 * std::cos(kPi * phi);
    }
  } else if (ic == "square") {
    // Unit square wave on [1/4, 3/4); total variation 2 under the periodic wrap.
    for (int i = 0; i < n; ++i) {
      const double x = state.node_x(i);
      state.at(i) = (x >= 0.25 && x < 0.75) ? 1.0 : 0.0;
    }
  } else if (ic == "step2") {
    for (int i = 0; i < n; ++i) state.at(i) = state.node_x(i) <= 0.0 ? 2.0 : 0.0;
  } else if (ic == "advdiff") {
    for (int i = 0; i < n; ++i) {
      const double s = std::sin(2.0 * kPi * state.node_x(i));
      state.at(i) = 0.1 * s * s * s + 2.0;
    }
  } else if (ic == "shu_osher") {
    for (int i = 0; i < n; ++i) {
      const double x = state.node_x(i);
      double rho, v, p;
      if (x < -4.0) {
        rho = 3.857143;
        v = 2.629369;
        p = 10.33333;
      } else {
        rho = 1.0 + 0.2 * std::sin(5.0 * x);
        v = 0.0;
        p = 1.0;
      }
      state.at(i, 0) = rho;
      state.at(i, 1) = rho * v;
      state.at(i, 2) = p / (gas_gamma - 1.0) + 0.5 * rho * v * v;
    }
  } else {
    throw LookupError("unknown initial condition '" + ic + "'");
  }
  return state;
}

double SemiDiscreteProblem::max_wave_speed(const GridField& state) const {
  double speed = 0.0;
  switch (assembler) {
    case FluxAssembler::upwind:
      speed = advection_speed;
      break;
    case FluxAssembler::advdiff: {
      // Advective part only; the scan experiments supply dt directly.
      for (int i = 0; i < state.n; ++i)
        speed = std::max(speed, std::abs(b_fn(state.node_x(i))));
      break;
    }
    case FluxAssembler::weno_scalar: {
      if (kappa == 0.0) {
        speed = std::abs(advection_speed);
      } else {
        for (int i = 0; i < state.n; ++i)
          speed = std::max(speed, std::abs(2.0 * kappa * state.at(i)));
      }
      break;
    }
    case FluxAssembler::weno_euler: {
      for (int i = 0; i < state.n; ++i) {
        const double rho = state.at(i, 0);
        const double v = state.at(i, 1) / rho;
        const double e = state.at(i, 2);
        const double p = (gas_gamma - 1.0) * (e - 0.5 * rho * v * v);
        const double c = std::sqrt(std::max(0.0, gas_gamma * p / rho));
        speed = std::max(speed, std::abs(v) + c);
      }
      break;
    }
  }
  return std::max(speed, 1e-12);
}

std::vector<double> SemiDiscreteProblem::point_fluxes(const GridField& state) const {
  std::vector<double> f(state.values.size(), 0.0);
  switch (assembler) {
    case FluxAssembler::weno_scalar: {
      if (kappa == 0.0) {
        for (size_t i = 0; i < f.size(); ++i) f[i] = advection_speed * state.values[i];
      } else {
        for (size_t i = 0; i < f.size(); ++i) f[i] = kappa * state.values[i] * state.values[i];
      }
      break;
    }
    case FluxAssembler::weno_euler: {
      for (int i = 0; i < state.n; ++i) {
        const double rho = state.at(i, 0);
        const double mom = state.at(i, 1);
        const double e = state.at(i, 2);
        const double v = mom / rho;
        const double p = (gas_gamma - 1.0) * (e - 0.5 * rho * v * v);
        f[static_cast<size_t>(i) * 3 + 0] = mom;
        f[static_cast<size_t>(i) * 3 + 1] = mom * v + p;
        f[static_cast<size_t>(i) * 3 + 2] = v * (e + p);
      }
      break;
    }
    default:
      throw ValidationError("point fluxes only defined for WENO assemblers");
  }
  return f;
}

InterfaceFluxes SemiDiscreteProblem::assemble(const GridField& state) const {
  switch (assembler) {
    case FluxAssembler::upwind:
      return upwind_interface_flux(state, advection_speed);
    case FluxAssembler::advdiff:
      return advdiff_interface_flux(state, a_fn, b_fn);
    case FluxAssembler::weno_scalar:
    case FluxAssembler::weno_euler: {
      const auto f = point_fluxes(state);
      const auto split = llf_flux_split(f, state, max_wave_speed(state));
      return weno5_interface_flux(split, weno_epsilon);
    }
  }
  throw ValidationError("unknown flux assembler");
}

SemiDiscreteProblem make_problem(const std::string& name, const ProblemParams& params) {
  SemiDiscreteProblem p;
  p.name = name;
  if (name == "advection") {
    p.assembler = FluxAssembler::weno_scalar;
    if (params.spatial) {
      if (*params.spatial == "upwind")
        p.assembler = FluxAssembler::upwind;
      else if (*params.spatial != "weno")
        throw LookupError("advection spatial operator must be weno or upwind");
    }
    p.kappa = 0.0;
    p.advection_speed = params.advection_speed.value_or(1.0);
    if (!(p.advection_speed > 0.0))
      throw ValidationError("advection problem needs a positive speed");
    p.ic = params.ic.value_or("sine");
    p.x_lo = 0.0;
    p.x_hi = 1.0;
    p.boundary = Boundary::periodic;
    p.centering = Centering::vertex;
  } else if (name == "burgers") {
    p.assembler = FluxAssembler::weno_scalar;
    p.kappa = params.kappa.value_or(0.5);
    p.ic = params.ic.value_or("smooth");
    if (p.ic == "smooth") {
      p.x_lo = -1.0;
      p.x_hi = 1.0;
      p.boundary = Boundary::periodic;
      p.centering = Centering::vertex;
    } else if (p.ic == "square") {
      p.x_lo = 0.0;
      p.x_hi = 1.0;
      p.boundary = Boundary::periodic;
      p.centering = Centering::vertex;
    } else if (p.ic == "step2") {
      p.x_lo = -1.0;
      p.x_hi = 1.0;
      p.boundary = Boundary::extrapolate;
      p.centering = Centering::cell;
    } else {
      throw LookupError("burgers initial condition must be smooth, square or step2");
    }
  } else if (name == "advdiff") {
    p.assembler = FluxAssembler::advdiff;
    p.a_fn = advdiff_a;
    p.b_fn = advdiff_b;
    p.ic = "advdiff";
    p.x_lo = 0.0;
    p.x_hi = 1.0;
    p.boundary = Boundary::periodic;
    p.centering = Centering::vertex;
  } else if (name == "euler_shu_osher") {
    p.assembler = FluxAssembler::weno_euler;
    p.components = 3;
    p.ic = "shu_osher";
    p.x_lo = -5.0;
    p.x_hi = 5.0;
    p.boundary = Boundary::extrapolate;
    p.centering = Centering::cell;
  } else {
    throw LookupError("unknown problem '" + name +
                      "' (valid: advection, burgers, advdiff, euler_shu_osher)");
  }
  if (params.epsilon) {
    if (!(*params.epsilon > 0.0)) throw ValidationError("WENO epsilon must be positive");
    p.weno_epsilon = *params.epsilon;
  }
  return p;
}

SemiDiscreteProblem make_problem_alias(const std::string& alias, const ProblemParams& params) {
  ProblemParams pp = params;
  if (alias == "burgers_smooth") {
    pp.ic = pp.ic.value_or("smooth");
    return make_problem("burgers", pp);
  }
  if (alias == "burgers_square") {
    pp.ic = pp.ic.value_or("square");
    return make_problem("burgers", pp);
  }
  if (alias == "burgers_step2") {
    pp.ic = pp.ic.value_or("step2");
    return make_problem("burgers", pp);
  }
  if (alias == "advection" || alias == "burgers" || alias == "advdiff" ||
      alias == "euler_shu_osher")
    return make_problem(alias, pp);
  throw LookupError("unknown problem '" + alias +
                    "' (valid: advection, burgers_smooth, burgers_square, burgers_step2, "
                    "advdiff, euler_shu_osher)");
}

std::vector<std::string> problem_aliases() {
  return {"advection", "burgers_smooth", "burgers_square", "burgers_step2", "advdiff",
          "euler_shu_osher"};
}

}  // namespace sperk
