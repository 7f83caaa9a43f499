#include "sperk/spatial.hpp"

#include <cmath>

namespace sperk {

std::vector<double> flux_difference_rhs(const InterfaceFluxes& flx, double dx) {
  const int n = flx.n, m = flx.m;
  std::vector<double> rhs(static_cast<size_t>(n) * m, 0.0);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < m; ++c)
      rhs[static_cast<size_t>(i) * m + c] = -(flx.at(i + 1, c) - flx.at(i, c)) / dx;
  return rhs;
}

InterfaceFluxes upwind_interface_flux(const GridField& state, double speed) {
  if (state.m != 1) throw ValidationError("upwind flux expects a scalar field");
  if (!(speed > 0.0)) throw ValidationError("upwind flux needs speed > 0");
  InterfaceFluxes flx(state.n, 1);
  // f at interface j is carried by the node to its left.
  for (int j = 0; j <= state.n; ++j) flx.at(j) = speed * state.at(state.ghost_index(j - 1));
  return flx;
}

InterfaceFluxes advdiff_interface_flux(const GridField& state,
                                       const std::function<double(double)>& a_fn,
                                       const std::function<double(double)>& b_fn) {
  if (state.m != 1) throw ValidationError("advection-diffusion flux expects a scalar field");
  if (state.boundary != Boundary::periodic)
    throw ValidationError("advection-diffusion flux supports periodic boundaries only");
  InterfaceFluxes flx(state.n, 1);
  for (int j = 0; j <= state.n; ++j) {
    const double ul = state.at(state.ghost_index(j - 1));
    const double ur = state.at(state.ghost_index(j));
    const double x = state.interface_x(j);
    flx.at(j) = b_fn(x) * 0.5 * (ur + ul) - a_fn(x) * (ur * ur - ul * ul) / state.dx;
  }
  return flx;
}

SplitPointFluxes llf_flux_split(const std::vector<double>& point_fluxes, const GridField& state,
                                double alpha) {
  if (alpha < 0.0) throw ValidationError("flux splitting needs alpha >= 0");
  if (point_fluxes.size() != state.values.size())
    throw ValidationError("point flux array does not match the grid");
  SplitPointFluxes out;
  out.n = state.n;
  out.m = state.m;
  out.boundary = state.boundary;
  out.plus.resize(point_fluxes.size());
  out.minus.resize(point_fluxes.size());
  for (size_t i = 0; i < point_fluxes.size(); ++i) {
    out.plus[i] = 0.5 * (point_fluxes[i] + alpha * state.values[i]);
    out.minus[i] = 0.5 * (point_fluxes[i] - alpha * state.values[i]);
  }
  return out;
}

WenoRecon weno5_kernel(double v0, double v1, double v2, double v3, double v4, double epsilon) {
  const double q0 = (2.0 * v0 - 7.0 * v1 + 11.0 * v2) / 6.0;
  const double q1 = (-v1 + 5.0 * v2 + 2.0 * v3) / 6.0;
  const double q2 = (2.0 * v2 + 5.0 * v3 - v4) / 6.0;

  const double b0 = 13.0 / 12.0 * (v0 - 2.0 * v1 + v2) * (v0 - 2.0 * v1 + v2) +
                    0.25 * (v0 - 4.0 * v1 + 3.0 * v2) * (v0 - 4.0 * v1 + 3.0 * v2);
  const double b1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) * (v1 - 2.0 * v2 + v3) +
                    0.25 * (v1 - v3) * (v1 - v3);
  const double b2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) * (v2 - 2.0 * v3 + v4) +
                    0.25 * (3.0 * v2 - 4.0 * v3 + v4) * (3.0 * v2 - 4.0 * v3 + v4);

  const double a0 = 0.1 / ((epsilon + b0) * (epsilon + b0));
  const double a1 = 0.6 / ((epsilon + b1) * (epsilon + b1));
  const double a2 = 0.3 / ((epsilon + b2) * (epsilon + b2));
  const double total = a0 + a1 + a2;

  WenoRecon r;
  r.w0 = a0 / total;
  r.w1 = a1 / total;
  r.w2 = a2 / total;
  r.value = r.w0 * q0 + r.w1 * q1 + r.w2 * q2;
  return r;
}

InterfaceFluxes weno5_interface_flux(const SplitPointFluxes& split, double epsilon) {
  const int n = split.n, m = split.m;
  if (n < 5) throw ValidationError("WENO5 needs at least 5 nodes, got " + std::to_string(n));
  if (!(epsilon > 0.0)) throw ValidationError("WENO5 needs epsilon > 0");

  // Pad with 3 ghost cells per side so every stencil reads contiguously.
  const int pad = 3;
  auto ghost = [&](int i) {
    if (i >= 0 && i < n) return i;
    if (split.boundary == Boundary::periodic) {
      int r = i % n;
      return r < 0 ? r + n : r;
    }
    return i < 0 ? 0 : n - 1;
  };

  InterfaceFluxes flx(n, m);
  flx.weno_weights.assign(static_cast<size_t>(n + 1) * 3, 0.0);

  std::vector<double> fp(static_cast<size_t>(n + 2 * pad) * m);
  std::vector<double> fm(static_cast<size_t>(n + 2 * pad) * m);
  for (int i = -pad; i < n + pad; ++i) {
    const int g = ghost(i);
    for (int c = 0; c < m; ++c) {
      fp[static_cast<size_t>(i + pad) * m + c] = split.plus[static_cast<size_t>(g) * m + c];
      fm[static_cast<size_t>(i + pad) * m + c] = split.minus[static_cast<size_t>(g) * m + c];
    }
  }

  for (int j = 0; j <= n; ++j) {
    // Interface j lies right of node j-1; positive part reads cells
    // j-4..j, negative part mirrors to cells j+2..j-2.
    const int o = j - 1 + pad;
    for (int c = 0; c < m; ++c) {
      const WenoRecon plus =
          weno5_kernel(fp[static_cast<size_t>(o - 2) * m + c], fp[static_cast<size_t>(o - 1) * m + c],
                       fp[static_cast<size_t>(o) * m + c], fp[static_cast<size_t>(o + 1) * m + c],
                       fp[static_cast<size_t>(o + 2) * m + c], epsilon);
      const WenoRecon minus =
          weno5_kernel(fm[static_cast<size_t>(o + 3) * m + c], fm[static_cast<size_t>(o + 2) * m + c],
                       fm[static_cast<size_t>(o + 1) * m + c], fm[static_cast<size_t>(o) * m + c],
                       fm[static_cast<size_t>(o - 1) * m + c], epsilon);
      flx.at(j, c) = plus.value + minus.value;
      if (c == 0) {
        flx.weno_weights[static_cast<size_t>(j) * 3 + 0] = plus.w0;
        flx.weno_weights[static_cast<size_t>(j) * 3 + 1] = plus.w1;
        flx.weno_weights[static_cast<size_t>(j) * 3 + 2] = plus.w2;
      }
    }
  }
  return flx;
}

}  // namespace sperk
