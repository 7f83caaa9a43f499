#include "sperk/grid.hpp"

#include <cmath>

namespace sperk {

std::string to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "extrapolate";
}

std::string to_string(Centering c) { return c == Centering::vertex ? "vertex" : "cell"; }

GridField::GridField(int n, int m, double x_lo, double x_hi, Boundary b, Centering c)
    : n(n), m(m), x_lo(x_lo), x_hi(x_hi), boundary(b), centering(c) {
  if (n < 1) throw ValidationError("grid needs at least one node");
  if (m < 1) throw ValidationError("grid needs at least one component");
  if (!(x_hi > x_lo)) throw ValidationError("grid needs x_hi > x_lo");
  dx = (x_hi - x_lo) / n;
  values.assign(static_cast<size_t>(n) * m, 0.0);
}

int GridField::ghost_index(int i) const {
  if (i >= 0 && i < n) return i;
  if (boundary == Boundary::periodic) {
    int r = i % n;
    return r < 0 ? r + n : r;
  }
  return i < 0 ? 0 : n - 1;
}

double GridField::max_abs() const {
  double out = 0.0;
  for (double v : values) out = std::max(out, std::abs(v));
  return out;
}

bool GridField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace sperk
