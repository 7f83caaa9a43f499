#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sperk/grid.hpp"

namespace sperk {

struct SemiDiscreteProblem;

enum class MaskLocation { node, interface };

// Partitioning values chi in [0,1].  chi = 1 selects the FIRST weight label
// of a partitioned step, chi = 0 the second.
struct Mask {
  MaskLocation location = MaskLocation::node;
  std::vector<double> values;  // length n (node) or n+1 (interface)

  bool is_binary() const;
  void validate() const;  // range check
  double mean() const;
  double fraction_at_one() const;
};

// chi_i = 1 where |u_{i+1} - 2 u_i + u_{i-1}| < c_threshold * dx^2
// (component 0 for systems; ghost handling follows the boundary tag).
Mask mask_second_difference(const GridField& state, double c_threshold, double dx);

// chi_i = 1 iff the WENO weights at interface i+1/2 (the interface whose
// positive-flux stencil is centered on node i) are all within `threshold` of
// (1/10, 6/10, 3/10).  The fluxes must carry recorded weights.
Mask mask_from_weno_weights(const InterfaceFluxes& fluxes, double threshold);

// chi_i = 0 iff lo < u_i < hi, else 1.
Mask mask_value_window(const GridField& state, double lo, double hi);

// chi_i = 1 iff a_fn(x_i) > cutoff; time-invariant.
Mask mask_coefficient_threshold(const std::function<double(double)>& a_fn, const GridField& grid,
                                double cutoff);

// chi_i <- min over |j| <= radius of chi_{i+j} (wrap or edge replication).
Mask widen_mask(const Mask& mask, int radius, Boundary boundary);

// chi_{i+1/2} = min(chi_i, chi_{i+1}); node-located input required.
Mask node_to_interface(const Mask& mask, Boundary boundary);

// Named mask pipeline: a source ("second_diff(C=500)", "weno(theta=0.06)",
// "value_window(lo,hi)", "coef_threshold(cutoff)", "constant(v)",
// "heaviside(x0)", "random(seed)") composed with "widen(r)" and
// "to_interface" via '|'.  The random source redraws every evaluation.
class MaskStrategy {
 public:
  MaskStrategy();  // constant(1)

  struct Context {
    const GridField* state = nullptr;
    const InterfaceFluxes* fluxes = nullptr;          // assembly at U^n, for weno masks
    const SemiDiscreteProblem* problem = nullptr;     // for coef_threshold
  };

  Mask evaluate(const Context& ctx);
  const std::string& name() const { return name_; }
  bool interface_located() const { return to_interface_; }

  static MaskStrategy parse(const std::string& text);
  // Appends "| to_interface" if the pipeline does not already end at interfaces.
  MaskStrategy with_interface_output() const;

 private:
  std::string name_ = "constant(1)";
  std::string source_;
  std::vector<double> args_;
  std::uint64_t seed_ = 0;
  int widen_radius_ = 0;
  bool widened_ = false;
  bool to_interface_ = false;
  std::mt19937_64 rng_;
};

}  // namespace sperk
