#pragma once

#include <complex>
#include <string>
#include <vector>

#include "sperk/error.hpp"

namespace sperk {

struct WeightSet {
  std::string label;
  std::vector<double> b;
  int declared_order = 1;
};

// Explicit Runge-Kutta coefficient matrix shared by several weight vectors.
// A pair in the usual sense carries two weight sets; a plain method carries
// one.  Construction enforces strict lower-triangularity, row-sum consistency
// of c, and unit weight sums.
class EmbeddedTableau {
 public:
  EmbeddedTableau(std::vector<std::vector<double>> a_rows, std::vector<double> c_nodes,
                  std::vector<WeightSet> weight_sets);

  int stages() const { return s_; }
  double a(int j, int k) const { return a_[static_cast<size_t>(j) * s_ + k]; }
  const std::vector<double>& c() const { return c_; }
  const std::vector<WeightSet>& weight_sets() const { return weights_; }

  bool has_weight_set(const std::string& label) const;
  const WeightSet& weight_set(const std::string& label) const;  // LookupError on miss
  int weight_index(const std::string& label) const;

  // Returns a copy with the weight sets reordered (diagnostic use).
  EmbeddedTableau with_weight_order(const std::vector<std::string>& labels) const;

 private:
  int s_ = 0;
  std::vector<double> a_;  // s*s row-major, zeros above and on the diagonal
  std::vector<double> c_;
  std::vector<WeightSet> weights_;
};

// Built-in pairs: "pair32" (3-stage second-order real/imaginary pair),
// "pair42" (classical RK4 embedded with a 4-stage real-axis method), and
// "pair75_53" (7-stage fifth-order method wrapping SSPRK(5,3)).
// Weight labels are "b" (first; selected where the mask is 1) and "bhat".
EmbeddedTableau builtin_pair(const std::string& name);
std::vector<std::string> builtin_pair_names();

struct OrderConditionResidual {
  std::string condition_id;  // "o<order>.<index>"
  int order = 1;
  double residual = 0.0;
};

// Rooted-tree order conditions through order 5 (1+1+2+4+9 = 17 conditions),
// residual = lhs - rhs for each.  Orders above 5 are not supported.
std::vector<OrderConditionResidual> order_residuals(const EmbeddedTableau& tab,
                                                    const std::string& weight_label,
                                                    int up_to_order);
std::vector<OrderConditionResidual> order_residuals(const EmbeddedTableau& tab,
                                                    const std::vector<double>& weights,
                                                    int up_to_order);

// Coefficients [alpha_0 .. alpha_s] of R(z) = sum alpha_k z^k with
// alpha_0 = 1, alpha_1 = sum(b), alpha_k = b^T A^{k-2} c for k >= 2.
std::vector<double> stability_polynomial(const EmbeddedTableau& tab,
                                         const std::string& weight_label);

std::complex<double> evaluate_stability_polynomial(const std::vector<double>& poly,
                                                   std::complex<double> z);

// Fourier symbol of the linear fifth-order upwind-biased scheme (WENO with
// weights frozen at 1/10, 6/10, 3/10) for advection at unit CFL.
std::complex<double> weno_bean_point(double theta);

struct StabilityMeasures {
  double real_axis_extent = 0.0;
  double imag_axis_extent = 0.0;      // rho_2
  double inscribed_disc_radius = 0.0; // rho, disc centered at -rho
  double weno_bean_scale = 0.0;       // rho_3, scale 1 == CFL 1
  bool inconsistent = false;          // set when alpha_1 != 1
};

// Each extent is found by bisection on a scaling parameter, accepting a set
// only when |R(z)| <= 1 + 1e-9 at every one of >= 512 samples of it.
StabilityMeasures stability_measures(const std::vector<double>& poly, double resolution);

// Radius of absolute monotonicity of the method (A, b): the largest r such
// that, with K the augmented (s+1)x(s+1) array [[A,0],[b^T,0]] restricted to
// the stages that actually influence the output, all entries of
// K(I + rK)^{-1} are >= -1e-12 and (I + rK)^{-1} 1 has entries in
// [-1e-12, 1 + 1e-12].  Stages with zero weight that no retained stage
// references are dropped first, so trailing unused stages of an embedded
// method do not zero out the coefficient.  Returns 0 when no r > 0 qualifies.
double ssp_coefficient(const EmbeddedTableau& tab, const std::string& weight_label,
                       double tolerance = 1e-8);

// Plain-text serialization: line 1 holds s, then s rows of A, then c, then
// one line per weight set: "label order b_1 ... b_s" (17 significant digits).
std::string tableau_to_text(const EmbeddedTableau& tab);
EmbeddedTableau tableau_from_text(const std::string& text);
void save_tableau(const EmbeddedTableau& tab, const std::string& path);
EmbeddedTableau load_tableau(const std::string& path);

// Resolves a builtin name, else falls back to reading a tableau file.
EmbeddedTableau resolve_tableau(const std::string& name_or_path);

}  // namespace sperk
