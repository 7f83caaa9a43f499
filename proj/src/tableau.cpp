#include "sperk/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace sperk {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

EmbeddedTableau::EmbeddedTableau(std::vector<std::vector<double>> a_rows,
                                 std::vector<double> c_nodes, std::vector<WeightSet> weight_sets)
    : s_(static_cast<int>(c_nodes.size())), c_(std::move(c_nodes)), weights_(std::move(weight_sets)) {
  if (s_ < 1) throw ValidationError("tableau needs at least one stage");
  if (static_cast<int>(a_rows.size()) != s_)
    throw ValidationError("tableau A must have one row per stage");
  if (weights_.empty()) throw ValidationError("tableau needs at least one weight set");

  a_.assign(static_cast<size_t>(s_) * s_, 0.0);
  for (int j = 0; j < s_; ++j) {
    if (static_cast<int>(a_rows[j].size()) > s_)
      throw ValidationError("tableau A row " + std::to_string(j + 1) + " too long");
    for (int k = 0; k < static_cast<int>(a_rows[j].size()); ++k) {
      if (k >= j && a_rows[j][k] != 0.0)
        throw ValidationError("tableau is not explicit: a(" + std::to_string(j + 1) + "," +
                              std::to_string(k + 1) + ") nonzero");
      a_[static_cast<size_t>(j) * s_ + k] = a_rows[j][k];
    }
    double row_sum = 0.0;
    for (int k = 0; k < j; ++k) row_sum += a(j, k);
    if (std::abs(row_sum - c_[j]) > 1e-14)
      throw ValidationError("row " + std::to_string(j + 1) +
                            " of A is inconsistent with c: sum=" + fmt17(row_sum) +
                            " c=" + fmt17(c_[j]));
  }

  for (const auto& w : weights_) {
    if (static_cast<int>(w.b.size()) != s_)
      throw ValidationError("weight set '" + w.label + "' has wrong length");
    if (w.declared_order < 1)
      throw ValidationError("weight set '" + w.label + "' must declare order >= 1");
    double sum = 0.0;
    for (double v : w.b) sum += v;
    if (std::abs(sum - 1.0) > 1e-12)
      throw ValidationError("weight set '" + w.label + "' sums to " + fmt17(sum) + ", not 1");
    int count = 0;
    for (const auto& o : weights_)
      if (o.label == w.label) ++count;
    if (count != 1) throw ValidationError("duplicate weight label '" + w.label + "'");
  }
}

bool EmbeddedTableau::has_weight_set(const std::string& label) const {
  for (const auto& w : weights_)
    if (w.label == label) return true;
  return false;
}

int EmbeddedTableau::weight_index(const std::string& label) const {
  for (size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i].label == label) return static_cast<int>(i);
  std::string known;
  for (const auto& w : weights_) known += (known.empty() ? "" : ", ") + w.label;
  throw LookupError("unknown weight label '" + label + "' (have: " + known + ")");
}

const WeightSet& EmbeddedTableau::weight_set(const std::string& label) const {
  return weights_[weight_index(label)];
}

EmbeddedTableau EmbeddedTableau::with_weight_order(const std::vector<std::string>& labels) const {
  std::vector<WeightSet> reordered;
  for (const auto& l : labels) reordered.push_back(weight_set(l));
  std::vector<std::vector<double>> rows(s_);
  for (int j = 0; j < s_; ++j)
    for (int k = 0; k < j; ++k) rows[j].push_back(a(j, k));
  return EmbeddedTableau(rows, c_, reordered);
}

EmbeddedTableau builtin_pair(const std::string& name) {
  if (name == "pair32") {
    // 3-stage second-order pair: b has the RKC(3,2)-type real-axis stability
    // polynomial, bhat maximizes imaginary axis inclusion (alpha_3 = 1/4).
    std::vector<std::vector<double>> a = {{}, {3.0 / 8.0}, {3.0 / 16.0, 3.0 / 16.0}};
    std::vector<double> c = {0.0, 3.0 / 8.0, 3.0 / 8.0};
    WeightSet b{"b", {-1.0 / 3.0, 4.0 / 9.0, 8.0 / 9.0}, 2};
    WeightSet bhat{"bhat", {-1.0 / 3.0, -20.0 / 9.0, 32.0 / 9.0}, 2};
    return EmbeddedTableau(a, c, {b, bhat});
  }
  if (name == "pair42") {
    // Classical RK4 (bhat, order 4) with RKC(4,2)-type second-order weights b.
    std::vector<std::vector<double>> a = {{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}};
    std::vector<double> c = {0.0, 0.5, 0.5, 1.0};
    WeightSet b{"b", {2.0 / 125.0, 17.0 / 25.0, 36.0 / 125.0, 2.0 / 125.0}, 2};
    WeightSet bhat{"bhat", {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}, 4};
    return EmbeddedTableau(a, c, {b, bhat});
  }
  if (name == "pair75_53") {
    // 7-stage fifth-order method (b) sharing its first five stages with
    // SSPRK(5,3) (bhat); coefficients to 15 digits.
    const double a21 = 0.377268915331368;
    const double a41 = 0.242995220537396;
    const double a51 = 0.153589067695126;
    const double a54 = 0.23845893284629;
    std::vector<std::vector<double>> a = {
        {},
        {a21},
        {a21, a21},
        {a41, a41, a41},
        {a51, a51, a51, a54},
        {0.113015751552667, 1.49947221487533, 0.134753400626063, -1.06421259296782,
         0.205145170072233},
        {-0.512110930783855, 3.91735780781337, -0.0470520461913835, -0.218621292015928,
         -1.64543995945252, -0.494133579369683}};
    std::vector<double> c(7, 0.0);
    for (size_t j = 0; j < a.size(); ++j) {
      double sum = 0.0;
      for (double v : a[j]) sum += v;
      c[j] = sum;
    }
    WeightSet b{"b",
                {0.122097569374901, 0.492898173466563, -0.232023614650883, -1.98394581022939,
                 1.85394392181784, 0.965538124667539, -0.21850836444657},
                5};
    WeightSet bhat{"bhat",
                   {0.206734020864804, 0.206734020864804, 0.117097251841844, 0.18180256012014,
                    0.287632146308408, 0.0, 0.0},
                   3};
    return EmbeddedTableau(a, c, {b, bhat});
  }
  throw LookupError("unknown builtin pair '" + name + "' (valid: pair32, pair42, pair75_53)");
}

std::vector<std::string> builtin_pair_names() { return {"pair32", "pair42", "pair75_53"}; }

namespace {

std::vector<double> mat_vec(const EmbeddedTableau& tab, const std::vector<double>& v) {
  const int s = tab.stages();
  std::vector<double> out(s, 0.0);
  for (int j = 0; j < s; ++j) {
    double acc = 0.0;
    for (int k = 0; k < j; ++k) acc += tab.a(j, k) * v[k];
    out[j] = acc;
  }
  return out;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

std::vector<double> had(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return out;
}

}  // namespace

std::vector<OrderConditionResidual> order_residuals(const EmbeddedTableau& tab,
                                                    const std::vector<double>& b,
                                                    int up_to_order) {
  if (up_to_order < 1 || up_to_order > 5)
    throw ValidationError("order conditions supported only for orders 1..5, got " +
                          std::to_string(up_to_order));
  if (static_cast<int>(b.size()) != tab.stages())
    throw ValidationError("weight vector length does not match stage count");

  const std::vector<double>& c = tab.c();
  std::vector<double> ones(c.size(), 1.0);
  const auto c2 = had(c, c);
  const auto c3 = had(c2, c);
  const auto c4 = had(c3, c);
  const auto Ac = mat_vec(tab, c);
  const auto Ac2 = mat_vec(tab, c2);
  const auto Ac3 = mat_vec(tab, c3);
  const auto A2c = mat_vec(tab, Ac);
  const auto A3c = mat_vec(tab, A2c);
  const auto AcAc = mat_vec(tab, had(c, Ac));
  const auto AAc2 = mat_vec(tab, Ac2);

  std::vector<OrderConditionResidual> out;
  auto add = [&](int order, int index, double lhs, double rhs) {
    out.push_back({"o" + std::to_string(order) + "." + std::to_string(index), order, lhs - rhs});
  };

  add(1, 1, dot(b, ones), 1.0);
  if (up_to_order >= 2) add(2, 1, dot(b, c), 1.0 / 2.0);
  if (up_to_order >= 3) {
    add(3, 1, dot(b, c2), 1.0 / 3.0);
    add(3, 2, dot(b, Ac), 1.0 / 6.0);
  }
  if (up_to_order >= 4) {
    add(4, 1, dot(b, c3), 1.0 / 4.0);
    add(4, 2, dot(b, had(c, Ac)), 1.0 / 8.0);
    add(4, 3, dot(b, Ac2), 1.0 / 12.0);
    add(4, 4, dot(b, A2c), 1.0 / 24.0);
  }
  if (up_to_order >= 5) {
    add(5, 1, dot(b, c4), 1.0 / 5.0);
    add(5, 2, dot(b, had(c2, Ac)), 1.0 / 10.0);
    add(5, 3, dot(b, had(Ac, Ac)), 1.0 / 20.0);
    add(5, 4, dot(b, had(c, Ac2)), 1.0 / 15.0);
    add(5, 5, dot(b, had(c, A2c)), 1.0 / 30.0);
    add(5, 6, dot(b, Ac3), 1.0 / 20.0);
    add(5, 7, dot(b, AcAc), 1.0 / 40.0);
    add(5, 8, dot(b, AAc2), 1.0 / 60.0);
    add(5, 9, dot(b, A3c), 1.0 / 120.0);
  }
  return out;
}

std::vector<OrderConditionResidual> order_residuals(const EmbeddedTableau& tab,
                                                    const std::string& weight_label,
                                                    int up_to_order) {
  return order_residuals(tab, tab.weight_set(weight_label).b, up_to_order);
}

std::vector<double> stability_polynomial(const EmbeddedTableau& tab,
                                         const std::string& weight_label) {
  const auto& b = tab.weight_set(weight_label).b;
  const int s = tab.stages();
  std::vector<double> poly;
  poly.reserve(s + 1);
  poly.push_back(1.0);
  std::vector<double> v(s, 1.0);  // A^{k-1} * 1; note A*1 = c
  for (int k = 1; k <= s; ++k) {
    poly.push_back(dot(b, v));
    v = mat_vec(tab, v);
  }
  return poly;
}

std::complex<double> evaluate_stability_polynomial(const std::vector<double>& poly,
                                                   std::complex<double> z) {
  std::complex<double> acc(0.0, 0.0);
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::complex<double> weno_bean_point(double theta) {
  // Interface weights of the frozen-weight fifth-order upwind-biased flux,
  // f_{j+1/2} = sum w_k f_{j+k}, k = -2..2.
  static const double w[5] = {1.0 / 30.0, -13.0 / 60.0, 47.0 / 60.0, 27.0 / 60.0, -3.0 / 60.0};
  std::complex<double> h(0.0, 0.0);
  for (int k = 0; k < 5; ++k) {
    double p = (k - 2) * theta;
    h += w[k] * std::complex<double>(std::cos(p), std::sin(p));
  }
  std::complex<double> one_minus_shift = 1.0 - std::complex<double>(std::cos(theta), -std::sin(theta));
  return -h * one_minus_shift;
}

namespace {

constexpr double kRegionSlack = 1e-9;
constexpr int kRegionSamples = 2048;

// Bisection on a scale factor; feasible(scale) must sample the whole candidate
// set.  Returns the largest accepted scale (0 if even tiny scales fail).
template <typename Feasible>
double bisect_scale(Feasible feasible, double resolution, double cap = 1e6) {
  double lo = 0.0, hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) return cap;
  }
  while (hi - lo > resolution) {
    double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

StabilityMeasures stability_measures(const std::vector<double>& poly, double resolution) {
  if (poly.empty() || poly[0] != 1.0)
    throw ValidationError("stability polynomial must start with alpha_0 = 1");
  if (resolution <= 0.0) throw ValidationError("resolution must be positive");

  StabilityMeasures out;
  out.inconsistent = poly.size() < 2 || std::abs(poly[1] - 1.0) > 1e-12;

  auto inside = [&poly](std::complex<double> z) {
    return std::abs(evaluate_stability_polynomial(poly, z)) <= 1.0 + kRegionSlack;
  };

  out.real_axis_extent = bisect_scale(
      [&](double len) {
        for (int i = 1; i <= kRegionSamples; ++i)
          if (!inside({-len * i / kRegionSamples, 0.0})) return false;
        return true;
      },
      resolution);

  out.imag_axis_extent = bisect_scale(
      [&](double len) {
        for (int i = 1; i <= kRegionSamples; ++i)
          if (!inside({0.0, len * i / kRegionSamples})) return false;
        return true;
      },
      resolution);

  // |R| is subharmonic, so checking the boundary circle covers the disc.
  out.inscribed_disc_radius = bisect_scale(
      [&](double r) {
        for (int i = 0; i < kRegionSamples; ++i) {
          double th = 2.0 * std::numbers::pi * i / kRegionSamples;
          if (!inside({-r + r * std::cos(th), r * std::sin(th)})) return false;
        }
        return true;
      },
      resolution);

  out.weno_bean_scale = bisect_scale(
      [&](double scale) {
        for (int i = 0; i < kRegionSamples; ++i) {
          double th = 2.0 * std::numbers::pi * i / kRegionSamples;
          if (!inside(scale * weno_bean_point(th))) return false;
        }
        return true;
      },
      resolution);

  return out;
}

namespace {

// Gauss-Jordan inverse for the small augmented monotonicity array (s+1 <= 8).
bool invert_in_place(std::vector<double>& m, int n) {
  std::vector<double> inv(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * n + i] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[static_cast<size_t>(r) * n + col]) >
          std::abs(m[static_cast<size_t>(piv) * n + col]))
        piv = r;
    if (std::abs(m[static_cast<size_t>(piv) * n + col]) < 1e-300) return false;
    if (piv != col)
      for (int k = 0; k < n; ++k) {
        std::swap(m[static_cast<size_t>(piv) * n + k], m[static_cast<size_t>(col) * n + k]);
        std::swap(inv[static_cast<size_t>(piv) * n + k], inv[static_cast<size_t>(col) * n + k]);
      }
    double d = m[static_cast<size_t>(col) * n + col];
    for (int k = 0; k < n; ++k) {
      m[static_cast<size_t>(col) * n + k] /= d;
      inv[static_cast<size_t>(col) * n + k] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = m[static_cast<size_t>(r) * n + col];
      if (f == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        m[static_cast<size_t>(r) * n + k] -= f * m[static_cast<size_t>(col) * n + k];
        inv[static_cast<size_t>(r) * n + k] -= f * inv[static_cast<size_t>(col) * n + k];
      }
    }
  }
  m = std::move(inv);
  return true;
}

}  // namespace

double ssp_coefficient(const EmbeddedTableau& tab, const std::string& weight_label,
                       double tolerance) {
  const auto& w = tab.weight_set(weight_label);
  const int s = tab.stages();

  // Keep only stages that influence the output under these weights.
  std::vector<bool> keep(s, false);
  for (int j = 0; j < s; ++j) keep[j] = w.b[j] != 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j < s; ++j) {
      if (!keep[j]) continue;
      for (int k = 0; k < j; ++k)
        if (tab.a(j, k) != 0.0 && !keep[k]) {
          keep[k] = true;
          changed = true;
        }
    }
  }
  std::vector<int> idx;
  for (int j = 0; j < s; ++j)
    if (keep[j]) idx.push_back(j);
  if (idx.empty()) return 0.0;

  const int n = static_cast<int>(idx.size()) + 1;
  std::vector<double> K(static_cast<size_t>(n) * n, 0.0);
  for (int j = 0; j < n - 1; ++j)
    for (int k = 0; k < n - 1; ++k) K[static_cast<size_t>(j) * n + k] = tab.a(idx[j], idx[k]);
  for (int k = 0; k < n - 1; ++k) K[static_cast<size_t>(n - 1) * n + k] = w.b[idx[k]];

  const double entry_tol = 1e-12;  // absorbs roundoff in the inversion
  auto feasible = [&](double r) {
    std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<size_t>(i) * n + i] = 1.0;
    for (size_t i = 0; i < m.size(); ++i) m[i] += r * K[i];
    if (!invert_in_place(m, n)) return false;
    // rows of K * (I + rK)^{-1}
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
          acc += K[static_cast<size_t>(i) * n + k] * m[static_cast<size_t>(k) * n + j];
        if (acc < -entry_tol) return false;
      }
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += m[static_cast<size_t>(i) * n + k];
      if (acc < -entry_tol || acc > 1.0 + entry_tol) return false;
    }
    return true;
  };

  if (!feasible(1e-14)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) return lo;
  }
  while (hi - lo > tolerance) {
    double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

std::string tableau_to_text(const EmbeddedTableau& tab) {
  std::ostringstream out;
  const int s = tab.stages();
  out << s << "\n";
  for (int j = 0; j < s; ++j) {
    for (int k = 0; k < s; ++k) out << (k ? " " : "") << fmt17(tab.a(j, k));
    out << "\n";
  }
  for (int k = 0; k < s; ++k) out << (k ? " " : "") << fmt17(tab.c()[k]);
  out << "\n";
  for (const auto& w : tab.weight_sets()) {
    out << w.label << " " << w.declared_order;
    for (double v : w.b) out << " " << fmt17(v);
    out << "\n";
  }
  return out.str();
}

EmbeddedTableau tableau_from_text(const std::string& text) {
  std::istringstream in(text);
  int s = 0;
  if (!(in >> s) || s < 1) throw ValidationError("tableau text: bad stage count");
  std::vector<std::vector<double>> a(s, std::vector<double>(s, 0.0));
  for (int j = 0; j < s; ++j)
    for (int k = 0; k < s; ++k)
      if (!(in >> a[j][k])) throw ValidationError("tableau text: truncated A matrix");
  std::vector<double> c(s, 0.0);
  for (int k = 0; k < s; ++k)
    if (!(in >> c[k])) throw ValidationError("tableau text: truncated c row");
  std::vector<WeightSet> sets;
  std::string label;
  while (in >> label) {
    WeightSet w;
    w.label = label;
    if (!(in >> w.declared_order)) throw ValidationError("tableau text: missing weight order");
    w.b.resize(s);
    for (int k = 0; k < s; ++k)
      if (!(in >> w.b[k])) throw ValidationError("tableau text: truncated weight set");
    sets.push_back(std::move(w));
  }
  if (sets.empty()) throw ValidationError("tableau text: no weight sets");
  return EmbeddedTableau(a, c, sets);
}

void save_tableau(const EmbeddedTableau& tab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write tableau file: " + path);
  out << tableau_to_text(tab);
}

EmbeddedTableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot read tableau file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return tableau_from_text(buf.str());
}

EmbeddedTableau resolve_tableau(const std::string& name_or_path) {
  for (const auto& n : builtin_pair_names())
    if (n == name_or_path) return builtin_pair(name_or_path);
  return load_tableau(name_or_path);
}

}  // namespace sperk
