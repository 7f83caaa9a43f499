#include "sperk/mask.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sperk/problem.hpp"

namespace sperk {

bool Mask::is_binary() const {
  for (double v : values)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

void Mask::validate() const {
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("mask value outside [0,1]: " + std::to_string(v));
}

double Mask::mean() const {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / values.size();
}

double Mask::fraction_at_one() const {
  if (values.empty()) return 0.0;
  int count = 0;
  for (double v : values)
    if (v == 1.0) ++count;
  return static_cast<double>(count) / values.size();
}

Mask mask_second_difference(const GridField& state, double c_threshold, double dx) {
  if (!(c_threshold > 0.0)) throw ValidationError("second-difference mask needs C > 0");
  Mask mask{MaskLocation::node, std::vector<double>(state.n, 0.0)};
  const double bound = c_threshold * dx * dx;
  for (int i = 0; i < state.n; ++i) {
    const double d2 = state.at(state.ghost_index(i + 1)) - 2.0 * state.at(i) +
                      state.at(state.ghost_index(i - 1));
    mask.values[i] = std::abs(d2) < bound ? 1.0 : 0.0;
  }
  return mask;
}

Mask mask_from_weno_weights(const InterfaceFluxes& fluxes, double threshold) {
  if (!fluxes.has_weno_weights())
    throw ValidationError("interface fluxes carry no WENO weights");
  for (int j = 0; j <= fluxes.n; ++j) {
    const double sum = fluxes.weight(j, 0) + fluxes.weight(j, 1) + fluxes.weight(j, 2);
    if (std::abs(sum - 1.0) > 1e-10)
      throw ValidationError("WENO weight row " + std::to_string(j) + " sums to " +
                            std::to_string(sum));
  }
  Mask mask{MaskLocation::node, std::vector<double>(fluxes.n, 0.0)};
  for (int i = 0; i < fluxes.n; ++i) {
    const int j = i + 1;  // interface whose positive-flux stencil is centered on node i
    const bool smooth = std::abs(fluxes.weight(j, 0) - 0.1) <= threshold &&
                        std::abs(fluxes.weight(j, 1) - 0.6) <= threshold &&
                        std::abs(fluxes.weight(j, 2) - 0.3) <= threshold;
    mask.values[i] = smooth ? 1.0 : 0.0;
  }
  return mask;
}

Mask mask_value_window(const GridField& state, double lo, double hi) {
  if (!(lo < hi)) throw ValidationError("value window needs lo < hi");
  Mask mask{MaskLocation::node, std::vector<double>(state.n, 0.0)};
  for (int i = 0; i < state.n; ++i) {
    const double u = state.at(i);
    mask.values[i] = (lo < u && u < hi) ? 0.0 : 1.0;
  }
  return mask;
}

Mask mask_coefficient_threshold(const std::function<double(double)>& a_fn, const GridField& grid,
                                double cutoff) {
  Mask mask{MaskLocation::node, std::vector<double>(grid.n, 0.0)};
  for (int i = 0; i < grid.n; ++i) mask.values[i] = a_fn(grid.node_x(i)) > cutoff ? 1.0 : 0.0;
  return mask;
}

namespace {

int wrap_or_clamp(int i, int n, Boundary boundary) {
  if (i >= 0 && i < n) return i;
  if (boundary == Boundary::periodic) {
    int r = i % n;
    return r < 0 ? r + n : r;
  }
  return i < 0 ? 0 : n - 1;
}

}  // namespace

Mask widen_mask(const Mask& mask, int radius, Boundary boundary) {
  if (radius < 0) throw ValidationError("widen radius must be >= 0");
  const int n = static_cast<int>(mask.values.size());
  Mask out = mask;
  for (int i = 0; i < n; ++i) {
    double v = mask.values[i];
    for (int j = -radius; j <= radius; ++j)
      v = std::min(v, mask.values[wrap_or_clamp(i + j, n, boundary)]);
    out.values[i] = v;
  }
  return out;
}

Mask node_to_interface(const Mask& mask, Boundary boundary) {
  if (mask.location != MaskLocation::node)
    throw ValidationError("node_to_interface expects a node-located mask");
  const int n = static_cast<int>(mask.values.size());
  Mask out{MaskLocation::interface, std::vector<double>(n + 1, 0.0)};
  for (int j = 0; j <= n; ++j) {
    const double left = mask.values[wrap_or_clamp(j - 1, n, boundary)];
    const double right = mask.values[wrap_or_clamp(j, n, boundary)];
    out.values[j] = std::min(left, right);
  }
  return out;
}

namespace {

struct Call {
  std::string fn;
  std::vector<double> args;
};

Call parse_call(const std::string& text) {
  Call call;
  auto open = text.find('(');
  if (open == std::string::npos) {
    call.fn = text;
    return call;
  }
  auto close = text.rfind(')');
  if (close == std::string::npos || close < open)
    throw ValidationError("mask strategy: unbalanced parentheses in '" + text + "'");
  call.fn = text.substr(0, open);
  std::string inner = text.substr(open + 1, close - open - 1);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // allow name=value
    auto eq = item.find('=');
    std::string num = eq == std::string::npos ? item : item.substr(eq + 1);
    size_t pos = 0;
    double v;
    try {
      v = std::stod(num, &pos);
    } catch (const std::exception&) {
      throw ValidationError("mask strategy: bad argument '" + item + "' in '" + text + "'");
    }
    call.args.push_back(v);
  }
  return call;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

MaskStrategy::MaskStrategy() : source_("constant"), args_{1.0} {}

MaskStrategy MaskStrategy::parse(const std::string& text) {
  MaskStrategy out;
  out.name_ = text;
  out.source_.clear();
  out.args_.clear();

  std::stringstream ss(text);
  std::string stage;
  bool first = true;
  while (std::getline(ss, stage, '|')) {
    stage = strip(stage);
    if (stage.empty()) throw ValidationError("mask strategy: empty pipeline stage");
    Call call = parse_call(stage);
    if (first) {
      static const std::vector<std::string> sources = {
          "second_diff", "weno", "value_window", "coef_threshold", "constant", "heaviside",
          "random"};
      if (std::find(sources.begin(), sources.end(), call.fn) == sources.end())
        throw LookupError("unknown mask source '" + call.fn +
                          "' (valid: second_diff, weno, value_window, coef_threshold, constant, "
                          "heaviside, random)");
      out.source_ = call.fn;
      out.args_ = call.args;
      if (call.fn == "value_window" && call.args.size() != 2)
        throw ValidationError("value_window needs (lo, hi)");
      if (call.fn == "constant" && call.args.size() != 1)
        throw ValidationError("constant needs one value in [0,1]");
      if (call.fn == "random") {
        out.seed_ = call.args.empty() ? 42u : static_cast<std::uint64_t>(call.args[0]);
        out.rng_.seed(out.seed_);
      }
      first = false;
      continue;
    }
    if (call.fn == "widen") {
      out.widened_ = true;
      out.widen_radius_ = call.args.empty() ? 4 : static_cast<int>(call.args[0]);
      if (out.widen_radius_ < 0) throw ValidationError("widen radius must be >= 0");
    } else if (call.fn == "to_interface") {
      out.to_interface_ = true;
    } else {
      throw LookupError("unknown mask modifier '" + call.fn + "' (valid: widen, to_interface)");
    }
  }
  if (first) throw ValidationError("empty mask strategy");
  return out;
}

MaskStrategy MaskStrategy::with_interface_output() const {
  if (to_interface_) return *this;
  MaskStrategy out = *this;
  out.to_interface_ = true;
  out.name_ = name_ + " | to_interface";
  return out;
}

Mask MaskStrategy::evaluate(const Context& ctx) {
  if (ctx.state == nullptr) throw ValidationError("mask strategy needs a state");
  const GridField& state = *ctx.state;

  Mask mask;
  if (source_ == "constant") {
    const double v = args_.at(0);
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("constant mask value outside [0,1]");
    mask = Mask{MaskLocation::node, std::vector<double>(state.n, v)};
  } else if (source_ == "second_diff") {
    const double c = args_.empty() ? 500.0 : args_[0];
    mask = mask_second_difference(state, c, state.dx);
  } else if (source_ == "weno") {
    const double theta = args_.empty() ? 0.06 : args_[0];
    if (ctx.fluxes == nullptr || !ctx.fluxes->has_weno_weights())
      throw ValidationError("weno mask needs interface fluxes with recorded weights");
    mask = mask_from_weno_weights(*ctx.fluxes, theta);
  } else if (source_ == "value_window") {
    mask = mask_value_window(state, args_.at(0), args_.at(1));
  } else if (source_ == "coef_threshold") {
    if (ctx.problem == nullptr || !ctx.problem->a_fn)
      throw ValidationError("coef_threshold mask needs a problem with an a(x) coefficient");
    mask = mask_coefficient_threshold(ctx.problem->a_fn, state, args_.empty() ? 0.005 : args_[0]);
  } else if (source_ == "heaviside") {
    const double x0 = args_.empty() ? 0.0 : args_[0];
    mask = Mask{MaskLocation::node, std::vector<double>(state.n, 0.0)};
    for (int i = 0; i < state.n; ++i) mask.values[i] = state.node_x(i) >= x0 ? 1.0 : 0.0;
  } else if (source_ == "random") {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    mask = Mask{MaskLocation::node, std::vector<double>(state.n, 0.0)};
    for (int i = 0; i < state.n; ++i) mask.values[i] = dist(rng_);
  } else {
    throw LookupError("unknown mask source '" + source_ + "'");
  }

  if (widened_) mask = widen_mask(mask, widen_radius_, state.boundary);
  if (to_interface_) mask = node_to_interface(mask, state.boundary);
  mask.validate();
  return mask;
}

}  // namespace sperk
