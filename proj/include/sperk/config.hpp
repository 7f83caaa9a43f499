#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sperk/error.hpp"

namespace sperk {

// Fully resolved run configuration; every field carries its default so the
// effective configuration can be echoed verbatim into provenance.
struct RunConfig {
  std::string experiment = "run";  // run|convergence|tv_scan|dt_scan|shock_speed|shu_osher
  std::string problem = "burgers_smooth";
  std::string tableau = "pair75_53";
  std::string mode = "single";
  std::string mask = "constant(1)";
  std::vector<std::string> labels;      // empty: all weight sets (first only for single mode)
  std::vector<int> n_list = {400};
  std::vector<double> cfl_list = {1.2};
  std::vector<double> dt_list;          // dt_scan sweeps; single entry = fixed dt elsewhere
  double t_final = 0.5;
  double epsilon = 1e-6;
  double kappa = 0.5;
  double advection_speed = 1.0;
  std::string spatial = "weno";         // advection problem: weno|upwind
  double c_threshold = 500.0;
  double theta = 0.06;
  int widen = 4;
  std::uint64_t seed = 42;
  double level = 1.0;                   // shock-tracking level
  int frame_stride = 10;
  int reference_n = 0;                  // shu_osher reference grid (0 = skip)
  int jobs = 1;
  std::string out_dir = ".";
  std::string out_name;                 // overrides the timestamped base name

  nlohmann::json to_json() const;
};

// Parses the line-oriented "key = value" format with optional [section]
// headers and '#' comments.  Unknown keys and sections, unresolvable names,
// and non-positive numeric parameters raise ParseError with the line number.
// Experiment-specific defaults (t_final, n, epsilon, ...) are applied for
// keys the text does not set.
RunConfig parse_config(const std::string& text);

// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const RunConfig& c);

}  // namespace sperk
