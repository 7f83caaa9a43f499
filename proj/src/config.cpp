#include "sperk/config.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "sperk/integrators.hpp"
#include "sperk/mask.hpp"
#include "sperk/problem.hpp"
#include "sperk/tableau.hpp"

namespace sperk {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_sections() {
  static const std::set<std::string> s = {"run", "problem", "numerics", "mask", "output"};
  return s;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> s = {
      "experiment", "problem", "tableau",   "mode",        "mask",        "labels",
      "n",          "cfl",     "dt",        "t_final",     "epsilon",     "kappa",
      "advection_speed",       "spatial",   "c_threshold", "theta",       "widen",
      "seed",       "level",   "frame_stride",             "reference_n", "jobs",
      "out_dir",    "out_name"};
  return s;
}

double parse_double(const std::string& v, int line, const std::string& key) {
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "bad numeric value '" + v + "' for " + key);
  }
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  try {
    size_t pos = 0;
    long long out = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw ParseError(line, "bad integer value '" + v + "' for " + key);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, bool> seen;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      const std::string section = strip(line.substr(1, line.size() - 2));
      if (!known_sections().count(section))
        throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (!known_keys().count(key)) throw ParseError(line_no, "unknown key '" + key + "'");
    if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");
    if (seen[key]) throw ParseError(line_no, "duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "experiment") {
      std::string v = value;
      std::replace(v.begin(), v.end(), '-', '_');
      static const std::set<std::string> kinds = {"run",     "convergence", "tv_scan",
                                                  "dt_scan", "shock_speed", "shu_osher"};
      if (!kinds.count(v)) throw ParseError(line_no, "unknown experiment '" + value + "'");
      cfg.experiment = v;
    } else if (key == "problem") {
      const auto names = problem_aliases();
      if (std::find(names.begin(), names.end(), value) == names.end())
        throw ParseError(line_no, "unknown problem '" + value + "'");
      cfg.problem = value;
    } else if (key == "tableau") {
      cfg.tableau = value;
    } else if (key == "mode") {
      try {
        step_mode_from_string(value);
      } catch (const LookupError& e) {
        throw ParseError(line_no, e.what());
      }
      cfg.mode = value;
    } else if (key == "mask") {
      try {
        MaskStrategy::parse(value);
      } catch (const Error& e) {
        throw ParseError(line_no, e.what());
      }
      cfg.mask = value;
    } else if (key == "labels") {
      cfg.labels = split_list(value);
      if (cfg.labels.empty()) throw ParseError(line_no, "labels list is empty");
    } else if (key == "n") {
      cfg.n_list.clear();
      for (const auto& item : split_list(value)) {
        long long n = parse_int(item, line_no, key);
        if (n < 5) throw ParseError(line_no, "grid size must be >= 5, got " + item);
        cfg.n_list.push_back(static_cast<int>(n));
      }
      if (cfg.n_list.empty()) throw ParseError(line_no, "n list is empty");
    } else if (key == "cfl") {
      cfg.cfl_list.clear();
      for (const auto& item : split_list(value)) {
        double c = parse_double(item, line_no, key);
        if (!(c > 0.0)) throw ParseError(line_no, "cfl must be positive, got " + item);
        cfg.cfl_list.push_back(c);
      }
      if (cfg.cfl_list.empty()) throw ParseError(line_no, "cfl list is empty");
    } else if (key == "dt") {
      cfg.dt_list.clear();
      for (const auto& item : split_list(value)) {
        double d = parse_double(item, line_no, key);
        if (!(d > 0.0)) throw ParseError(line_no, "dt must be positive, got " + item);
        cfg.dt_list.push_back(d);
      }
    } else if (key == "t_final") {
      cfg.t_final = parse_double(value, line_no, key);
      if (cfg.t_final < 0.0) throw ParseError(line_no, "t_final must be >= 0");
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, line_no, key);
      if (!(cfg.epsilon > 0.0)) throw ParseError(line_no, "epsilon must be positive");
    } else if (key == "kappa") {
      cfg.kappa = parse_double(value, line_no, key);
    } else if (key == "advection_speed") {
      cfg.advection_speed = parse_double(value, line_no, key);
      if (!(cfg.advection_speed > 0.0))
        throw ParseError(line_no, "advection_speed must be positive");
    } else if (key == "spatial") {
      if (value != "weno" && value != "upwind")
        throw ParseError(line_no, "spatial must be weno or upwind");
      cfg.spatial = value;
    } else if (key == "c_threshold") {
      cfg.c_threshold = parse_double(value, line_no, key);
      if (!(cfg.c_threshold > 0.0)) throw ParseError(line_no, "c_threshold must be positive");
    } else if (key == "theta") {
      cfg.theta = parse_double(value, line_no, key);
      if (!(cfg.theta > 0.0)) throw ParseError(line_no, "theta must be positive");
    } else if (key == "widen") {
      long long w = parse_int(value, line_no, key);
      if (w < 0) throw ParseError(line_no, "widen must be >= 0");
      cfg.widen = static_cast<int>(w);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, line_no, key));
    } else if (key == "level") {
      cfg.level = parse_double(value, line_no, key);
    } else if (key == "frame_stride") {
      long long f = parse_int(value, line_no, key);
      if (f < 0) throw ParseError(line_no, "frame_stride must be >= 0");
      cfg.frame_stride = static_cast<int>(f);
    } else if (key == "reference_n") {
      long long r = parse_int(value, line_no, key);
      if (r < 0) throw ParseError(line_no, "reference_n must be >= 0");
      cfg.reference_n = static_cast<int>(r);
    } else if (key == "jobs") {
      long long j = parse_int(value, line_no, key);
      if (j < 1) throw ParseError(line_no, "jobs must be >= 1");
      cfg.jobs = static_cast<int>(j);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "out_name") {
      cfg.out_name = value;
    }
  }

  // Validate cross-field references early.
  try {
    resolve_tableau(cfg.tableau);
  } catch (const Error& e) {
    throw ParseError(0, e.what());
  }

  // Experiment defaults for keys the text did not set.
  auto defaulted = [&seen](const std::string& key) { return !seen.count(key) || !seen[key]; };
  if (cfg.experiment == "convergence") {
    if (defaulted("problem")) cfg.problem = "burgers_smooth";
    if (defaulted("t_final")) cfg.t_final = 0.25;
    if (defaulted("n")) cfg.n_list = {320, 640, 1280};
  } else if (cfg.experiment == "tv_scan") {
    if (defaulted("problem")) cfg.problem = "burgers_square";
    if (defaulted("t_final")) cfg.t_final = 0.5;
    if (defaulted("n")) cfg.n_list = {40};
    if (defaulted("epsilon")) cfg.epsilon = 1e-30;
    if (defaulted("cfl")) cfg.cfl_list = {0.6, 0.8, 1.0, 1.2, 1.4, 1.6};
  } else if (cfg.experiment == "dt_scan") {
    if (defaulted("problem")) cfg.problem = "advdiff";
    if (defaulted("tableau")) cfg.tableau = "pair32";
    if (defaulted("t_final")) cfg.t_final = 0.1;
    if (defaulted("n")) cfg.n_list = {250};
    if (defaulted("dt")) cfg.dt_list = {1.0e-5, 1.45e-5, 1.6e-5, 1.93e-5, 2.1e-5, 3.0e-5};
  } else if (cfg.experiment == "shock_speed") {
    if (defaulted("problem")) cfg.problem = "burgers_step2";
    if (defaulted("t_final")) cfg.t_final = 0.5;
    if (defaulted("n")) cfg.n_list = {800};
    if (defaulted("mask")) cfg.mask = "value_window(0.01,1.99)";
  } else if (cfg.experiment == "shu_osher") {
    if (defaulted("problem")) cfg.problem = "euler_shu_osher";
    if (defaulted("t_final")) cfg.t_final = 1.8;
    if (defaulted("n")) cfg.n_list = {400};
    if (defaulted("mode")) cfg.mode = "equation";
    if (defaulted("mask"))
      cfg.mask = "second_diff(" + fmt17(cfg.c_threshold) + ") | widen(" +
                 std::to_string(cfg.widen) + ")";
  }
  return cfg;
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[run]\n";
  out << "experiment = " << c.experiment << "\n";
  out << "problem = " << c.problem << "\n";
  out << "tableau = " << c.tableau << "\n";
  out << "mode = " << c.mode << "\n";
  out << "mask = " << c.mask << "\n";
  if (!c.labels.empty()) {
    out << "labels = ";
    for (size_t i = 0; i < c.labels.size(); ++i) out << (i ? ", " : "") << c.labels[i];
    out << "\n";
  }
  out << "[numerics]\n";
  out << "n = ";
  for (size_t i = 0; i < c.n_list.size(); ++i) out << (i ? ", " : "") << c.n_list[i];
  out << "\n";
  out << "cfl = ";
  for (size_t i = 0; i < c.cfl_list.size(); ++i) out << (i ? ", " : "") << fmt17(c.cfl_list[i]);
  out << "\n";
  if (!c.dt_list.empty()) {
    out << "dt = ";
    for (size_t i = 0; i < c.dt_list.size(); ++i) out << (i ? ", " : "") << fmt17(c.dt_list[i]);
    out << "\n";
  }
  out << "t_final = " << fmt17(c.t_final) << "\n";
  out << "epsilon = " << fmt17(c.epsilon) << "\n";
  out << "kappa = " << fmt17(c.kappa) << "\n";
  out << "advection_speed = " << fmt17(c.advection_speed) << "\n";
  out << "spatial = " << c.spatial << "\n";
  out << "c_threshold = " << fmt17(c.c_threshold) << "\n";
  out << "theta = " << fmt17(c.theta) << "\n";
  out << "widen = " << c.widen << "\n";
  out << "seed = " << c.seed << "\n";
  out << "level = " << fmt17(c.level) << "\n";
  out << "frame_stride = " << c.frame_stride << "\n";
  out << "reference_n = " << c.reference_n << "\n";
  out << "jobs = " << c.jobs << "\n";
  out << "[output]\n";
  out << "out_dir = " << c.out_dir << "\n";
  if (!c.out_name.empty()) out << "out_name = " << c.out_name << "\n";
  return out.str();
}

nlohmann::json RunConfig::to_json() const {
  return {
      {"experiment", experiment},
      {"problem", problem},
      {"tableau", tableau},
      {"mode", mode},
      {"mask", mask},
      {"labels", labels},
      {"n", n_list},
      {"cfl", cfl_list},
      {"dt", dt_list},
      {"t_final", t_final},
      {"epsilon", epsilon},
      {"kappa", kappa},
      {"advection_speed", advection_speed},
      {"spatial", spatial},
      {"c_threshold", c_threshold},
      {"theta", theta},
      {"widen", widen},
      {"seed", seed},
      {"level", level},
      {"frame_stride", frame_stride},
      {"reference_n", reference_n},
      {"jobs", jobs},
      {"out_dir", out_dir},
      {"out_name", out_name},
  };
}

}  // namespace sperk
