#pragma once

// Run configuration for the command-line front end.  A run is described by a
// single JSON file with up to seven blocks:
//
//   potential  which pair potential, and its parameters
//   thermo     inverse temperature, dimension, and the drive (activity or density)
//   quad       quadrature tolerances and the Monte Carlo seed
//   mayer      series order and the tabulation grid
//   hclimit    sharpness sequence and separation grid for the limit sweep
//   residuals  which certification suites to run, and their knobs
//   output     optional file destinations for secondary artifacts
//
// Parsing is strict: unknown keys anywhere are rejected, and every physical
// parameter must be positive.  Violations raise ConfigError, which the front
// end maps to exit code 2 (usage / configuration error).

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ksgas/potential.hpp"
#include "ksgas/quadrature.hpp"

namespace ksgas::cli {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail_cfg {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

inline void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a JSON object");
}

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  require_object(j, where);
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(where, "unknown key '" + item.key() + "'");
  }
}

inline double get_number(const json& j, const std::string& where, const char* key, double dflt,
                         bool positive) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number()) fail(where, std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (positive && !(x > 0)) fail(where, std::string("'") + key + "' must be positive");
  return x;
}

inline int get_int(const json& j, const std::string& where, const char* key, int dflt, int lo,
                   int hi) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(where, std::string("'") + key + "' must be an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi)
    fail(where, std::string("'") + key + "' must lie in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  return static_cast<int>(x);
}

inline std::string get_string(const json& j, const std::string& where, const char* key,
                              const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_string()) fail(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail_cfg

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

// The drive fixes the thermodynamic control parameter of a run: either the
// activity z directly, or the one-point density, which each command converts
// to an activity through the appropriate inversion.
struct DriveSpec {
  bool is_density = false;
  double value = 0.05;
};

struct GridSpec {
  double x_min = 1.05;
  double x_max = 3.0;
  int points = 5;

  std::vector<double> values() const {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
      xs.push_back(x_min);
      return xs;
    }
    const double step = (x_max - x_min) / (points - 1);
    for (int i = 0; i < points; ++i) xs.push_back(x_min + step * i);
    return xs;
  }
};

struct MayerBlock {
  int order = 3;  // series truncation P: powers z^{p+1}, p <= P
  int n = 2;      // correlation order tabulated / certified
  GridSpec grid;
};

struct HclimitBlock {
  std::vector<double> epsilons{0.2, 0.1, 0.05};  // strictly decreasing sharpness sequence
  GridSpec grid{1.05, 3.0, 8};
};

struct ResidualsBlock {
  std::vector<std::string> suite;  // empty => defaults chosen by potential kind
  bool suite_given = false;        // distinguishes "absent" from "explicitly empty"
  int m_max = 2;                   // insertion terms in the one-sided equations
  double fd_step = 1e-4;           // central-difference step for the hierarchy
  double z_scale = 1.0;            // deliberate activity corruption for self-tests
  int draws = 5;                   // random anchor / momentum draws per stochastic suite
};

struct OutputBlock {
  std::string summary;  // path for the sweep summary JSON; empty => stderr
};

struct RunConfig {
  PotentialKind kind = PotentialKind::soft_core;
  double diameter = 1.0;
  double sharpness = 0.05;
  double amplitude = 1.0;
  double width = 1.0;

  ThermoState thermo{1.0, 1};
  DriveSpec drive;
  QuadSpec quad;
  MayerBlock mayer;
  HclimitBlock hclimit;
  ResidualsBlock residuals;
  OutputBlock output;

  PairPotential make_potential() const {
    switch (kind) {
      case PotentialKind::ideal: return PairPotential::ideal();
      case PotentialKind::gaussian_bump: return PairPotential::gaussian_bump(amplitude, width);
      case PotentialKind::soft_core: return PairPotential::soft_core(diameter, sharpness);
      case PotentialKind::hard_rod: return PairPotential::hard_rod(diameter);
    }
    throw ConfigError("config: potential: unreachable kind");
  }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail_cfg {

inline void parse_potential(const json& j, RunConfig& cfg) {
  const std::string where = "potential";
  const std::string kind = get_string(j, where, "kind", "");
  if (kind == "ideal") {
    check_keys(j, where, {"kind"});
    cfg.kind = PotentialKind::ideal;
  } else if (kind == "gaussian_bump") {
    check_keys(j, where, {"kind", "amplitude", "width"});
    cfg.kind = PotentialKind::gaussian_bump;
    cfg.amplitude = get_number(j, where, "amplitude", 1.0, true);
    cfg.width = get_number(j, where, "width", 1.0, true);
  } else if (kind == "soft_core") {
    check_keys(j, where, {"kind", "diameter", "sharpness"});
    cfg.kind = PotentialKind::soft_core;
    cfg.diameter = get_number(j, where, "diameter", 1.0, true);
    cfg.sharpness = get_number(j, where, "sharpness", 0.05, true);
  } else if (kind == "hard_rod") {
    check_keys(j, where, {"kind", "diameter"});
    cfg.kind = PotentialKind::hard_rod;
    cfg.diameter = get_number(j, where, "diameter", 1.0, true);
  } else {
    fail(where, "'kind' must be one of ideal, gaussian_bump, soft_core, hard_rod");
  }
}

inline void parse_drive(const json& j, RunConfig& cfg) {
  const std::string where = "thermo.drive";
  check_keys(j, where, {"kind", "value"});
  const std::string kind = get_string(j, where, "kind", "activity");
  if (kind == "activity")
    cfg.drive.is_density = false;
  else if (kind == "density")
    cfg.drive.is_density = true;
  else
    fail(where, "'kind' must be 'activity' or 'density'");
  cfg.drive.value = get_number(j, where, "value", cfg.drive.value, true);
}

inline void parse_thermo(const json& j, RunConfig& cfg) {
  const std::string where = "thermo";
  check_keys(j, where, {"beta", "nu", "drive"});
  cfg.thermo.beta = get_number(j, where, "beta", cfg.thermo.beta, true);
  cfg.thermo.nu = get_int(j, where, "nu", cfg.thermo.nu, 1, 3);
  if (j.contains("drive")) parse_drive(j.at("drive"), cfg);
}

inline void parse_quad(const json& j, RunConfig& cfg) {
  const std::string where = "quad";
  check_keys(j, where, {"abs_tol", "rel_tol", "max_depth", "max_level", "max_evals", "seed"});
  cfg.quad.abs_tol = get_number(j, where, "abs_tol", cfg.quad.abs_tol, true);
  cfg.quad.rel_tol = get_number(j, where, "rel_tol", cfg.quad.rel_tol, true);
  cfg.quad.max_depth = get_int(j, where, "max_depth", cfg.quad.max_depth, 1, 40);
  cfg.quad.max_level = get_int(j, where, "max_level", cfg.quad.max_level, 1, 20);
  if (j.contains("max_evals")) {
    const json& v = j.at("max_evals");
    if (!v.is_number_integer() || v.get<long long>() <= 0)
      fail(where, "'max_evals' must be a positive integer");
    cfg.quad.max_evals = v.get<std::int64_t>();
  }
  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      fail(where, "'seed' must be a nonnegative integer");
    const long long s = v.get<long long>();
    if (s < 0) fail(where, "'seed' must be a nonnegative integer");
    cfg.quad.seed = static_cast<std::uint64_t>(s);
  }
}

inline GridSpec parse_grid(const json& j, const std::string& where, const GridSpec& dflt) {
  check_keys(j, where, {"x_min", "x_max", "points"});
  GridSpec g = dflt;
  g.x_min = get_number(j, where, "x_min", g.x_min, true);
  g.x_max = get_number(j, where, "x_max", g.x_max, true);
  g.points = get_int(j, where, "points", g.points, 1, 10000);
  if (!(g.x_max >= g.x_min)) fail(where, "'x_max' must be >= 'x_min'");
  return g;
}

inline void parse_mayer(const json& j, RunConfig& cfg) {
  const std::string where = "mayer";
  check_keys(j, where, {"order", "n", "grid"});
  cfg.mayer.order = get_int(j, where, "order", cfg.mayer.order, 0, 8);
  cfg.mayer.n = get_int(j, where, "n", cfg.mayer.n, 1, 4);
  if (j.contains("grid")) cfg.mayer.grid = parse_grid(j.at("grid"), "mayer.grid", cfg.mayer.grid);
}

inline void parse_hclimit(const json& j, RunConfig& cfg) {
  const std::string where = "hclimit";
  check_keys(j, where, {"epsilons", "grid"});
  if (j.contains("epsilons")) {
    const json& v = j.at("epsilons");
    if (!v.is_array()) fail(where, "'epsilons' must be an array of positive numbers");
    cfg.hclimit.epsilons.clear();
    for (const auto& e : v) {
      if (!e.is_number() || !(e.get<double>() > 0))
        fail(where, "'epsilons' must be an array of positive numbers");
      cfg.hclimit.epsilons.push_back(e.get<double>());
    }
  }
  if (j.contains("grid"))
    cfg.hclimit.grid = parse_grid(j.at("grid"), "hclimit.grid", cfg.hclimit.grid);
}

inline void parse_residuals(const json& j, RunConfig& cfg) {
  const std::string where = "residuals";
  check_keys(j, where, {"suite", "m_max", "fd_step", "z_scale", "draws"});
  if (j.contains("suite")) {
    const json& v = j.at("suite");
    if (!v.is_array()) fail(where, "'suite' must be an array of suite names");
    cfg.residuals.suite_given = true;
    for (const auto& s : v) {
      if (!s.is_string()) fail(where, "'suite' must be an array of suite names");
      cfg.residuals.suite.push_back(s.get<std::string>());
    }
  }
  cfg.residuals.m_max = get_int(j, where, "m_max", cfg.residuals.m_max, 0, 6);
  cfg.residuals.fd_step = get_number(j, where, "fd_step", cfg.residuals.fd_step, true);
  cfg.residuals.z_scale = get_number(j, where, "z_scale", cfg.residuals.z_scale, true);
  cfg.residuals.draws = get_int(j, where, "draws", cfg.residuals.draws, 0, 1000);
}

inline void parse_output(const json& j, RunConfig& cfg) {
  const std::string where = "output";
  check_keys(j, where, {"summary"});
  cfg.output.summary = get_string(j, where, "summary", cfg.output.summary);
}

}  // namespace detail_cfg

inline RunConfig parse_config(const json& j) {
  using namespace detail_cfg;
  check_keys(j, "top level",
             {"potential", "thermo", "quad", "mayer", "hclimit", "residuals", "output"});
  if (!j.contains("potential")) fail("top level", "missing required block 'potential'");

  RunConfig cfg;
  parse_potential(j.at("potential"), cfg);
  if (j.contains("thermo")) parse_thermo(j.at("thermo"), cfg);
  if (j.contains("quad")) parse_quad(j.at("quad"), cfg);
  if (j.contains("mayer")) parse_mayer(j.at("mayer"), cfg);
  if (j.contains("hclimit")) parse_hclimit(j.at("hclimit"), cfg);
  if (j.contains("residuals")) parse_residuals(j.at("residuals"), cfg);
  if (j.contains("output")) parse_output(j.at("output"), cfg);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace ksgas::cli
