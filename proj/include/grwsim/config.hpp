#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "grwsim/errors.hpp"
#include "grwsim/scenarios.hpp"

namespace grwsim {
namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ValidationError("config key '" + key + "' expects a number, got '" + v + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ValidationError("config key '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ValidationError("config key '" + key + "' expects an unsigned integer, got '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError("config key '" + key + "' expects true or false, got '" + v + "'");
}

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline MeasureOrder order_from_string(const std::string& s) {
  if (s == "individual" || s == "individual_first") return MeasureOrder::kIndividualFirst;
  if (s == "collective" || s == "collective_first") return MeasureOrder::kCollectiveFirst;
  throw ValidationError("order must be 'individual' or 'collective', got '" + s + "'");
}

/// Apply one `section.key = value` setting onto a config in place.
/// Unknown keys are validation errors so typos never pass silently.
inline void apply_config_entry(ScenarioConfig& cfg, const std::string& section,
                               const std::string& key, const std::string& value) {
  using namespace detail;
  const std::string full = section.empty() ? key : section + "." + key;
  if (section == "scenario") {
    if (key == "n") cfg.n_marbles = static_cast<int>(parse_int(full, value));
    else if (key == "a_sq") cfg.a_sq = parse_double(full, value);
    else if (key == "trials") cfg.trials = static_cast<int>(parse_int(full, value));
    else if (key == "seed") cfg.seed = parse_u64(full, value);
    else if (key == "duration") cfg.duration = parse_double(full, value);
    else if (key == "order") cfg.order = order_from_string(value);
    else if (key == "observer") cfg.include_observer = parse_bool(full, value);
    else if (key == "stop_after_collapse") cfg.stop_after_collapse = parse_bool(full, value);
    else if (key == "dense_limit") cfg.dense_limit = static_cast<int>(parse_int(full, value));
    else throw ValidationError("unknown config key '" + full + "'");
  } else if (section == "fuzzy") {
    if (key == "p") cfg.fuzzy.p = parse_double(full, value);
    else if (key == "p_all") cfg.fuzzy.p_all = parse_double(full, value);
    else throw ValidationError("unknown config key '" + full + "'");
  } else if (section == "grw") {
    if (key == "lambda") cfg.grw.lambda_hit = parse_double(full, value);
    else if (key == "sigma") cfg.grw.sigma_jump = parse_double(full, value);
    else if (key == "particles") cfg.grw.particles_per_marble = parse_double(full, value);
    else if (key == "epsilon") cfg.grw.epsilon_leak = parse_double(full, value);
    else if (key == "eta") cfg.grw.eta_collapse = parse_double(full, value);
    else if (key == "width_convention") {
      if (value == "stddev") cfg.grw.width_convention = WidthConvention::kStdDev;
      else if (value == "fwhm") cfg.grw.width_convention = WidthConvention::kFwhm;
      else throw ValidationError("grw.width_convention must be 'stddev' or 'fwhm'");
    } else if (key == "leakage_corrected") {
      cfg.grw.leakage_corrected_sampling = parse_bool(full, value);
    } else if (key == "separation") {
      // geometric leakage from the region separation, clamped at the floor
      cfg.grw.epsilon_leak =
          GrwParams::derived_epsilon(parse_double(full, value), cfg.grw.sigma_jump);
    } else {
      throw ValidationError("unknown config key '" + full + "'");
    }
  } else if (section == "lattice") {
    if (key == "points") cfg.lattice.points = static_cast<int>(parse_int(full, value));
    else if (key == "dx") cfg.lattice.dx = parse_double(full, value);
    else if (key == "origin") cfg.lattice.origin = parse_double(full, value);
    else if (key == "mean") cfg.lattice.mean = parse_double(full, value);
    else if (key == "sigma_psi") cfg.lattice.sigma_psi = parse_double(full, value);
    else if (key == "sigma_jump") cfg.lattice.sigma_jump = parse_double(full, value);
    else if (key == "hits") cfg.lattice.hits = static_cast<int>(parse_int(full, value));
    else if (key == "dt") cfg.lattice.dt = parse_double(full, value);
    else if (key == "steps") cfg.lattice.steps = static_cast<int>(parse_int(full, value));
    else if (key == "mass") cfg.lattice.mass = parse_double(full, value);
    else if (key == "hbar") cfg.lattice.hbar = parse_double(full, value);
    else throw ValidationError("unknown config key '" + full + "'");
  } else {
    throw ValidationError("unknown config section '" + section + "'");
  }
}

/// Parse the flat sectioned key-value format onto `base`. Later entries
/// win; '#' and ';' start comments.
inline ScenarioConfig parse_config_text(const std::string& text,
                                        ScenarioConfig base = ScenarioConfig{}) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config line " + std::to_string(lineno) + ": unterminated section");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    apply_config_entry(base, section, key, value);
  }
  return base;
}

inline ScenarioConfig parse_config_file(const std::string& path,
                                        ScenarioConfig base = ScenarioConfig{}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

/// Emit a config as the same sectioned text parse_config_text reads.
/// Doubles print with 17 significant digits, so parse(emit(cfg)) == cfg.
inline std::string write_config_ini(const ScenarioConfig& cfg) {
  using detail::format_double;
  std::string out;
  out += "[scenario]\n";
  out += "n = " + std::to_string(cfg.n_marbles) + "\n";
  out += "a_sq = " + format_double(cfg.a_sq) + "\n";
  out += "trials = " + std::to_string(cfg.trials) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "duration = " + format_double(cfg.duration) + "\n";
  out += std::string("order = ") + order_name(cfg.order) + "\n";
  out += std::string("observer = ") + (cfg.include_observer ? "true" : "false") + "\n";
  out += std::string("stop_after_collapse = ") + (cfg.stop_after_collapse ? "true" : "false") + "\n";
  out += "dense_limit = " + std::to_string(cfg.dense_limit) + "\n";
  out += "\n[fuzzy]\n";
  out += "p = " + format_double(cfg.fuzzy.p) + "\n";
  if (cfg.fuzzy.p_all) out += "p_all = " + format_double(*cfg.fuzzy.p_all) + "\n";
  out += "\n[grw]\n";
  out += "lambda = " + format_double(cfg.grw.lambda_hit) + "\n";
  out += "sigma = " + format_double(cfg.grw.sigma_jump) + "\n";
  out += "particles = " + format_double(cfg.grw.particles_per_marble) + "\n";
  out += "epsilon = " + format_double(cfg.grw.epsilon_leak) + "\n";
  out += "eta = " + format_double(cfg.grw.eta_collapse) + "\n";
  out += std::string("width_convention = ") +
         (cfg.grw.width_convention == WidthConvention::kStdDev ? "stddev" : "fwhm") + "\n";
  out += std::string("leakage_corrected = ") +
         (cfg.grw.leakage_corrected_sampling ? "true" : "false") + "\n";
  out += "\n[lattice]\n";
  out += "points = " + std::to_string(cfg.lattice.points) + "\n";
  out += "dx = " + format_double(cfg.lattice.dx) + "\n";
  out += "origin = " + format_double(cfg.lattice.origin) + "\n";
  out += "mean = " + format_double(cfg.lattice.mean) + "\n";
  out += "sigma_psi = " + format_double(cfg.lattice.sigma_psi) + "\n";
  out += "sigma_jump = " + format_double(cfg.lattice.sigma_jump) + "\n";
  out += "hits = " + std::to_string(cfg.lattice.hits) + "\n";
  out += "dt = " + format_double(cfg.lattice.dt) + "\n";
  out += "steps = " + std::to_string(cfg.lattice.steps) + "\n";
  out += "mass = " + format_double(cfg.lattice.mass) + "\n";
  out += "hbar = " + format_double(cfg.lattice.hbar) + "\n";
  return out;
}

inline bool operator==(const FuzzyConfig& a, const FuzzyConfig& b) {
  return a.p == b.p && a.p_all == b.p_all;
}

inline bool operator==(const GrwParams& a, const GrwParams& b) {
  return a.lambda_hit == b.lambda_hit && a.sigma_jump == b.sigma_jump &&
         a.particles_per_marble == b.particles_per_marble &&
         a.epsilon_leak == b.epsilon_leak && a.eta_collapse == b.eta_collapse &&
         a.width_convention == b.width_convention &&
         a.leakage_corrected_sampling == b.leakage_corrected_sampling;
}

inline bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.n_marbles == b.n_marbles && a.a_sq == b.a_sq && a.fuzzy == b.fuzzy &&
         a.grw == b.grw && a.duration == b.duration && a.trials == b.trials &&
         a.seed == b.seed && a.order == b.order && a.dense_limit == b.dense_limit &&
         a.stop_after_collapse == b.stop_after_collapse &&
         a.include_observer == b.include_observer && a.lattice == b.lattice;
}

}  // namespace grwsim
