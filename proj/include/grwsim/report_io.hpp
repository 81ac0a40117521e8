#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>

#include "grwsim/config.hpp"
#include "grwsim/errors.hpp"
#include "grwsim/fuzzy.hpp"
#include "grwsim/lattice.hpp"
#include "grwsim/scenarios.hpp"
#include "grwsim/version.hpp"

namespace grwsim {

using Json = nlohmann::ordered_json;

/// Everything needed to reproduce a run, embedded in every result file.
struct RunManifest {
  std::string scenario;
  ScenarioConfig cfg;
  std::string started_utc;
  std::string finished_utc;
};

inline std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json config_to_json(const ScenarioConfig& cfg) {
  Json j;
  j["scenario"] = {{"n", cfg.n_marbles},
                   {"a_sq", cfg.a_sq},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"duration", cfg.duration},
                   {"order", order_name(cfg.order)},
                   {"observer", cfg.include_observer},
                   {"stop_after_collapse", cfg.stop_after_collapse},
                   {"dense_limit", cfg.dense_limit}};
  j["fuzzy"]["p"] = cfg.fuzzy.p;
  if (cfg.fuzzy.p_all) j["fuzzy"]["p_all"] = *cfg.fuzzy.p_all;
  j["grw"] = {{"lambda", cfg.grw.lambda_hit},
              {"sigma", cfg.grw.sigma_jump},
              {"particles", cfg.grw.particles_per_marble},
              {"epsilon", cfg.grw.epsilon_leak},
              {"eta", cfg.grw.eta_collapse},
              {"width_convention",
               cfg.grw.width_convention == WidthConvention::kStdDev ? "stddev" : "fwhm"},
              {"leakage_corrected", cfg.grw.leakage_corrected_sampling}};
  j["lattice"] = {{"points", cfg.lattice.points}, {"dx", cfg.lattice.dx},
                  {"origin", cfg.lattice.origin}, {"mean", cfg.lattice.mean},
                  {"sigma_psi", cfg.lattice.sigma_psi}, {"sigma_jump", cfg.lattice.sigma_jump},
                  {"hits", cfg.lattice.hits}, {"dt", cfg.lattice.dt},
                  {"steps", cfg.lattice.steps}, {"mass", cfg.lattice.mass},
                  {"hbar", cfg.lattice.hbar}};
  return j;
}

inline Json manifest_to_json(const RunManifest& m) {
  Json j;
  j["scenario"] = m.scenario;
  j["config"] = config_to_json(m.cfg);
  j["seed"] = m.cfg.seed;
  j["tool_version"] = kVersion;
  j["rng"] = Rng::kIdentifier;
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  return j;
}

inline Json verdict_to_json(const Verdict& v) {
  return Json{{"status", verdict_name(v.status)}, {"mass", v.mass}};
}

/// All masses both linear and in the log domain — anomaly masses of
/// interest are exactly the ones linear doubles cannot always hold.
inline Json anomaly_to_json(const AnomalyReport& r) {
  Json j;
  j["per_marble"] = Json::array();
  for (std::size_t i = 0; i < r.per_marble.size(); ++i) {
    Json m = verdict_to_json(r.per_marble[i]);
    m["region"] = r.assignment[i];
    m["log_mass"] = std::log(r.per_marble[i].mass);
    j["per_marble"].push_back(std::move(m));
  }
  j["conjunction"] = verdict_to_json(r.conjunction);
  j["joint_mass"] = r.joint_mass;
  j["log_joint_mass"] = r.log_joint_mass;
  j["weak_anomaly"] = r.weak_anomaly;
  j["strong_anomaly"] = r.strong_anomaly;
  return j;
}

inline Json hit_record_to_json(const HitRecord& h) {
  return Json{{"time", h.time},
              {"subsystem", h.target_subsystem},
              {"center", h.center_label},
              {"pre_dominant_mass", h.pre_dominant_mass},
              {"post_dominant_mass", h.post_dominant_mass}};
}

inline Json trial_to_json(const TrialResult& t) {
  Json j;
  j["events"] = t.event_log.size();
  j["collapsed"] = t.collapsed();
  if (t.collapsed()) j["collapse_time"] = t.collapse_time;
  j["manifestation_events"] = t.manifestation_events;
  j["pointer_agreement"] = t.pointer_agreement;
  j["jump_events"] = t.jump_events;
  if (t.counter_value >= 0) j["counter_value"] = t.counter_value;
  j["right_switch"] = t.right_switch;
  j["final_dominant"] = t.final_dominant;
  j["final_state_summary"] = Json::array();
  for (const auto& [config, mass] : t.final_state_summary)
    j["final_state_summary"].push_back(Json{{"configuration", config}, {"mass", mass}});
  return j;
}

/// Summary object: deterministic for a given (scenario, cfg) -- no wall
/// times in here, those live in the manifest.
inline Json summary_to_json(const MonteCarloSummary& s, bool include_trials = false) {
  Json j;
  j["scenario"] = scenario_name(s.scenario);
  j["stats"] = Json::object();
  for (const auto& [key, value] : s.stats) j["stats"][key] = value;
  if (!s.counter_histogram.empty()) {
    j["counter_histogram"] = Json::array();
    for (std::int64_t c : s.counter_histogram) j["counter_histogram"].push_back(c);
  }
  if (s.scenario == Scenario::kCounting)
    j["anomaly"] = anomaly_to_json(s.trials.front().anomaly_timeline.front().second);
  j["trial_seeds"] = s.trial_seeds;
  if (include_trials) {
    j["trials"] = Json::array();
    for (const auto& t : s.trials) j["trials"].push_back(trial_to_json(t));
  }
  return j;
}

inline Json result_document(const RunManifest& manifest, const Json& summary) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["manifest"] = manifest_to_json(manifest);
  j["summary"] = summary;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace detail {
inline std::string csv_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

/// One counting-anomaly row. Fixed column order; shared by `counting`
/// and `sweep`.
inline constexpr const char* kCountingCsvHeader = "n,a_sq,p,joint_mass,weak,strong\n";

inline std::string counting_csv_row(int n, double a_sq, double p, const AnomalyReport& r) {
  using detail::csv_double;
  return std::to_string(n) + "," + csv_double(a_sq) + "," + csv_double(p) + "," +
         csv_double(r.joint_mass) + "," + (r.weak_anomaly ? "1" : "0") + "," +
         (r.strong_anomaly ? "1" : "0") + "\n";
}

/// Wavefunction snapshot as x, re, im, density columns. Tail amplitudes
/// below double range flush to zero here; the log-domain state is the
/// authority.
inline std::string lattice_csv(const LatticeWavefunction& psi) {
  std::string out = "x,re,im,density\n";
  using detail::csv_double;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto z = psi.amplitudes()[i].to_complex();
    out += csv_double(psi.x_at(i)) + "," + csv_double(z.real()) + "," + csv_double(z.imag()) +
           "," + csv_double(std::norm(z)) + "\n";
  }
  return out;
}

/// Generic key,value rows for Monte Carlo scenario aggregates.
inline std::string stats_csv(const MonteCarloSummary& s) {
  std::string out = "key,value\n";
  for (const auto& [key, value] : s.stats)
    out += key + "," + detail::csv_double(value) + "\n";
  for (std::size_t k = 0; k < s.counter_histogram.size(); ++k)
    out += "counter_k" + std::to_string(k) + "," + std::to_string(s.counter_histogram[k]) + "\n";
  return out;
}

/// Per-trial event logs, one JSON object per line.
inline std::string events_jsonl(const MonteCarloSummary& s) {
  std::string out;
  for (std::size_t i = 0; i < s.trials.size(); ++i) {
    for (const auto& h : s.trials[i].event_log) {
      Json j = hit_record_to_json(h);
      Json line;
      line["trial"] = i;
      line.update(j);
      out += line.dump();
      out += '\n';
    }
  }
  return out;
}

}  // namespace grwsim
