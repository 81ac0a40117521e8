#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grwsim/errors.hpp"
#include "grwsim/fuzzy.hpp"
#include "grwsim/hit_dynamics.hpp"
#include "grwsim/measurement.hpp"
#include "grwsim/product_state.hpp"
#include "grwsim/rng.hpp"
#include "grwsim/sparse_state.hpp"

namespace grwsim {

enum class MeasureOrder { kIndividualFirst, kCollectiveFirst };

inline const char* order_name(MeasureOrder o) {
  return o == MeasureOrder::kIndividualFirst ? "individual" : "collective";
}

/// Grid and evolution parameters for the lattice demo.
struct LatticeConfig {
  int points = 2048;
  double dx = 0.125;
  double origin = -128.0;
  double mean = 0.0;
  double sigma_psi = 4.0;
  double sigma_jump = 1.0;
  int hits = 1;
  double dt = 0.0;
  int steps = 0;
  double mass = 1.0;
  double hbar = 1.0;

  void validate() const {
    if (points < 8) throw ValidationError("lattice points must be >= 8");
    if (!(dx > 0.0)) throw ValidationError("lattice dx must be > 0");
    if (!(sigma_psi > 0.0)) throw ValidationError("lattice sigma_psi must be > 0");
    if (!(sigma_jump > 0.0)) throw ValidationError("lattice sigma_jump must be > 0");
    if (hits < 0) throw ValidationError("lattice hits must be >= 0");
    if (steps < 0) throw ValidationError("lattice steps must be >= 0");
    if (dt < 0.0) throw ValidationError("lattice dt must be >= 0");
    if (!(mass > 0.0)) throw ValidationError("lattice mass must be > 0");
    if (!(hbar > 0.0)) throw ValidationError("lattice hbar must be > 0");
  }

  bool operator==(const LatticeConfig&) const = default;
};

/// Full experiment configuration; one of these (plus a seed) determines a
/// run bit for bit.
struct ScenarioConfig {
  int n_marbles = 1;
  double a_sq = 0.95;
  FuzzyConfig fuzzy;
  GrwParams grw;
  double duration = 2e-8;  // seconds of simulated time
  int trials = 1;
  std::uint64_t seed = 0;
  MeasureOrder order = MeasureOrder::kIndividualFirst;
  int dense_limit = kDefaultDenseLimit;
  bool stop_after_collapse = true;
  bool include_observer = false;
  LatticeConfig lattice;

  void validate() const {
    if (n_marbles < 1) throw ValidationError("n must be >= 1");
    if (!(a_sq > 0.0 && a_sq <= 1.0)) throw ValidationError("a_sq must lie in (0, 1]");
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (duration < 0.0) throw ValidationError("duration must be >= 0");
    if (dense_limit < 1 || dense_limit > 30)
      throw ValidationError("dense_limit must lie in [1, 30]");
    fuzzy.validate();
    grw.validate();
    lattice.validate();
  }
};

/// Outcome of one trial. Scenario-specific fields keep their defaults
/// when a scenario does not produce them.
struct TrialResult {
  std::vector<HitRecord> event_log;
  std::vector<std::pair<std::string, double>> final_state_summary;
  std::vector<std::pair<double, AnomalyReport>> anomaly_timeline;
  int manifestation_events = 0;
  bool pointer_agreement = true;

  double collapse_time = std::numeric_limits<double>::quiet_NaN();
  int jump_events = 0;
  int counter_value = -1;
  bool right_switch = false;
  int hit_count = 0;  // control-phase hits for aaad; total otherwise
  std::string final_dominant;

  bool collapsed() const { return !std::isnan(collapse_time); }
};

enum class Scenario { kSingleMarble, kCounting, kGbPersistence, kMeasureChain, kAaad };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kSingleMarble: return "single-marble";
    case Scenario::kCounting: return "counting";
    case Scenario::kGbPersistence: return "gb-persistence";
    case Scenario::kMeasureChain: return "measure-chain";
    default: return "aaad";
  }
}

/// Scenario-appropriate defaults (duration mostly; everything else is the
/// shared default set).
inline ScenarioConfig default_config(Scenario s) {
  ScenarioConfig cfg;
  switch (s) {
    case Scenario::kSingleMarble:
      cfg.n_marbles = 1;
      cfg.duration = 2e-8;
      break;
    case Scenario::kCounting:
      cfg.n_marbles = 45;
      break;
    case Scenario::kGbPersistence:
      cfg.n_marbles = 45;
      cfg.duration = 1e-9;
      break;
    case Scenario::kMeasureChain:
      cfg.n_marbles = 10;
      cfg.duration = 2e-8;
      break;
    case Scenario::kAaad:
      cfg.n_marbles = 2;
      cfg.duration = 1.0;
      break;
  }
  return cfg;
}

/// Single marble prepared in sqrt(a_sq)|in> + sqrt(1-a_sq)|out>, evolved
/// under hits for the configured window. Records when the state first
/// reaches effective collapse and every spontaneous jump (a flip of the
/// dominant region while the previous location was fuzzy-determinate).
inline TrialResult run_single_marble_collapse(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  if (cfg.n_marbles != 1)
    throw ValidationError("single-marble scenario requires n = 1");
  TrialResult result;
  ProductState state = ProductState::uniform(1, cfg.a_sq);
  const std::vector<double> counts = {cfg.grw.particles_per_marble};
  double t = 0.0;
  // a spontaneous jump is a transition between fuzzy-determinate
  // locations; the state may pass through indeterminate masses in between
  std::optional<Region> last_determinate;
  if (state.marble(0).dominant_mass() >= 1.0 - cfg.fuzzy.p)
    last_determinate = state.marble(0).dominant_region();
  while (true) {
    const auto ev = sample_next_hit(rng, cfg.grw, counts, t);
    if (!ev || ev->time > cfg.duration) break;
    t = ev->time;
    auto [post, rec] = apply_marble_hit(state, 0, rng, cfg.grw, t);
    state = std::move(post);
    result.event_log.push_back(rec);
    ++result.hit_count;
    const Region dom = state.marble(0).dominant_region();
    const double dm = state.marble(0).dominant_mass();
    if (!result.collapsed() && dm >= cfg.grw.eta_collapse) result.collapse_time = t;
    if (dm >= 1.0 - cfg.fuzzy.p) {
      if (last_determinate && dom != *last_determinate) ++result.jump_events;
      last_determinate = dom;
    }
  }
  result.anomaly_timeline.emplace_back(t, enumeration_check(state, cfg.fuzzy));
  result.final_dominant = region_name(state.marble(0).dominant_region());
  result.final_state_summary = {{"in", state.marble(0).in_mass()},
                                {"out", state.marble(0).out_mass()}};
  return result;
}

/// The counting anomaly itself: build the n-marble product state and
/// check the enumeration principle. Deterministic; no dynamics.
inline AnomalyReport run_counting_anomaly(const ScenarioConfig& cfg) {
  cfg.validate();
  return enumeration_check(ProductState::uniform(cfg.n_marbles, cfg.a_sq), cfg.fuzzy);
}

/// Product state evolved under marble hits only, with an anomaly report
/// for the best current conjunction at t = 0 and after every hit. The
/// product form is preserved structurally (hits touch one factor and the
/// factor constructor re-checks normalization every time).
inline TrialResult run_gb_persistence(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  TrialResult result;
  ProductState state = ProductState::uniform(cfg.n_marbles, cfg.a_sq);
  result.anomaly_timeline.emplace_back(0.0, enumeration_check(state, cfg.fuzzy));
  const std::vector<double> counts(static_cast<std::size_t>(cfg.n_marbles),
                                   cfg.grw.particles_per_marble);
  double t = 0.0;
  while (true) {
    const auto ev = sample_next_hit(rng, cfg.grw, counts, t);
    if (!ev || ev->time > cfg.duration) break;
    t = ev->time;
    auto [post, rec] = apply_marble_hit(state, ev->subsystem, rng, cfg.grw, t);
    state = std::move(post);
    result.event_log.push_back(rec);
    ++result.hit_count;
    result.anomaly_timeline.emplace_back(t, enumeration_check(state, cfg.fuzzy));
  }
  const AnomalyReport& last = result.anomaly_timeline.back().second;
  std::string assignment;
  for (std::size_t i = 0; i < last.assignment.size(); ++i) {
    if (i) assignment += ',';
    assignment += last.assignment[i];
  }
  result.final_state_summary = {{assignment, last.joint_mass}};
  result.final_dominant = assignment;
  return result;
}

namespace detail {

struct ChainContext {
  std::vector<int> marble_subs;
  std::vector<int> record_subs;  // empty until records are coupled
  int counter_sub = -1;
  std::optional<Configuration> last_marble_cfg;  // at last collapsed instant
};

inline Configuration restrict_to(const Configuration& full, const std::vector<int>& subs) {
  Configuration out;
  out.reserve(subs.size());
  for (int s : subs) out.push_back(full[static_cast<std::size_t>(s)]);
  return out;
}

// Examine one effectively collapsed configuration: pointer/record
// consistency, manifestation counting, and jump-back detection.
inline void inspect_collapse(const SparseState& state, const CollapseStatus& status,
                             const ScenarioConfig& cfg, ChainContext& ctx,
                             TrialResult& result, double t) {
  if (!result.collapsed()) result.collapse_time = t;
  const Configuration marble_cfg = restrict_to(status.restricted, ctx.marble_subs);
  if (ctx.last_marble_cfg && marble_cfg != *ctx.last_marble_cfg) ++result.jump_events;
  ctx.last_marble_cfg = marble_cfg;

  if (ctx.counter_sub >= 0) {
    const int k = pointer_count(status.restricted[static_cast<std::size_t>(ctx.counter_sub)]);
    result.counter_value = k;
    const int marbles_in = count_in(status.restricted, ctx.marble_subs);
    if (k != marbles_in) result.pointer_agreement = false;

    if (!ctx.record_subs.empty()) {
      bool all_determinate = true;
      std::vector<int> pointers = ctx.record_subs;
      pointers.push_back(ctx.counter_sub);
      for (int sub : pointers) {
        const std::vector<double> masses = state.subsystem_masses(sub);
        const double dominant = *std::max_element(masses.begin(), masses.end());
        if (dominant < 1.0 - cfg.fuzzy.p) all_determinate = false;
      }
      int records_in = 0;
      for (int sub : ctx.record_subs) {
        const int in_label = state.roster().at(sub).label_index("in");
        if (status.restricted[static_cast<std::size_t>(sub)] == in_label) ++records_in;
      }
      if (k != records_in) result.pointer_agreement = false;
      if (all_determinate && k != records_in) ++result.manifestation_events;
    }
  }
}

// Event loop over one roster: hits until the window closes, or (with
// stop_at_collapse) until the full chain is effectively collapsed.
// Checks the pre-existing state first, so a chain that is born collapsed
// is inspected before any hit lands.
inline void run_chain_hits(SparseState& state, double& t, double t_end,
                           const ScenarioConfig& cfg, Rng& rng, ChainContext& ctx,
                           TrialResult& result, bool stop_at_collapse) {
  if (const auto status = effective_collapse_status(state, cfg.grw.eta_collapse)) {
    inspect_collapse(state, *status, cfg, ctx, result, t);
    if (stop_at_collapse) return;
  }
  const std::vector<double> counts(static_cast<std::size_t>(state.roster().size()),
                                   cfg.grw.particles_per_marble);
  while (true) {
    const auto ev = sample_next_hit(rng, cfg.grw, counts, t);
    if (!ev || ev->time > t_end) {
      t = t_end;
      return;
    }
    t = ev->time;
    auto [post, rec] = apply_sparse_hit(std::move(state), ev->subsystem, rng, cfg.grw, t);
    state = std::move(post);
    result.event_log.push_back(rec);
    ++result.hit_count;
    if (const auto status = effective_collapse_status(state, cfg.grw.eta_collapse)) {
      inspect_collapse(state, *status, cfg, ctx, result, t);
      if (stop_at_collapse) return;
    }
  }
}

inline void summarize_top_branches(const SparseState& state, TrialResult& result,
                                   std::size_t top = 8) {
  std::vector<std::pair<std::string, double>> all;
  all.reserve(state.term_count());
  for (const auto& [config, amp] : state.terms())
    all.emplace_back(state.config_string(config), amp.squared_magnitude());
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (all.size() > top) all.resize(top);
  result.final_state_summary = std::move(all);
  if (!result.final_state_summary.empty())
    result.final_dominant = result.final_state_summary.front().first;
}

}  // namespace detail

/// Full measurement chain for "how many marbles are in the box?".
///
/// individual_first: couple a record apparatus to every marble, then the
/// counter, then run hits. collective_first: couple the counter alone,
/// run hits until the (marbles + counter) chain effectively collapses,
/// then couple the records and keep going — the stage at which jump-back
/// events (a later hit re-centering the chain on a suppressed class) can
/// show up. Either way, manifestation is tallied at collapsed instants
/// only: every pointer fuzzy-determinate, yet counter and records
/// disagreeing. The veridical couplings make that structurally
/// impossible, which is exactly what the tally is standing guard over.
inline TrialResult run_measurement_chain(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  TrialResult result;
  detail::ChainContext ctx;
  ctx.marble_subs.resize(static_cast<std::size_t>(cfg.n_marbles));
  std::iota(ctx.marble_subs.begin(), ctx.marble_subs.end(), 0);

  SparseState state = expand(ProductState::uniform(cfg.n_marbles, cfg.a_sq), cfg.dense_limit);
  double t = 0.0;

  if (cfg.order == MeasureOrder::kIndividualFirst) {
    state = couple_records(state, ctx.marble_subs);
    for (int i = 0; i < cfg.n_marbles; ++i)
      ctx.record_subs.push_back(state.roster().index_of("M" + std::to_string(i + 1)));
    state = couple_counter(state, ctx.marble_subs);
    ctx.counter_sub = state.roster().index_of("M");
    if (cfg.include_observer) state = couple_observer(state, ctx.marble_subs);
    result.anomaly_timeline.emplace_back(t, enumeration_check(state, ctx.marble_subs, cfg.fuzzy));
    detail::run_chain_hits(state, t, cfg.duration, cfg, rng, ctx, result,
                           cfg.stop_after_collapse);
  } else {
    // collective measurement first: the (marbles + counter) chain runs to
    // its first effective collapse, the per-marble records couple to the
    // collapsed state, and the rest of the window belongs to the full
    // chain (where a jump-back can still occur).
    state = couple_counter(state, ctx.marble_subs);
    ctx.counter_sub = state.roster().index_of("M");
    result.anomaly_timeline.emplace_back(t, enumeration_check(state, ctx.marble_subs, cfg.fuzzy));
    detail::run_chain_hits(state, t, cfg.duration, cfg, rng, ctx, result, true);
    state = couple_records(state, ctx.marble_subs);
    for (int i = 0; i < cfg.n_marbles; ++i)
      ctx.record_subs.push_back(state.roster().index_of("M" + std::to_string(i + 1)));
    if (cfg.include_observer) state = couple_observer(state, ctx.marble_subs);
    detail::run_chain_hits(state, t, cfg.duration, cfg, rng, ctx, result,
                           cfg.stop_after_collapse);
  }

  result.anomaly_timeline.emplace_back(t, enumeration_check(state, ctx.marble_subs, cfg.fuzzy));
  detail::summarize_top_branches(state, result);
  return result;
}

/// Two distant entangled particles a|in,in> + b|out,out>. First a
/// no-measurement control window (two bare particles, hit rate 2 lambda,
/// so essentially nothing happens), then a record apparatus is coupled to
/// the left particle and the now-macroscopic chain collapses; the right
/// particle ends out of its box with probability |b|^2.
inline TrialResult run_action_at_a_distance(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  TrialResult result;
  SubsystemRoster roster({{"L", {"in", "out"}}, {"R", {"in", "out"}}});
  std::vector<SparseState::Term> terms;
  const Amplitude a = Amplitude::from_real(std::sqrt(cfg.a_sq));
  const Amplitude b = Amplitude::from_real(std::sqrt(1.0 - cfg.a_sq));
  terms.emplace_back(Configuration{0, 0}, a);
  if (!b.is_zero()) terms.emplace_back(Configuration{1, 1}, b);
  SparseState state = SparseState::from_terms(roster, std::move(terms));

  // control window: two particles, no apparatus
  {
    const std::vector<double> counts = {1.0, 1.0};
    double t = 0.0;
    while (true) {
      const auto ev = sample_next_hit(rng, cfg.grw, counts, t);
      if (!ev || ev->time > cfg.duration) break;
      t = ev->time;
      auto [post, rec] = apply_sparse_hit(std::move(state), ev->subsystem, rng, cfg.grw, t);
      state = std::move(post);
      result.event_log.push_back(rec);
      ++result.hit_count;
    }
  }

  // measure L: couple a record apparatus, run the chain
  SparseState chain = couple_records(state, {0}, "ML");
  const int ml = chain.roster().index_of("ML1");
  const int right = chain.roster().index_of("R");
  double t = 0.0;
  const auto inspect = [&](const CollapseStatus& status, double when) {
    result.collapse_time = when;
    const Configuration& full = status.restricted;
    result.right_switch =
        chain.roster().at(right).alphabet[full[static_cast<std::size_t>(right)]] == "out";
    const int l_label = full[0];
    const int ml_label = full[static_cast<std::size_t>(ml)];
    if (ml_label != l_label + 1) result.pointer_agreement = false;  // 'ready' offset
  };
  const std::vector<double> counts = {1.0, 1.0, cfg.grw.particles_per_marble};
  if (const auto status = effective_collapse_status(chain, cfg.grw.eta_collapse))
    inspect(*status, t);
  while (!result.collapsed()) {
    const auto ev = sample_next_hit(rng, cfg.grw, counts, t);
    if (!ev || ev->time > cfg.duration) break;
    t = ev->time;
    auto [post, rec] = apply_sparse_hit(std::move(chain), ev->subsystem, rng, cfg.grw, t);
    chain = std::move(post);
    result.event_log.push_back(rec);
    if (const auto status = effective_collapse_status(chain, cfg.grw.eta_collapse))
      inspect(*status, t);
  }
  detail::summarize_top_branches(chain, result);
  return result;
}

/// Monte Carlo summary: every trial, the per-trial seeds, and aggregate
/// statistics. A pure function of (scenario, cfg): trial i always runs on
/// the stream derived from (cfg.seed, i), whatever worker executes it.
struct MonteCarloSummary {
  Scenario scenario = Scenario::kCounting;
  ScenarioConfig cfg;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<TrialResult> trials;
  std::vector<std::pair<std::string, double>> stats;
  std::vector<std::int64_t> counter_histogram;
};

inline TrialResult run_trial(Scenario scenario, const ScenarioConfig& cfg, Rng& rng) {
  switch (scenario) {
    case Scenario::kSingleMarble:
      return run_single_marble_collapse(cfg, rng);
    case Scenario::kCounting: {
      TrialResult r;
      r.anomaly_timeline.emplace_back(0.0, run_counting_anomaly(cfg));
      const AnomalyReport& rep = r.anomaly_timeline.back().second;
      r.final_state_summary = {{"joint", rep.joint_mass}};
      return r;
    }
    case Scenario::kGbPersistence:
      return run_gb_persistence(cfg, rng);
    case Scenario::kMeasureChain:
      return run_measurement_chain(cfg, rng);
    default:
      return run_action_at_a_distance(cfg, rng);
  }
}

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline void aggregate(MonteCarloSummary& s) {
  const auto& trials = s.trials;
  const double n = static_cast<double>(trials.size());
  auto push = [&s](const std::string& k, double v) { s.stats.emplace_back(k, v); };
  std::int64_t events = 0;
  for (const auto& t : trials) events += static_cast<std::int64_t>(t.event_log.size());
  push("trials", n);
  push("events_total", static_cast<double>(events));

  auto frequency_ci = [n](double p) { return 1.96 * std::sqrt(p * (1.0 - p) / n); };
  std::vector<double> collapse_times;
  int collapsed = 0;
  for (const auto& t : trials)
    if (t.collapsed()) {
      ++collapsed;
      collapse_times.push_back(t.collapse_time);
    }

  switch (s.scenario) {
    case Scenario::kSingleMarble: {
      int in = 0, jumps = 0;
      for (const auto& t : trials) {
        if (t.final_dominant == "in") ++in;
        jumps += t.jump_events;
      }
      const double freq = static_cast<double>(in) / n;
      push("in_frequency", freq);
      push("in_frequency_ci95", frequency_ci(freq));
      push("collapsed_fraction", static_cast<double>(collapsed) / n);
      push("collapse_time_median", median(collapse_times));
      push("jump_events_total", static_cast<double>(jumps));
      break;
    }
    case Scenario::kCounting: {
      const AnomalyReport& r = trials.front().anomaly_timeline.front().second;
      push("joint_mass", r.joint_mass);
      push("log_joint_mass", r.log_joint_mass);
      push("weak_anomaly", r.weak_anomaly ? 1.0 : 0.0);
      push("strong_anomaly", r.strong_anomaly ? 1.0 : 0.0);
      break;
    }
    case Scenario::kGbPersistence: {
      bool weak_every = true, strong_every = true, initial_strong = true;
      std::int64_t entries = 0;
      for (const auto& t : trials) {
        initial_strong = initial_strong && t.anomaly_timeline.front().second.strong_anomaly;
        for (const auto& [time, rep] : t.anomaly_timeline) {
          ++entries;
          weak_every = weak_every && rep.weak_anomaly;
          strong_every = strong_every && rep.strong_anomaly;
        }
      }
      push("weak_every_event", weak_every ? 1.0 : 0.0);
      push("strong_every_event", strong_every ? 1.0 : 0.0);
      push("initial_strong", initial_strong ? 1.0 : 0.0);
      push("timeline_entries_total", static_cast<double>(entries));
      break;
    }
    case Scenario::kMeasureChain: {
      std::int64_t manifest = 0, jump_back = 0;
      bool agreement = true;
      s.counter_histogram.assign(static_cast<std::size_t>(s.cfg.n_marbles) + 1, 0);
      for (const auto& t : trials) {
        manifest += t.manifestation_events;
        jump_back += t.jump_events;
        agreement = agreement && t.pointer_agreement;
        if (t.counter_value >= 0 && t.counter_value <= s.cfg.n_marbles)
          ++s.counter_histogram[static_cast<std::size_t>(t.counter_value)];
      }
      push("manifestation_events_total", static_cast<double>(manifest));
      push("pointer_agreement_all", agreement ? 1.0 : 0.0);
      push("collapsed_fraction", static_cast<double>(collapsed) / n);
      push("collapse_time_median", median(collapse_times));
      push("jump_back_total", static_cast<double>(jump_back));
      break;
    }
    case Scenario::kAaad: {
      int switched = 0;
      std::int64_t control_hits = 0;
      for (const auto& t : trials) {
        if (t.right_switch) ++switched;
        control_hits += t.hit_count;
      }
      const double freq = static_cast<double>(switched) / n;
      push("right_switch_frequency", freq);
      push("right_switch_ci95", frequency_ci(freq));
      push("control_hits_total", static_cast<double>(control_hits));
      push("collapsed_fraction", static_cast<double>(collapsed) / n);
      break;
    }
  }
}

}  // namespace detail

inline MonteCarloSummary monte_carlo(Scenario scenario, const ScenarioConfig& cfg,
                                     int threads = 1) {
  cfg.validate();
  if (threads < 1) throw ValidationError("threads must be >= 1");
  MonteCarloSummary summary;
  summary.scenario = scenario;
  summary.cfg = cfg;
  summary.trials.resize(static_cast<std::size_t>(cfg.trials));
  summary.trial_seeds.resize(static_cast<std::size_t>(cfg.trials));
  for (int i = 0; i < cfg.trials; ++i)
    summary.trial_seeds[static_cast<std::size_t>(i)] =
        Rng::trial_seed(cfg.seed, static_cast<std::uint64_t>(i));

  auto run_block = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      Rng rng = Rng::for_trial(cfg.seed, static_cast<std::uint64_t>(i));
      summary.trials[static_cast<std::size_t>(i)] = run_trial(scenario, cfg, rng);
    }
  };

  const int workers = std::min(threads, cfg.trials);
  if (workers <= 1) {
    run_block(0, cfg.trials);
  } else {
    std::vector<std::future<void>> futures;
    const int chunk = (cfg.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(cfg.trials, begin + chunk);
      if (begin >= end) break;
      futures.push_back(std::async(std::launch::async, run_block, begin, end));
    }
    for (auto& f : futures) f.get();
  }

  detail::aggregate(summary);
  return summary;
}

}  // namespace grwsim
