#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "grwsim/errors.hpp"
#include "grwsim/product_state.hpp"
#include "grwsim/rng.hpp"
#include "grwsim/sparse_state.hpp"

namespace grwsim {

enum class WidthConvention { kStdDev, kFwhm };

/// Collapse-model parameter set.
///
/// epsilon_leak is the squared-mass multiplier a hit applies to every
/// branch disagreeing with the hit center. The physically derived value
/// exp(-d^2/4sigma^2) underflows any usable statistics for macroscopic
/// separations, so it is a first-class parameter with a floor; see
/// derived_epsilon.
struct GrwParams {
  double lambda_hit = 1e-15;            // per-particle hit rate, 1/s
  double sigma_jump = 1e-5;             // jump-factor width, cm
  double particles_per_marble = 6e23;   // N
  double epsilon_leak = 1e-12;          // squared-mass leakage in (0,1)
  double eta_collapse = 1.0 - 1e-6;     // dominant-branch mass threshold
  WidthConvention width_convention = WidthConvention::kStdDev;
  bool leakage_corrected_sampling = false;

  void validate() const {
    if (!(lambda_hit > 0.0)) throw ValidationError("lambda_hit must be > 0");
    if (!(sigma_jump > 0.0)) throw ValidationError("sigma_jump must be > 0");
    if (!(particles_per_marble > 0.0)) throw ValidationError("particles_per_marble must be > 0");
    if (!(epsilon_leak > 0.0 && epsilon_leak < 1.0))
      throw ValidationError("epsilon_leak must lie in (0, 1)");
    if (!(eta_collapse > 0.5 && eta_collapse < 1.0))
      throw ValidationError("eta_collapse must lie in (0.5, 1)");
  }

  /// Jump width as a standard deviation of |j|^2, whichever convention
  /// the config chose.
  double effective_sigma() const {
    return width_convention == WidthConvention::kStdDev
               ? sigma_jump
               : sigma_jump / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  }

  /// Geometric leakage for regions separated by d, clamped to a floor
  /// that keeps jump events reachable in Monte Carlo runs.
  static double derived_epsilon(double separation, double sigma, double floor = 1e-12) {
    const double e = std::exp(-separation * separation / (4.0 * sigma * sigma));
    return e < floor ? floor : e;
  }
};

/// One hit: when, on which subsystem, centered on which label, and the
/// target's dominant-branch mass before/after.
struct HitRecord {
  double time = 0.0;
  int target_subsystem = -1;
  std::string center_label;
  double pre_dominant_mass = 0.0;
  double post_dominant_mass = 0.0;
};

struct HitEvent {
  double time = 0.0;
  int subsystem = -1;
};

/// Next Poisson hit over a set of subsystems with the given particle
/// counts: waiting time ~ Exp(lambda * total), target chosen proportional
/// to its count. Returns nothing when no particles are hittable.
inline std::optional<HitEvent> sample_next_hit(Rng& rng, const GrwParams& params,
                                               std::span<const double> particle_counts,
                                               double now) {
  double total = 0.0;
  for (double c : particle_counts) total += c;
  if (!(total > 0.0)) return std::nullopt;
  HitEvent ev;
  ev.time = now + rng.exponential(params.lambda_hit * total);
  const double u = rng.uniform() * total;
  double cum = 0.0;
  ev.subsystem = static_cast<int>(particle_counts.size()) - 1;
  for (std::size_t i = 0; i < particle_counts.size(); ++i) {
    cum += particle_counts[i];
    if (u < cum) {
      ev.subsystem = static_cast<int>(i);
      break;
    }
  }
  return ev;
}

namespace detail {

// Center-label distribution from per-label log masses. With leakage
// correction on, the exact branch masses are mixed with the off-center
// tail weight epsilon^2 (the plain branch masses are the standard
// reading and the default).
inline std::vector<double> center_probabilities(const std::vector<double>& log_masses,
                                                const GrwParams& params) {
  double shift = -std::numeric_limits<double>::infinity();
  for (double lm : log_masses) shift = std::max(shift, lm);
  std::vector<double> p(log_masses.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_masses[i] - shift);
    total += p[i];
  }
  for (double& x : p) x /= total;
  if (params.leakage_corrected_sampling && p.size() > 1) {
    const double eps2 = params.epsilon_leak * params.epsilon_leak;
    std::vector<double> q(p.size(), 0.0);
    const double off = eps2 / static_cast<double>(p.size() - 1);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j)
        q[i] += (i == j ? 1.0 - eps2 : off) * p[j];
    return q;
  }
  return p;
}

inline int sample_index(Rng& rng, const std::vector<double>& probs) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace detail

/// Deterministic core of a marble hit: suppress the region opposite the
/// given center by sqrt(epsilon) in magnitude and renormalize the factor.
/// All other marbles are untouched, so products stay products.
inline std::pair<ProductState, HitRecord> apply_marble_hit_with_center(
    const ProductState& state, int marble, Region center, const GrwParams& params,
    double time = 0.0) {
  const TwoRegionMarble& f = state.marble(marble);
  HitRecord rec;
  rec.time = time;
  rec.target_subsystem = marble;
  rec.center_label = region_name(center);
  rec.pre_dominant_mass = f.dominant_mass();

  const double log_suppress = 0.5 * std::log(params.epsilon_leak);
  Amplitude in = f.amp_in();
  Amplitude out = f.amp_out();
  if (center == Region::kIn)
    out = out.scaled_mag(log_suppress);
  else
    in = in.scaled_mag(log_suppress);
  TwoRegionMarble hit = TwoRegionMarble::normalized(in, out, f.marble_id());
  rec.post_dominant_mass = hit.dominant_mass();
  return {state.with_marble(marble, std::move(hit)), std::move(rec)};
}

/// GRW hit on one marble of a factorized state: the center region is
/// sampled from the marble's branch masses (Born rule), then the
/// deterministic suppression above is applied.
inline std::pair<ProductState, HitRecord> apply_marble_hit(const ProductState& state,
                                                           int marble, Rng& rng,
                                                           const GrwParams& params,
                                                           double time = 0.0) {
  const TwoRegionMarble& f = state.marble(marble);
  const std::vector<double> log_masses = {f.log_mass(Region::kIn), f.log_mass(Region::kOut)};
  const int center = detail::sample_index(rng, detail::center_probabilities(log_masses, params));
  return apply_marble_hit_with_center(state, marble, static_cast<Region>(center), params, time);
}

/// Deterministic core of a sparse hit: every term whose label on the
/// target subsystem differs from the center is suppressed by
/// sqrt(epsilon) in magnitude; the state is renormalized. Takes the state
/// by value: pass an rvalue to rescale the term table in place.
inline std::pair<SparseState, HitRecord> apply_sparse_hit_with_center(
    SparseState state, int subsystem, int center_label, const GrwParams& params,
    double time = 0.0) {
  if (subsystem < 0 || subsystem >= state.roster().size())
    throw ShapeError("unknown subsystem index " + std::to_string(subsystem));
  const Subsystem& sub = state.roster().at(subsystem);
  if (center_label < 0 || center_label >= static_cast<int>(sub.alphabet.size()))
    throw ShapeError("center label out of alphabet for subsystem " + sub.name);

  const std::vector<double> pre = state.subsystem_log_masses(subsystem);
  auto dominant_of = [](const std::vector<double>& lm) {
    double best = -std::numeric_limits<double>::infinity();
    for (double x : lm) best = std::max(best, x);
    return best;
  };

  HitRecord rec;
  rec.time = time;
  rec.target_subsystem = subsystem;
  rec.center_label = sub.alphabet[static_cast<std::size_t>(center_label)];
  rec.pre_dominant_mass = std::exp(dominant_of(pre));

  // uniform suppression means the renormalization total and the post-hit
  // label masses follow from the per-label masses alone
  const double log_eps = std::log(params.epsilon_leak);
  const double log_suppress = 0.5 * log_eps;
  LogMassAccumulator total;
  for (std::size_t l = 0; l < pre.size(); ++l)
    total.add_log(pre[l] + (static_cast<int>(l) == center_label ? 0.0 : log_eps));
  if (total.empty()) throw DegenerateHitError("hit annihilated the state");
  const double log_total = total.log_total();
  const double half = 0.5 * log_total;

  const SubsystemRoster roster = state.roster();
  std::vector<SparseState::Term> terms = SparseState::take_terms(std::move(state));
  for (auto& [cfg, amp] : terms)
    amp = amp.scaled_mag(
        (cfg[static_cast<std::size_t>(subsystem)] != center_label ? log_suppress : 0.0) - half);

  // rescaling never reorders or zeroes terms
  SparseState post = SparseState::from_sorted_terms_unchecked(roster, std::move(terms));
  std::vector<double> post_masses(pre.size());
  for (std::size_t l = 0; l < pre.size(); ++l)
    post_masses[l] = pre[l] + (static_cast<int>(l) == center_label ? 0.0 : log_eps) - log_total;
  rec.post_dominant_mass = std::exp(dominant_of(post_masses));
  return {std::move(post), std::move(rec)};
}

/// GRW hit on one subsystem of a sparse state. The center label is
/// sampled from that subsystem's branch masses, walking the alphabet in
/// declared order — the same walk the factorized path uses, so matched
/// seeds give matched trajectories. Takes the state by value; move it in
/// when the caller is done with it.
inline std::pair<SparseState, HitRecord> apply_sparse_hit(SparseState state, int subsystem,
                                                          Rng& rng, const GrwParams& params,
                                                          double time = 0.0) {
  if (subsystem < 0 || subsystem >= state.roster().size())
    throw ShapeError("unknown subsystem index " + std::to_string(subsystem));
  const std::vector<double> log_masses = state.subsystem_log_masses(subsystem);
  const int center = detail::sample_index(rng, detail::center_probabilities(log_masses, params));
  return apply_sparse_hit_with_center(std::move(state), subsystem, center, params, time);
}

struct CollapseStatus {
  Configuration restricted;  // labels of the group subsystems, group order
  double mass = 0.0;
};

/// The configuration class (restricted to the given subsystems) holding
/// at least eta of the squared mass, if one exists. Collapse is only
/// ever effective: the complement keeps tiny but nonzero mass.
inline std::optional<CollapseStatus> effective_collapse_status(
    const SparseState& state, const std::vector<int>& subsystem_group, double eta) {
  std::map<Configuration, LogMassAccumulator> classes;
  for (const auto& [cfg, amp] : state.terms()) {
    Configuration key;
    key.reserve(subsystem_group.size());
    for (int s : subsystem_group) {
      if (s < 0 || s >= state.roster().size())
        throw ShapeError("unknown subsystem index " + std::to_string(s));
      key.push_back(cfg[static_cast<std::size_t>(s)]);
    }
    classes[key].add_log(amp.log_squared_magnitude());
  }
  std::optional<CollapseStatus> best;
  for (const auto& [key, acc] : classes) {
    const double mass = acc.total();
    if (mass >= eta && (!best || mass > best->mass)) best = CollapseStatus{key, mass};
  }
  return best;
}

inline std::optional<CollapseStatus> effective_collapse_status(const SparseState& state,
                                                               double eta) {
  // full-roster grouping: every term is its own class, so the dominant
  // class is just the heaviest term
  const SparseState::Term* best = nullptr;
  for (const auto& term : state.terms())
    if (!best || term.second.log_squared_magnitude() > best->second.log_squared_magnitude())
      best = &term;
  if (!best) return std::nullopt;
  const double mass = best->second.squared_magnitude();
  if (mass < eta) return std::nullopt;
  return CollapseStatus{best->first, mass};
}

}  // namespace grwsim
