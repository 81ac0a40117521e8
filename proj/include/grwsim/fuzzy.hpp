#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grwsim/errors.hpp"
#include "grwsim/lattice.hpp"
#include "grwsim/product_state.hpp"
#include "grwsim/sparse_state.hpp"

namespace grwsim {

/// Fuzzy-link threshold(s). p bounds location talk for a single system;
/// p_all, when set, is the separate threshold applied to joint
/// (conjunction) masses.
struct FuzzyConfig {
  double p = 0.1;
  std::optional<double> p_all;

  void validate() const {
    if (!(p > 0.0 && p < 0.5)) throw ValidationError("p must lie in (0, 0.5)");
    if (p_all && !(*p_all > 0.0 && *p_all < 0.5))
      throw ValidationError("p_all must lie in (0, 0.5)");
  }

  double conjunction_p() const { return p_all ? *p_all : p; }
};

enum class VerdictStatus { kHolds, kComplementHolds, kIndeterminate };

inline const char* verdict_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::kHolds: return "holds";
    case VerdictStatus::kComplementHolds: return "complement_holds";
    default: return "indeterminate";
  }
}

struct Verdict {
  VerdictStatus status = VerdictStatus::kIndeterminate;
  double mass = 0.0;

  bool holds() const { return status == VerdictStatus::kHolds; }
  bool complement_holds() const { return status == VerdictStatus::kComplementHolds; }
};

/// The fuzzy link for one proposition: holds when the supporting mass is
/// at least 1-p, its complement holds when the mass is at most p,
/// indeterminate between (consistent because p < 0.5).
inline Verdict posr_verdict(double mass_in_region, const FuzzyConfig& config) {
  if (mass_in_region < -1e-12 || mass_in_region > 1.0 + 1e-9)
    throw ValidationError("region mass must lie in [0, 1]");
  Verdict v;
  v.mass = mass_in_region;
  if (mass_in_region >= 1.0 - config.p)
    v.status = VerdictStatus::kHolds;
  else if (mass_in_region <= config.p)
    v.status = VerdictStatus::kComplementHolds;
  return v;
}

inline Verdict verdict_with_threshold(double mass, double p) {
  FuzzyConfig c;
  c.p = p;
  return posr_verdict(mass, c);
}

/// Verdicts for a conjunction of per-marble region claims against the
/// conjuncts each holding individually.
struct AnomalyReport {
  std::vector<Verdict> per_marble;
  std::vector<std::string> assignment;  // region label per checked marble
  Verdict conjunction;
  bool weak_anomaly = false;    // every conjunct holds, conjunction does not
  bool strong_anomaly = false;  // every conjunct holds, negation holds
  double joint_mass = 0.0;
  double log_joint_mass = 0.0;

  void finalize() {
    bool all_hold = true;
    for (const auto& v : per_marble) all_hold = all_hold && v.holds();
    weak_anomaly = all_hold && !conjunction.holds();
    strong_anomaly = all_hold && conjunction.complement_holds();
  }
};

/// Joint fuzzy verdict on an explicit assignment (marble index -> region)
/// over a factorized state: the joint mass is the product of per-marble
/// masses, carried in the log domain.
inline Verdict conjunction_verdict(const ProductState& state,
                                   const std::map<int, Region>& assignment,
                                   const FuzzyConfig& config) {
  double log_joint = 0.0;
  for (const auto& [marble, region] : assignment)
    log_joint += state.marble(marble).log_mass(region);
  return verdict_with_threshold(std::exp(log_joint), config.conjunction_p());
}

/// Same over a sparse state: the joint mass is the branch mass of the
/// assigned configuration class.
inline Verdict conjunction_verdict(const SparseState& state,
                                   const std::map<int, int>& assignment,
                                   const FuzzyConfig& config) {
  for (const auto& [sub, label] : assignment) {
    if (sub < 0 || sub >= state.roster().size())
      throw ShapeError("unknown subsystem index " + std::to_string(sub));
    if (label < 0 || label >= static_cast<int>(state.roster().at(sub).alphabet.size()))
      throw ShapeError("label out of alphabet for subsystem " + state.roster().at(sub).name);
  }
  const double mass = state.branch_mass(matches_assignment(assignment));
  return verdict_with_threshold(mass, config.conjunction_p());
}

/// Enumeration-principle check on the conjunction the state itself makes
/// best: each conjunct is the marble's current dominant region.
inline AnomalyReport enumeration_check(const ProductState& state, const FuzzyConfig& config) {
  AnomalyReport r;
  double log_joint = 0.0;
  for (const auto& m : state.marbles()) {
    const Region dom = m.dominant_region();
    r.per_marble.push_back(verdict_with_threshold(m.amp(dom).squared_magnitude(), config.p));
    r.assignment.emplace_back(region_name(dom));
    log_joint += m.log_mass(dom);
  }
  r.log_joint_mass = log_joint;
  r.joint_mass = std::exp(log_joint);
  r.conjunction = verdict_with_threshold(r.joint_mass, config.conjunction_p());
  r.finalize();
  return r;
}

/// Sparse variant over the subsystems named as marbles.
inline AnomalyReport enumeration_check(const SparseState& state,
                                       const std::vector<int>& marble_subsystems,
                                       const FuzzyConfig& config) {
  AnomalyReport r;
  std::map<int, int> assignment;
  for (int sub : marble_subsystems) {
    const std::vector<double> lm = state.subsystem_log_masses(sub);
    int dom = 0;
    for (std::size_t l = 1; l < lm.size(); ++l)
      if (lm[l] > lm[dom]) dom = static_cast<int>(l);
    r.per_marble.push_back(verdict_with_threshold(std::exp(lm[static_cast<std::size_t>(dom)]), config.p));
    r.assignment.push_back(state.roster().at(sub).alphabet[static_cast<std::size_t>(dom)]);
    assignment[sub] = dom;
  }
  r.log_joint_mass = state.log_branch_mass(matches_assignment(assignment));
  r.joint_mass = std::exp(r.log_joint_mass);
  r.conjunction = verdict_with_threshold(r.joint_mass, config.conjunction_p());
  r.finalize();
  return r;
}

struct DualThresholdReport {
  bool consistent = false;               // (1-p)^n >= 1 - p_all
  bool forced_no_marble_in_box = false;  // a_sq < 1 - p
};

/// The two-threshold escape route and where it lands: choosing p small
/// enough to keep (1-p)^n above 1-p_all eventually forces p below
/// 1 - a_sq, at which point no single marble counts as in the box.
inline DualThresholdReport dual_threshold_check(int n, double p, double p_all, double a_sq) {
  if (n < 1) throw ValidationError("n must be >= 1");
  if (!(p > 0.0 && p < 0.5)) throw ValidationError("p must lie in (0, 0.5)");
  if (!(p_all > 0.0 && p_all < 0.5)) throw ValidationError("p_all must lie in (0, 0.5)");
  if (!(a_sq > 0.0 && a_sq <= 1.0)) throw ValidationError("a_sq must lie in (0, 1]");
  DualThresholdReport r;
  r.consistent = std::exp(static_cast<double>(n) * std::log1p(-p)) >= 1.0 - p_all;
  r.forced_no_marble_in_box = a_sq < 1.0 - p;
  return r;
}

struct PropertyIntersectionReport {
  Verdict in_delta;
  Verdict in_delta_prime;
  Verdict in_intersection;
  bool violation = false;
};

/// Property-intersection check on a lattice wavefunction: located in
/// delta and in delta', yet not in their intersection.
inline PropertyIntersectionReport property_intersection_check(const LatticeWavefunction& psi,
                                                              const Interval& delta,
                                                              const Interval& delta_prime,
                                                              const FuzzyConfig& config) {
  PropertyIntersectionReport r;
  r.in_delta = posr_verdict(psi.region_mass(delta), config);
  r.in_delta_prime = posr_verdict(psi.region_mass(delta_prime), config);
  const Interval inter{std::max(delta.lo, delta_prime.lo), std::min(delta.hi, delta_prime.hi)};
  const double inter_mass = inter.lo < inter.hi ? psi.region_mass(inter) : 0.0;
  r.in_intersection = posr_verdict(inter_mass, config);
  r.violation = r.in_delta.holds() && r.in_delta_prime.holds() && !r.in_intersection.holds();
  return r;
}

}  // namespace grwsim
