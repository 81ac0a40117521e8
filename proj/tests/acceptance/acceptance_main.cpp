// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every Monte Carlo criterion runs on a pinned seed, so the
// whole binary is deterministic.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "grwsim/grwsim.hpp"

using namespace grwsim;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {
    start_ = std::chrono::steady_clock::now();
  }

  void require(bool ok, const std::string& detail) {
    if (!ok) {
      failed_details_.push_back(detail);
    }
  }

  double elapsed_s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void finish(double budget_s = 0.0) {
    const double secs = elapsed_s();
    if (budget_s > 0.0 && secs >= budget_s)
      failed_details_.push_back("runtime " + std::to_string(secs) + " s over budget " +
                                std::to_string(budget_s) + " s");
    if (failed_details_.empty()) {
      std::printf("[PASS] criterion %2d: %s (%.2f s)\n", id_, title_.c_str(), secs);
    } else {
      ++g_failures;
      std::printf("[FAIL] criterion %2d: %s (%.2f s)\n", id_, title_.c_str(), secs);
      for (const auto& d : failed_details_) std::printf("       - %s\n", d.c_str());
    }
  }

 private:
  int id_;
  std::string title_;
  std::vector<std::string> failed_details_;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double stat(const MonteCarloSummary& s, const std::string& key) {
  for (const auto& [k, v] : s.stats)
    if (k == key) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

double pow_mult(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// ---------------------------------------------------------------------

void criterion_1_anomaly_thresholds() {
  Criterion c(1, "anomaly thresholds at a_sq = 0.95, p = 0.1 (n = 2, 3, 45)");
  ScenarioConfig cfg = default_config(Scenario::kCounting);

  cfg.n_marbles = 2;
  AnomalyReport r2 = run_counting_anomaly(cfg);
  c.require(std::fabs(r2.joint_mass - 0.9025) < 1e-9, "n=2 joint " + fmt(r2.joint_mass));
  c.require(!r2.weak_anomaly && !r2.strong_anomaly, "n=2 must show no anomaly");

  cfg.n_marbles = 3;
  AnomalyReport r3 = run_counting_anomaly(cfg);
  c.require(std::fabs(r3.joint_mass - 0.857375) < 1e-9, "n=3 joint " + fmt(r3.joint_mass));
  c.require(r3.weak_anomaly && !r3.strong_anomaly, "weak anomaly must first appear at n=3");

  cfg.n_marbles = 44;
  AnomalyReport r44 = run_counting_anomaly(cfg);
  c.require(r44.weak_anomaly && !r44.strong_anomaly, "n=44 must not yet be strong");

  cfg.n_marbles = 45;
  AnomalyReport r45 = run_counting_anomaly(cfg);
  c.require(std::fabs(r45.joint_mass - pow_mult(0.95, 45)) < 1e-9,
            "n=45 joint " + fmt(r45.joint_mass));
  c.require(r45.joint_mass <= 0.1, "n=45 joint must be <= p");
  c.require(r45.strong_anomaly, "strong anomaly must first appear at n=45");
  c.finish(1.0);
}

void criterion_2_collapse_timescale() {
  Criterion c(2, "first-hit timescale: 1/(N lambda) at N = 6e23 and N = 1e15");
  GrwParams params;
  Rng rng(2);
  const int samples = 1000;

  for (const double n_particles : {6e23, 1e15}) {
    const std::vector<double> counts = {n_particles};
    double sum = 0.0;
    for (int i = 0; i < samples; ++i)
      sum += sample_next_hit(rng, params, counts, 0.0)->time;
    const double mean = sum / samples;
    const double want = 1.0 / (params.lambda_hit * n_particles);
    c.require(std::fabs(mean - want) / want < 0.03,
              "N=" + fmt(n_particles) + " mean " + fmt(mean) + " vs " + fmt(want));
    if (n_particles == 6e23)
      c.require(mean < 1e-6, "marble-scale collapse must beat one microsecond");
  }
  c.finish(5.0);
}

void criterion_3_born_frequencies() {
  Criterion c(3, "Born frequencies: masses (0.7, 0.3) land 'in' at 0.7 +/- 0.014");
  ScenarioConfig cfg = default_config(Scenario::kSingleMarble);
  cfg.a_sq = 0.7;
  cfg.trials = 10000;
  cfg.seed = 424243;
  cfg.duration = 5e-8;
  const MonteCarloSummary s = monte_carlo(Scenario::kSingleMarble, cfg, 4);
  const double freq = stat(s, "in_frequency");
  c.require(std::fabs(freq - 0.7) < 0.014, "in frequency " + fmt(freq));
  c.require(stat(s, "collapsed_fraction") == 1.0, "every trial must reach collapse");
  c.finish(10.0);
}

void criterion_4_non_manifestation() {
  Criterion c(4, "non-manifestation over 10^3 chain trials, both orders, n = 10");
  for (const MeasureOrder order :
       {MeasureOrder::kIndividualFirst, MeasureOrder::kCollectiveFirst}) {
    ScenarioConfig cfg = default_config(Scenario::kMeasureChain);
    cfg.n_marbles = 10;
    cfg.trials = 1000;
    cfg.seed = 515151;
    cfg.order = order;
    const MonteCarloSummary s = monte_carlo(Scenario::kMeasureChain, cfg, 4);
    const std::string tag = order_name(order);
    c.require(stat(s, "manifestation_events_total") == 0.0,
              tag + ": manifestation events " + fmt(stat(s, "manifestation_events_total")));
    c.require(stat(s, "pointer_agreement_all") == 1.0,
              tag + ": counter must equal the 'in' record count at every collapse");
    c.require(stat(s, "collapsed_fraction") == 1.0, tag + ": every trial must collapse");
    for (const auto& t : s.trials)
      if (t.manifestation_events != 0) c.require(false, tag + ": trial with manifestation");
  }
  c.finish(60.0);
}

void criterion_5_counter_statistics() {
  Criterion c(5, "counter statistics: O=k ~ binomial(10, 0.95), chi-square at 1%");
  ScenarioConfig cfg = default_config(Scenario::kMeasureChain);
  cfg.n_marbles = 10;
  cfg.a_sq = 0.95;
  cfg.trials = 10000;
  cfg.seed = 616161;
  const MonteCarloSummary s = monte_carlo(Scenario::kMeasureChain, cfg, 4);

  // binomial pmf by direct multiplication; bins pooled to expectation >= 5
  std::vector<double> expected, observed;
  double e_pool = 0.0, o_pool = 0.0;
  for (int k = 0; k <= 10; ++k) {
    double pmf = 1.0;
    for (int i = 0; i < k; ++i) pmf *= 0.95;
    for (int i = 0; i < 10 - k; ++i) pmf *= 0.05;
    double comb = 1.0;
    for (int i = 0; i < k; ++i) comb = comb * (10 - i) / (i + 1);
    e_pool += cfg.trials * comb * pmf;
    o_pool += static_cast<double>(s.counter_histogram[static_cast<std::size_t>(k)]);
    if (e_pool >= 5.0) {
      expected.push_back(e_pool);
      observed.push_back(o_pool);
      e_pool = o_pool = 0.0;
    }
  }
  if (e_pool > 0.0) {
    expected.back() += e_pool;
    observed.back() += o_pool;
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i)
    chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  // 1% critical values for df = bins - 1
  const double kCrit[] = {0.0, 6.635, 9.210, 11.345, 13.277, 15.086, 16.812};
  const std::size_t df = expected.size() - 1;
  c.require(df >= 1 && df <= 6, "df " + fmt(static_cast<double>(df)));
  c.require(chi2 < kCrit[df],
            "chi2 " + fmt(chi2) + " over the 1% critical value " + fmt(kCrit[df]));
  c.finish();
}

void criterion_6_oracle_equivalence() {
  Criterion c(6, "factorized vs sparse dynamics: branch-mass TV < 1e-9, 100 trials");
  Rng meta(717171);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(meta.uniform() * 7);
    std::vector<TwoRegionMarble> ms;
    for (int i = 0; i < n; ++i)
      ms.push_back(TwoRegionMarble::from_in_mass(0.05 + 0.9 * meta.uniform(), i));
    const ProductState start(std::move(ms));
    GrwParams params;
    params.epsilon_leak = trial % 2 ? 1e-12 : 1e-4;
    const int hits = 1 + static_cast<int>(meta.uniform() * 25);
    const std::uint64_t seed = meta.next_u64();

    Rng rng_a(seed);
    ProductState factorized = start;
    for (int h = 0; h < hits; ++h) {
      const int target = static_cast<int>(rng_a.uniform() * n);
      factorized = apply_marble_hit(factorized, target, rng_a, params).first;
    }
    Rng rng_b(seed);
    SparseState sparse = expand(start);
    for (int h = 0; h < hits; ++h) {
      const int target = static_cast<int>(rng_b.uniform() * n);
      sparse = apply_sparse_hit(sparse, target, rng_b, params).first;
    }

    const SparseState oracle = expand(factorized);
    double tv = 0.0;
    for (std::size_t i = 0; i < oracle.term_count(); ++i)
      tv += std::fabs(oracle.terms()[i].second.squared_magnitude() -
                      sparse.terms()[i].second.squared_magnitude());
    worst = std::max(worst, 0.5 * tv);
  }
  c.require(worst < 1e-9, "worst total variation " + fmt(worst));
  c.finish();
}

void criterion_7_product_preservation() {
  Criterion c(7, "product preservation: 100 marble-1 hits, all bipartitions rank-one");
  GrwParams params;
  Rng rng(818181);
  const int n = 6;
  ProductState state = ProductState::uniform(n, 0.95);
  for (int h = 0; h < 100; ++h) state = apply_marble_hit(state, 0, rng, params).first;
  const SparseState s = expand(state);
  double worst = 0.0;
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    std::set<int> left;
    for (int b = 0; b < n; ++b)
      if (mask & (1 << b)) left.insert(b);
    worst = std::max(worst, schmidt_rank_one_check(s, left).deviation);
  }
  c.require(worst < 1e-10, "worst Schmidt deviation " + fmt(worst));
  c.finish();
}

void criterion_8_anomaly_persistence() {
  Criterion c(8, "anomaly persistence: weak anomaly at every event, 100 trials");
  ScenarioConfig cfg = default_config(Scenario::kGbPersistence);
  cfg.n_marbles = 45;
  cfg.a_sq = 0.95;
  cfg.fuzzy.p = 0.1;
  cfg.trials = 100;
  cfg.seed = 919191;
  cfg.duration = 1e-9;
  const MonteCarloSummary s = monte_carlo(Scenario::kGbPersistence, cfg, 4);
  c.require(stat(s, "weak_every_event") == 1.0, "weak anomaly must hold at every event");
  c.require(stat(s, "initial_strong") == 1.0, "the prepared state must be strongly anomalous");
  c.require(stat(s, "events_total") > 1000.0,
            "events " + fmt(stat(s, "events_total")) + " (dynamics must actually run)");
  c.finish();
}

void criterion_9_action_at_a_distance() {
  Criterion c(9, "action at a distance: right switch at |b|^2 = 0.05, silent control");
  ScenarioConfig cfg = default_config(Scenario::kAaad);
  cfg.a_sq = 0.95;
  cfg.trials = 10000;
  cfg.seed = 101010;
  const MonteCarloSummary s = monte_carlo(Scenario::kAaad, cfg, 4);
  const double freq = stat(s, "right_switch_frequency");
  const double sigma3 = 3.0 * std::sqrt(0.05 * 0.95 / cfg.trials);
  c.require(std::fabs(freq - 0.05) < sigma3, "switch frequency " + fmt(freq));
  c.require(stat(s, "control_hits_total") == 0.0,
            "control hits " + fmt(stat(s, "control_hits_total")));
  c.require(stat(s, "collapsed_fraction") == 1.0, "measured phase must always collapse");
  c.finish();
}

void criterion_10_lattice_fidelity() {
  Criterion c(10, "lattice fidelity: width identity, KS, Born split, norm drift");
  GrwParams params;
  params.sigma_jump = 1.0;

  {  // posterior width: sigma_psi = sigma_jump -> variance sigma^2/2
    const auto psi = LatticeWavefunction::gaussian(4096, 1.0 / 32.0, -64.0, 0.0, 1.0);
    const double var = apply_lattice_hit(psi, 0.0, params).position_variance();
    c.require(std::fabs(var - 0.5) / 0.5 < 1e-6, "posterior variance " + fmt(var));
  }
  {  // KS distance between sampler and its density
    const auto psi = LatticeWavefunction::two_bump(2048, 1.0 / 16.0, -64.0, -10.0, 1.5, 0.7,
                                                   10.0, 1.0, 0.3);
    const HitCenterSampler sampler(psi, params);
    Rng rng(111213);
    const int draws = 10000;
    std::vector<double> xs(static_cast<std::size_t>(draws));
    for (int i = 0; i < draws; ++i) xs[static_cast<std::size_t>(i)] = sampler.sample(rng);
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double f = sampler.cdf(xs[static_cast<std::size_t>(i)]);
      ks = std::max(ks, std::fabs(f - static_cast<double>(i) / draws));
      ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / draws - f));
    }
    c.require(ks < 0.02, "KS statistic " + fmt(ks));
  }
  {  // two-bump Born split of sampled hit centers
    const auto psi = LatticeWavefunction::two_bump(4096, 1.0 / 16.0, -128.0, -20.0, 1.0, 0.5,
                                                   20.0, 1.0, 0.5);
    const HitCenterSampler sampler(psi, params);
    Rng rng(141516);
    int left = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
      if (sampler.sample(rng) < 0.0) ++left;
    const double freq = left / static_cast<double>(draws);
    c.require(std::fabs(freq - 0.5) < 0.015, "left-bump frequency " + fmt(freq));
  }
  {  // free-evolution norm drift over 1000 steps
    auto psi = LatticeWavefunction::gaussian(1024, 1.0 / 8.0, -64.0, 0.0, 2.0);
    for (int s = 0; s < 1000; ++s) psi = free_evolve(psi, 0.01, 1.0);
    const double drift = std::fabs(psi.total_mass() - 1.0);
    c.require(drift < 1e-8, "norm drift " + fmt(drift));
  }
  c.finish();
}

void criterion_11_property_intersection() {
  Criterion c(11, "property intersection: three-bin violation at p = 0.1, none at 0.49");
  std::vector<Amplitude> amps(48);
  for (std::size_t i = 0; i < 48; ++i) {
    const double mass = i < 16 ? 0.06 / 16.0 : (i < 32 ? 0.88 / 16.0 : 0.06 / 16.0);
    amps[i] = Amplitude::from_log_mass(std::log(mass));
  }
  const LatticeWavefunction psi(std::move(amps), 1.0, 0.0);
  const Interval delta{0.0, 32.0}, delta_prime{16.0, 48.0};

  FuzzyConfig tight;
  tight.p = 0.1;
  const PropertyIntersectionReport flagged =
      property_intersection_check(psi, delta, delta_prime, tight);
  c.require(flagged.violation, "p = 0.1 must flag the violation");
  c.require(std::fabs(flagged.in_delta.mass - 0.94) < 1e-9, "delta mass");
  c.require(std::fabs(flagged.in_intersection.mass - 0.88) < 1e-9, "intersection mass");

  FuzzyConfig loose;
  loose.p = 0.49;
  const PropertyIntersectionReport unflagged =
      property_intersection_check(psi, delta, delta_prime, loose);
  c.require(!unflagged.violation, "p = 0.49 must not flag a violation");
  c.finish();
}

}  // namespace

int main() {
  criterion_1_anomaly_thresholds();
  criterion_2_collapse_timescale();
  criterion_3_born_frequencies();
  criterion_4_non_manifestation();
  criterion_5_counter_statistics();
  criterion_6_oracle_equivalence();
  criterion_7_product_preservation();
  criterion_8_anomaly_persistence();
  criterion_9_action_at_a_distance();
  criterion_10_lattice_fidelity();
  criterion_11_property_intersection();
  if (g_failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
