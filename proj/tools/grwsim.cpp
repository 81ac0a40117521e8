// Command-line front end: scripted GRW collapse experiments with
// reproducible seeding and JSON/CSV result emission.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "grwsim/grwsim.hpp"

namespace {

using namespace grwsim;

struct FlagValues {
  std::string config_path;
  std::uint64_t seed = 0;
  int trials = 0;
  int n = 0;
  double p = 0.0;
  double p_all = 0.0;
  double a2 = 0.0;
  double epsilon = 0.0;
  double eta = 0.0;
  double duration = 0.0;
  std::string order;
  std::string out_path;
  std::string events_path;
  std::string format = "json";
  int threads = 1;
  bool include_trials = false;
  std::string n_list, a2_list, p_list;  // sweep grids
};

struct CommonOpts {
  CLI::Option* config = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* trials = nullptr;
  CLI::Option* n = nullptr;
  CLI::Option* p = nullptr;
  CLI::Option* p_all = nullptr;
  CLI::Option* a2 = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* eta = nullptr;
  CLI::Option* duration = nullptr;
  CLI::Option* order = nullptr;
};

CommonOpts add_common(CLI::App* sub, FlagValues& v) {
  CommonOpts o;
  o.config = sub->add_option("--config", v.config_path, "config file (sectioned key = value)");
  o.seed = sub->add_option("--seed", v.seed, "base RNG seed");
  o.trials = sub->add_option("--trials", v.trials, "Monte Carlo trials");
  o.n = sub->add_option("--n", v.n, "number of marbles");
  o.p = sub->add_option("--p", v.p, "fuzzy-link threshold p");
  o.p_all = sub->add_option("--p-all", v.p_all, "separate conjunction threshold p_all");
  o.a2 = sub->add_option("--a2", v.a2, "per-marble in-box mass |a|^2");
  o.epsilon = sub->add_option("--epsilon", v.epsilon, "hit leakage epsilon");
  o.eta = sub->add_option("--eta", v.eta, "effective-collapse threshold eta");
  o.duration = sub->add_option("--duration", v.duration, "simulated window, seconds");
  o.order = sub->add_option("--order", v.order, "measurement order: individual|collective");
  sub->add_option("--out", v.out_path, "output path (stdout when omitted)");
  sub->add_option("--format", v.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--events", v.events_path, "write per-trial hit logs as JSON lines");
  sub->add_option("--threads", v.threads, "trial worker count")->check(CLI::PositiveNumber);
  sub->add_flag("--include-trials", v.include_trials, "embed per-trial results in the summary");
  return o;
}

ScenarioConfig resolve_config(Scenario scenario, const FlagValues& v, const CommonOpts& o) {
  ScenarioConfig cfg = default_config(scenario);
  if (o.config->count()) cfg = parse_config_file(v.config_path, cfg);
  if (o.seed->count()) cfg.seed = v.seed;
  if (o.trials->count()) cfg.trials = v.trials;
  if (o.n->count()) cfg.n_marbles = v.n;
  if (o.p->count()) cfg.fuzzy.p = v.p;
  if (o.p_all->count()) cfg.fuzzy.p_all = v.p_all;
  if (o.a2->count()) cfg.a_sq = v.a2;
  if (o.epsilon->count()) cfg.grw.epsilon_leak = v.epsilon;
  if (o.eta->count()) cfg.grw.eta_collapse = v.eta;
  if (o.duration->count()) cfg.duration = v.duration;
  if (o.order->count()) cfg.order = order_from_string(v.order);
  cfg.validate();
  return cfg;
}

void write_output(const FlagValues& v, const std::string& content) {
  if (v.out_path.empty())
    std::cout << content;
  else
    write_text_file(v.out_path, content);
}

std::vector<double> parse_list(const std::string& key, const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::string item = csv.substr(pos, comma == std::string::npos ? csv.size() - pos
                                                                        : comma - pos);
    if (!item.empty()) out.push_back(detail::parse_double(key, detail::trim(item)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ValidationError("flag " + key + " needs a comma-separated list");
  return out;
}

int run_monte_carlo_command(Scenario scenario, const FlagValues& v, const CommonOpts& o) {
  const ScenarioConfig cfg = resolve_config(scenario, v, o);
  RunManifest manifest;
  manifest.scenario = scenario_name(scenario);
  manifest.cfg = cfg;
  manifest.started_utc = iso8601_utc(std::chrono::system_clock::now());
  const MonteCarloSummary summary = monte_carlo(scenario, cfg, v.threads);
  manifest.finished_utc = iso8601_utc(std::chrono::system_clock::now());

  if (!v.events_path.empty()) write_text_file(v.events_path, events_jsonl(summary));

  if (v.format == "csv") {
    if (scenario == Scenario::kCounting) {
      const AnomalyReport& r = summary.trials.front().anomaly_timeline.front().second;
      write_output(v, std::string(kCountingCsvHeader) +
                          counting_csv_row(cfg.n_marbles, cfg.a_sq, cfg.fuzzy.p, r));
    } else {
      write_output(v, stats_csv(summary));
    }
    return 0;
  }
  const Json doc = result_document(manifest, summary_to_json(summary, v.include_trials));
  write_output(v, doc.dump(2) + "\n");
  return 0;
}

int run_lattice_demo(const FlagValues& v, const CommonOpts& o) {
  const ScenarioConfig cfg = resolve_config(Scenario::kCounting, v, o);
  const LatticeConfig& lat = cfg.lattice;
  GrwParams params = cfg.grw;
  params.sigma_jump = lat.sigma_jump;

  RunManifest manifest;
  manifest.scenario = "lattice-demo";
  manifest.cfg = cfg;
  manifest.started_utc = iso8601_utc(std::chrono::system_clock::now());

  LatticeWavefunction psi = LatticeWavefunction::gaussian(
      static_cast<std::size_t>(lat.points), lat.dx, lat.origin, lat.mean, lat.sigma_psi);
  Rng rng(cfg.seed);
  std::vector<double> centers;
  for (int h = 0; h < lat.hits; ++h) {
    const double center = sample_hit_center(psi, rng, params);
    centers.push_back(center);
    psi = apply_lattice_hit(psi, center, params);
  }
  for (int s = 0; s < lat.steps; ++s) psi = free_evolve(psi, lat.dt, lat.mass, lat.hbar);
  manifest.finished_utc = iso8601_utc(std::chrono::system_clock::now());

  if (v.format == "csv") {
    write_output(v, lattice_csv(psi));
    return 0;
  }
  Json summary;
  summary["hit_centers"] = centers;
  summary["total_mass"] = psi.total_mass();
  summary["mean_position"] = psi.mean_position();
  summary["position_variance"] = psi.position_variance();
  summary["momentum_variance"] = psi.momentum_variance(lat.hbar);
  write_output(v, result_document(manifest, summary).dump(2) + "\n");
  return 0;
}

int run_sweep(const FlagValues& v, const CommonOpts& o) {
  const ScenarioConfig base = resolve_config(Scenario::kCounting, v, o);
  const std::vector<double> ns =
      v.n_list.empty() ? std::vector<double>{2, 3, 5, 10, 20, 45} : parse_list("--n-list", v.n_list);
  const std::vector<double> a2s =
      v.a2_list.empty() ? std::vector<double>{base.a_sq} : parse_list("--a2-list", v.a2_list);
  const std::vector<double> ps =
      v.p_list.empty() ? std::vector<double>{base.fuzzy.p} : parse_list("--p-list", v.p_list);

  RunManifest manifest;
  manifest.scenario = "sweep";
  manifest.cfg = base;
  manifest.started_utc = iso8601_utc(std::chrono::system_clock::now());

  std::string csv = kCountingCsvHeader;
  Json rows = Json::array();
  for (double nd : ns) {
    for (double a2 : a2s) {
      for (double p : ps) {
        ScenarioConfig cfg = base;
        cfg.n_marbles = static_cast<int>(nd);
        cfg.a_sq = a2;
        cfg.fuzzy.p = p;
        cfg.validate();
        const AnomalyReport r = run_counting_anomaly(cfg);
        csv += counting_csv_row(cfg.n_marbles, a2, p, r);
        rows.push_back(Json{{"n", cfg.n_marbles},
                            {"a_sq", a2},
                            {"p", p},
                            {"joint_mass", r.joint_mass},
                            {"log_joint_mass", r.log_joint_mass},
                            {"weak", r.weak_anomaly},
                            {"strong", r.strong_anomaly}});
      }
    }
  }
  manifest.finished_utc = iso8601_utc(std::chrono::system_clock::now());

  if (v.format == "csv") {
    write_output(v, csv);
    return 0;
  }
  Json summary;
  summary["rows"] = rows;
  write_output(v, result_document(manifest, summary).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GRW spontaneous-collapse and fuzzy-link semantics simulator"};
  app.require_subcommand(1);
  FlagValues v;

  CLI::App* single = app.add_subcommand("single-marble", "one marble collapsing under hits");
  const CommonOpts single_opts = add_common(single, v);
  CLI::App* counting = app.add_subcommand("counting", "the deterministic counting anomaly");
  const CommonOpts counting_opts = add_common(counting, v);
  CLI::App* gb = app.add_subcommand("gb-persistence", "anomaly persistence under collapse");
  const CommonOpts gb_opts = add_common(gb, v);
  CLI::App* chain = app.add_subcommand("measure-chain", "marbles, records, and the counter");
  const CommonOpts chain_opts = add_common(chain, v);
  CLI::App* aaad = app.add_subcommand("aaad", "two-particle action at a distance");
  const CommonOpts aaad_opts = add_common(aaad, v);
  CLI::App* lattice = app.add_subcommand("lattice-demo", "1D wavefunction hit dynamics");
  const CommonOpts lattice_opts = add_common(lattice, v);
  CLI::App* sweep = app.add_subcommand("sweep", "anomaly-threshold table over (n, a_sq, p)");
  const CommonOpts sweep_opts = add_common(sweep, v);
  sweep->add_option("--n-list", v.n_list, "comma-separated n grid");
  sweep->add_option("--a2-list", v.a2_list, "comma-separated |a|^2 grid");
  sweep->add_option("--p-list", v.p_list, "comma-separated p grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (single->parsed()) return run_monte_carlo_command(Scenario::kSingleMarble, v, single_opts);
    if (counting->parsed()) return run_monte_carlo_command(Scenario::kCounting, v, counting_opts);
    if (gb->parsed()) return run_monte_carlo_command(Scenario::kGbPersistence, v, gb_opts);
    if (chain->parsed()) return run_monte_carlo_command(Scenario::kMeasureChain, v, chain_opts);
    if (aaad->parsed()) return run_monte_carlo_command(Scenario::kAaad, v, aaad_opts);
    if (lattice->parsed()) return run_lattice_demo(v, lattice_opts);
    if (sweep->parsed()) return run_sweep(v, sweep_opts);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
