// Command-line driver: static design, single episodes, and Monte-Carlo sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdefense/config.hpp"
#include "pdefense/report.hpp"
#include "pdefense/simulation.hpp"

namespace fs = std::filesystem;
using namespace pdefense;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::size_t jobs = 1;
  std::string out = "out";
  bool strict = false;
  bool dump_assignments = false;
  std::optional<std::string> predictor;
  std::optional<std::string> baseline;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

RunConfig prepare(const Options& o) {
  RunConfig cfg = load_run_config(o.config);
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.predictor) cfg.sim.predictor = parse_predictor(*o.predictor);
  if (o.baseline) {
    cfg.sim.baseline = parse_baseline(*o.baseline);
    cfg.sweep.baselines = {cfg.sim.baseline};
  }
  if (o.runs) cfg.sweep.runs = *o.runs;
  fs::create_directories(o.out);
  return cfg;
}

StaticDesign run_design(const RunConfig& cfg) {
  DesignConfig dc = cfg.design;
  if (cfg.auto_stations) dc.initial_n_stations = 1;
  return design_layout(territory_of(cfg), dc);
}

void save_design(const StaticDesign& d, const RunConfig& cfg, const fs::path& out) {
  write_file(out / "design.json", design_to_json(d, cfg.hash).dump(2) + "\n");
  std::ofstream csv(out / "regions.csv");
  write_regions_csv(csv, d);
}

// Reuses out/design.json when it was produced from the same configuration.
StaticDesign design_for(const RunConfig& cfg, const fs::path& out) {
  const fs::path cached = out / "design.json";
  if (fs::exists(cached)) {
    std::ifstream f(cached);
    const auto j = nlohmann::json::parse(f, nullptr, false);
    if (!j.is_discarded() && j.value("config_hash", "") == cfg.hash) return design_from_json(j);
  }
  StaticDesign d = run_design(cfg);
  save_design(d, cfg, out);
  return d;
}

int cmd_design(const Options& o) {
  const RunConfig cfg = prepare(o);
  const StaticDesign d = run_design(cfg);
  save_design(d, cfg, o.out);
  std::printf("stations %zu (objective %.4f), monitors n_min = %zu, rs_min = %.4f, critical points %zu\n",
              d.layout.n(), d.station_objective, d.n_monitors, d.rs_min, d.critical_points.size());
  std::printf("wrote %s and %s\n", (fs::path(o.out) / "design.json").c_str(),
              (fs::path(o.out) / "regions.csv").c_str());
  return 0;
}

int cmd_simulate(const Options& o) {
  const RunConfig cfg = prepare(o);
  const StaticDesign d = design_for(cfg, o.out);
  std::ofstream trace(fs::path(o.out) / "trace.jsonl");
  StepOptions opts;
  opts.dump_assignments = o.dump_assignments;
  opts.trace = [&](const std::string& line) { trace << line << '\n'; };
  const SimResult r = run_episode(d, cfg.sim, opts);
  write_file(fs::path(o.out) / "summary.json", summary_to_json(r, cfg.sim, cfg.hash).dump(2) + "\n");
  std::printf("%s: %s, captures %zu, intrusions %zu, peak team %zu, spawns %zu, %.3f ms/step\n",
              to_string(cfg.sim.baseline).c_str(), r.success ? "success" : "failure", r.captures,
              r.intrusions, r.peak_team_size, r.spawn_count, r.mean_step_ms);
  if (r.guarantee_violations > 0) {
    std::fprintf(stderr, "allocation guarantee violated in %zu steps\n", r.guarantee_violations);
    if (o.strict) return 3;
  }
  return 0;
}

int cmd_montecarlo(const Options& o) {
  const RunConfig cfg = prepare(o);
  const StaticDesign d = design_for(cfg, o.out);
  std::ofstream sweep(fs::path(o.out) / "sweep.csv");
  std::ofstream episodes(fs::path(o.out) / "episodes.csv");
  sweep << "# config_hash " << cfg.hash << "\n"
        << "baseline,omega_deg,M,runs,success_rate,ci_low,ci_high,mean_peak_team,mean_spawns\n";
  episodes << "# config_hash " << cfg.hash << "\n"
           << "baseline,omega_deg,M,seed,success,captures,intrusions,peak_team,spawns\n";
  for (Baseline b : cfg.sweep.baselines) {
    for (double omega : cfg.sweep.omegas_deg) {
      for (std::size_t m : cfg.sweep.concurrent) {
        SimConfig sc = cfg.sim;
        sc.baseline = b;
        sc.omega_max_deg = omega;
        sc.concurrent_intruders = m;
        const MonteCarloResult r = monte_carlo(d, sc, cfg.sweep.runs, o.jobs);
        char row[256];
        std::snprintf(row, sizeof row, "%s,%g,%zu,%zu,%.2f,%.2f,%.2f,%.3f,%.3f\n", to_string(b).c_str(), omega, m,
                      cfg.sweep.runs, r.success_rate, r.ci_low, r.ci_high, r.mean_peak_team, r.mean_spawns);
        sweep << row << std::flush;
        std::printf("%s", row);
        for (std::size_t i = 0; i < r.episodes.size(); ++i) {
          const SimResult& e = r.episodes[i];
          episodes << to_string(b) << ',' << omega << ',' << m << ',' << r.seeds[i] << ',' << (e.success ? 1 : 0)
                   << ',' << e.captures << ',' << e.intrusions << ',' << e.peak_team_size << ',' << e.spawn_count
                   << '\n';
        }
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perimeter defence with prioritized multi-task assignment"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Configuration file (TOML subset)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  };
  auto sim_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed (overrides simulation.seed)");
    sub->add_option("--predictor", o.predictor, "Arrival predictor")->check(CLI::IsMember({"eq2", "velocity"}));
    sub->add_option("--baseline", o.baseline, "Allocation scheme")->check(CLI::IsMember({"pdream", "dream"}));
  };

  CLI::App* design = app.add_subcommand("design", "Compute the static layout; writes design.json and regions.csv");
  common(design);

  CLI::App* simulate = app.add_subcommand("simulate", "Run one episode; writes trace.jsonl and summary.json");
  common(simulate);
  sim_flags(simulate);
  simulate->add_flag("--strict", o.strict, "Exit non-zero if the allocation guarantee was violated");
  simulate->add_flag("--dump-assignments", o.dump_assignments, "Include tasks and chains in the trace");

  CLI::App* mc = app.add_subcommand("montecarlo", "Sweep baselines, manoeuvre limits and M; writes sweep.csv");
  common(mc);
  sim_flags(mc);
  mc->add_option("--runs", o.runs, "Episodes per sweep cell")->check(CLI::PositiveNumber);
  mc->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (design->parsed()) return cmd_design(o);
    if (simulate->parsed()) return cmd_simulate(o);
    return cmd_montecarlo(o);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DesignError& e) {
    std::fprintf(stderr, "design error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
