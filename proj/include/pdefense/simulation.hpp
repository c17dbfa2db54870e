#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pdefense/dream.hpp"
#include "pdefense/static_design.hpp"

namespace pdefense {

enum class IntruderPolicy { direct, random_maneuver, evasive };
enum class Baseline { pdream, dream };

std::string to_string(IntruderPolicy p);
std::string to_string(Baseline b);
IntruderPolicy parse_policy(const std::string& s);
Baseline parse_baseline(const std::string& s);
Predictor parse_predictor(const std::string& s);
std::string to_string(Predictor p);

struct DefenderState {
  AgentId id = 0;
  Point2 pos;
  double heading = 0.0;  // [0, 2pi)
  double speed = 0.0;
  double v_max = 3.0;
  double sensor_range = 50.0;
  Role role = Role::idle;
  std::vector<TaskId> chain;
};

struct IntruderState {
  AgentId id = 0;
  Point2 pos;
  double heading = 0.0;
  double speed = 3.0;
  double omega_max = 0.0;  // rad/s
  IntruderPolicy policy = IntruderPolicy::random_maneuver;
  bool alive = true;
  Point2 aim;                  // perimeter point the intruder is steering for
  double next_retarget = 0.0;  // simulation time of the next aim update
  bool tracked = false;
  std::mt19937_64 rng;  // private stream, so trajectories do not depend on the defence
};

struct SimConfig {
  double dt = 0.05;
  std::size_t episode_intruder_total = 15;
  std::size_t concurrent_intruders = 6;
  double v_i_max = 3.0;
  double v_i_min = 3.0;
  double v_d_max = 3.0;
  double epsilon = 0.5;
  double pursuit_radius_factor = 3.0;
  double omega_max_deg = 45.0;
  IntruderPolicy policy = IntruderPolicy::random_maneuver;
  // Mean interval between aim re-draws for random_maneuver (0 keeps the first
  // aim for the whole flight) and the replanning period of the evasive policy.
  double retarget_interval = 4.0;
  std::uint64_t seed = 1;
  bool monitoring_enabled = true;
  Baseline baseline = Baseline::pdream;
  // Unset picks per baseline: DREAM extrapolates the velocity; P-DREAM uses the
  // hedged ratio point against manoeuvring intruders and the exact velocity
  // crossing when intruders cannot turn.
  std::optional<Predictor> predictor;
  double alpha = 1.0;
  std::optional<double> kappa;  // defaults to 1e6 * alpha * diameter
  double spawn_radius_factor = 1.2;
  double max_time = 900.0;  // simulated seconds
  std::size_t max_spawn_rounds = 32;
};

double effective_kappa(const SimConfig& cfg, const ConvexPolygon& poly);
Predictor effective_predictor(const SimConfig& cfg);

struct CaptureEvent {
  double time = 0.0;
  AgentId defender = 0;
  AgentId intruder = 0;
  Point2 defender_pos;
  Point2 intruder_pos;
};

struct WorldState {
  double time = 0.0;
  std::size_t step = 0;
  const StaticDesign* design = nullptr;
  TeamState team;
  std::vector<DefenderState> defenders;
  std::vector<IntruderState> intruders;
  std::size_t captures = 0;
  std::size_t intrusions = 0;
  std::size_t intruders_spawned = 0;
  std::size_t guarantee_violations = 0;
  std::size_t priority_violations = 0;  // prioritized tasks not first in a chain
  std::size_t peak_team = 0;
  AgentId next_intruder_id = 0;
  std::vector<CaptureEvent> capture_log;
  std::shared_ptr<const FactorField> field;
};

// Optional hooks for tracing; each receives one JSON line.
using TraceSink = std::function<void(const std::string&)>;

struct StepOptions {
  TraceSink trace;
  bool dump_assignments = false;
};

DefenderState step_defender(const DefenderState& d, Point2 goal, double dt,
                            const ConvexPolygon& poly);

IntruderState step_intruder(const IntruderState& intruder, const WorldState& world, double dt,
                            double v_d_max, double retarget_interval);

struct Neutralization {
  std::vector<std::pair<AgentId, AgentId>> captures;  // (defender, intruder)
  std::vector<AgentId> intrusions;
};

// Marks captured and intruded intruders dead in place.
Neutralization neutralization_check(WorldState& world, double epsilon);

// New world with the initial monitor team and the first wave of intruders.
WorldState make_world(const StaticDesign& design, const SimConfig& cfg);

// Spawn radius around the territory centroid.
double spawn_radius(const StaticDesign& design, const SimConfig& cfg);

void step_world(WorldState& world, const SimConfig& cfg, const StepOptions& opts = {});

struct SimResult {
  bool success = false;
  std::size_t captures = 0;
  std::size_t intrusions = 0;
  std::size_t peak_team_size = 0;
  std::size_t spawn_count = 0;
  std::size_t guarantee_violations = 0;
  std::size_t priority_violations = 0;
  std::size_t steps = 0;
  double sim_time = 0.0;
  double mean_step_ms = 0.0;
  std::vector<CaptureEvent> capture_log;
};

SimResult run_episode(const StaticDesign& design, const SimConfig& cfg,
                      const StepOptions& opts = {});

struct MonteCarloResult {
  double success_rate = 0.0;  // percent
  double ci_low = 0.0;        // Wilson 95 %, percent
  double ci_high = 0.0;
  double mean_peak_team = 0.0;
  double mean_spawns = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<SimResult> episodes;  // in seed order
};

// Wilson score interval in percent.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z = 1.959964);

// Seeds cfg.seed .. cfg.seed + runs - 1, spread over `jobs` threads.
MonteCarloResult monte_carlo(const StaticDesign& design, const SimConfig& cfg, std::size_t runs,
                             std::size_t jobs = 1);

}  // namespace pdefense
