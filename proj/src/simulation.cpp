#include "pdefense/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace pdefense {

namespace {

using nlohmann::json;

json point_json(Point2 p) { return json::array({p.x, p.y}); }

double clamp_turn(double delta, double limit) { return std::clamp(delta, -limit, limit); }

double heading_to(Point2 from, Point2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

Point2 random_perimeter_point(const ConvexPolygon& poly, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, poly.perimeter_length());
  return poly.point_at(u(rng));
}

double next_interval(double mean, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0 / mean);
  return e(rng);
}

// Perimeter sample where the intruder is furthest ahead of the closest defender.
Point2 evasive_aim(const IntruderState& intruder, const WorldState& world, double v_d_max) {
  const ConvexPolygon& poly = world.design->territory;
  constexpr std::size_t kSamples = 128;
  Point2 best = intruder.aim;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < kSamples; ++k) {
    const Point2 s = poly.point_at(poly.perimeter_length() * static_cast<double>(k) / kSamples);
    double defender_time = std::numeric_limits<double>::infinity();
    for (const auto& d : world.defenders)
      defender_time = std::min(defender_time, distance(d.pos, s) / v_d_max);
    const double margin = defender_time - distance(intruder.pos, s) / intruder.speed;
    if (margin > best_margin) {
      best_margin = margin;
      best = s;
    }
  }
  return best;
}

IntruderState spawn_intruder(WorldState& world, const SimConfig& cfg) {
  const StaticDesign& design = *world.design;
  IntruderState in;
  in.id = world.next_intruder_id++;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(world.intruders_spawned)};
  in.rng.seed(seq);
  ++world.intruders_spawned;

  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  in.pos = design.territory.centroid() + spawn_radius(design, cfg) * unit_vector(angle(in.rng));
  in.aim = random_perimeter_point(design.territory, in.rng);
  in.heading = wrap_angle(heading_to(in.pos, in.aim));
  std::uniform_real_distribution<double> speed(cfg.v_i_min, cfg.v_i_max);
  in.speed = cfg.v_i_min < cfg.v_i_max ? speed(in.rng) : cfg.v_i_max;
  in.omega_max = cfg.omega_max_deg * std::numbers::pi / 180.0;
  in.policy = cfg.policy;
  in.next_retarget =
      world.time + (cfg.retarget_interval > 0.0 ? next_interval(cfg.retarget_interval, in.rng)
                                                : std::numeric_limits<double>::infinity());
  return in;
}

// Earliest point where a defender at full speed meets an intruder holding its
// velocity; the intruder's current position when it cannot be met.
Point2 intercept_point(Point2 defender, double v_d, const IntruderState& in) {
  const Point2 r = in.pos - defender;
  const Point2 u = in.speed * unit_vector(in.heading);
  const double a = dot(u, u) - v_d * v_d;
  const double b = 2.0 * dot(r, u);
  const double c = dot(r, r);
  double tau = -1.0;
  if (std::abs(a) < 1e-12) {
    if (b < 0.0) tau = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
        if (t >= 0.0 && (tau < 0.0 || t < tau)) tau = t;
    }
  }
  return tau >= 0.0 ? in.pos + tau * u : in.pos;
}

// Arrival point predicted for the moment the defender would get there, found
// by a few fixed-point passes over a straight-line extrapolation of the
// intruder. Keeps a defender from trailing a point that slides along the
// perimeter as a grazing intruder moves.
Point2 lead_goal(const ConvexPolygon& poly, Point2 defender, double v_d, const IntruderState& in,
                 const ArrivalOptions& opts) {
  const Point2 vel = in.speed * unit_vector(in.heading);
  const Arrival now = arrival_point(poly, in.pos, vel, opts);
  Point2 goal = now.point.point;
  for (int pass = 0; pass < 4; ++pass) {
    const double tau = distance(defender, goal) / v_d;
    const Point2 ahead = in.pos + tau * vel;
    if (contains(poly, ahead)) return now.ray_hit ? now.heading_crossing.point : goal;
    goal = arrival_point(poly, ahead, vel, opts).point.point;
  }
  return goal;
}

void emit(const StepOptions& opts, const json& j) {
  if (opts.trace) opts.trace(j.dump());
}

}  // namespace

std::string to_string(IntruderPolicy p) {
  switch (p) {
    case IntruderPolicy::direct: return "direct";
    case IntruderPolicy::random_maneuver: return "random_maneuver";
    case IntruderPolicy::evasive: return "evasive";
  }
  return "direct";
}

std::string to_string(Baseline b) { return b == Baseline::pdream ? "pdream" : "dream"; }

std::string to_string(Predictor p) { return p == Predictor::eq2 ? "eq2" : "velocity"; }

IntruderPolicy parse_policy(const std::string& s) {
  if (s == "direct") return IntruderPolicy::direct;
  if (s == "random_maneuver") return IntruderPolicy::random_maneuver;
  if (s == "evasive") return IntruderPolicy::evasive;
  throw std::invalid_argument("policy: expected direct, random_maneuver or evasive, got '" + s + "'");
}

Baseline parse_baseline(const std::string& s) {
  if (s == "pdream") return Baseline::pdream;
  if (s == "dream") return Baseline::dream;
  throw std::invalid_argument("baseline: expected pdream or dream, got '" + s + "'");
}

Predictor parse_predictor(const std::string& s) {
  if (s == "eq2") return Predictor::eq2;
  if (s == "velocity") return Predictor::velocity;
  throw std::invalid_argument("predictor: expected eq2 or velocity, got '" + s + "'");
}

double effective_kappa(const SimConfig& cfg, const ConvexPolygon& poly) {
  return cfg.kappa ? *cfg.kappa : 1e6 * cfg.alpha * poly.diameter();
}

Predictor effective_predictor(const SimConfig& cfg) {
  if (cfg.predictor) return *cfg.predictor;
  if (cfg.baseline == Baseline::dream || cfg.omega_max_deg == 0.0) return Predictor::velocity;
  return Predictor::eq2;
}

double spawn_radius(const StaticDesign& design, const SimConfig& cfg) {
  const Point2 c = design.territory.centroid();
  double r = 0.0;
  for (const Point2& p : design.monitoring_region.boundary) r = std::max(r, distance(c, p));
  return cfg.spawn_radius_factor * r;
}

DefenderState step_defender(const DefenderState& d, Point2 goal, double dt,
                            const ConvexPolygon& poly) {
  DefenderState out = d;
  const double dist = distance(d.pos, goal);
  if (dist == 0.0) {
    out.speed = 0.0;
    return out;
  }
  out.heading = wrap_angle(heading_to(d.pos, goal));
  out.speed = std::min(d.v_max, dist / dt);
  const Point2 next = out.speed * dt >= dist ? goal : d.pos + (out.speed * dt) * unit_vector(out.heading);
  // Projection onto a convex set never lengthens a step that starts inside it.
  out.pos = clamp_into(poly, next);
  return out;
}

IntruderState step_intruder(const IntruderState& intruder, const WorldState& world, double dt,
                            double v_d_max, double retarget_interval) {
  IntruderState out = intruder;
  const double limit = intruder.omega_max * dt;
  if (limit > 0.0) {
    double delta = 0.0;
    switch (intruder.policy) {
      case IntruderPolicy::direct:
        delta = clamp_turn(wrap_pi(heading_to(out.pos, out.aim) - out.heading), limit);
        break;
      case IntruderPolicy::random_maneuver: {
        if (retarget_interval > 0.0 && world.time >= out.next_retarget) {
          out.aim = random_perimeter_point(world.design->territory, out.rng);
          out.next_retarget = world.time + next_interval(retarget_interval, out.rng);
        }
        std::uniform_real_distribution<double> noise(-limit, limit);
        const double steer = clamp_turn(wrap_pi(heading_to(out.pos, out.aim) - out.heading), limit);
        delta = clamp_turn(steer + noise(out.rng), limit);
        break;
      }
      case IntruderPolicy::evasive:
        if (world.time >= out.next_retarget) {
          out.aim = evasive_aim(out, world, v_d_max);
          out.next_retarget = world.time + (retarget_interval > 0.0 ? retarget_interval : 1.0);
        }
        delta = clamp_turn(wrap_pi(heading_to(out.pos, out.aim) - out.heading), limit);
        break;
    }
    out.heading = wrap_angle(out.heading + delta);
  }
  out.pos = out.pos + (out.speed * dt) * unit_vector(out.heading);
  return out;
}

Neutralization neutralization_check(WorldState& world, double epsilon) {
  Neutralization n;
  const ConvexPolygon& poly = world.design->territory;
  for (auto& in : world.intruders) {
    if (!in.alive) continue;
    if (!contains(poly, in.pos)) {
      const DefenderState* best = nullptr;
      double best_d = std::numeric_limits<double>::infinity();
      for (const auto& d : world.defenders) {
        const double dd = distance(d.pos, in.pos);
        if (dd <= epsilon && dd < best_d) {
          best_d = dd;
          best = &d;
        }
      }
      if (best) {
        in.alive = false;
        ++world.captures;
        n.captures.emplace_back(best->id, in.id);
        world.capture_log.push_back({world.time, best->id, in.id, best->pos, in.pos});
      }
    } else {
      in.alive = false;
      ++world.intrusions;
      n.intrusions.push_back(in.id);
    }
  }
  return n;
}

WorldState make_world(const StaticDesign& design, const SimConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt: must be positive");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("epsilon: must be positive");
  if (!(cfg.v_d_max > 0.0) || !(cfg.v_i_max > 0.0) || cfg.v_i_min > cfg.v_i_max || cfg.v_i_min <= 0.0)
    throw std::invalid_argument("speeds: need 0 < v_i_min <= v_i_max and v_d_max > 0");
  WorldState w;
  w.design = &design;
  w.field = std::make_shared<const FactorField>(design.factor_field());
  w.team.reserve_stations = design.layout;
  w.team.spawn_v_max = cfg.v_d_max;
  w.team.spawn_sensor_range = design.sensor_range;
  for (const Point2& p : design.monitor_positions) {
    const AgentId id = w.team.add(p, Role::monitoring);
    DefenderState d;
    d.id = id;
    d.pos = p;
    d.v_max = cfg.v_d_max;
    d.sensor_range = design.sensor_range;
    d.role = Role::monitoring;
    w.defenders.push_back(d);
  }
  w.peak_team = w.defenders.size();
  const std::size_t first_wave = std::min(cfg.concurrent_intruders, cfg.episode_intruder_total);
  for (std::size_t i = 0; i < first_wave; ++i) w.intruders.push_back(spawn_intruder(w, cfg));
  return w;
}

void step_world(WorldState& world, const SimConfig& cfg, const StepOptions& opts) {
  const StaticDesign& design = *world.design;
  const ConvexPolygon& poly = design.territory;
  const bool pdream = cfg.baseline == Baseline::pdream;

  // Sensing. Tracks are kept once acquired.
  for (auto& in : world.intruders) {
    if (in.tracked) continue;
    if (!cfg.monitoring_enabled) {
      in.tracked = true;
      continue;
    }
    for (const auto& d : world.defenders)
      if (distance(d.pos, in.pos) <= d.sensor_range) in.tracked = true;
  }

  // Tasks.
  std::vector<Task> tasks;
  std::map<TaskId, const IntruderState*> task_intruder;
  const ArrivalOptions arrival_opts{cfg.v_i_max, true, effective_predictor(cfg)};
  for (const auto& in : world.intruders) {
    if (!in.tracked) continue;
    const Arrival a = arrival_point(poly, in.pos, in.speed * unit_vector(in.heading), arrival_opts);
    const bool prioritized = pdream && (*world.field)(in.pos, design.gamma) >= 0.0;
    tasks.push_back({in.id, a.point.point, a.time, prioritized, in.id});
    task_intruder[in.id] = &in;
  }
  std::sort(tasks.begin(), tasks.end(), task_order);

  // Allocation.
  for (std::size_t i = 0; i < world.defenders.size(); ++i) world.team.active[i].pos = world.defenders[i].pos;
  AllocationConfig acfg;
  acfg.assignment = {cfg.alpha, effective_kappa(cfg, poly), cfg.v_d_max, pdream};
  acfg.monitoring_enabled = cfg.monitoring_enabled;
  acfg.min_team = cfg.monitoring_enabled ? design.n_monitors : 0;
  acfg.max_spawn_rounds = cfg.max_spawn_rounds;
  AllocationResult res = allocate(world.team, tasks, design, acfg);

  if (res.guarantee_violation) {
    ++world.guarantee_violations;
    emit(opts, {{"event", "guarantee_violation"}, {"t", world.time}, {"kappa_edges", res.solution.infeasible_count}});
  }
  for (const Task& t : res.costs.tasks) {
    if (!t.prioritized) continue;
    const std::size_t j = static_cast<std::size_t>(&t - res.costs.tasks.data());
    const bool first = std::any_of(res.solution.first_edges.begin(), res.solution.first_edges.end(),
                                   [&](const auto& e) { return e.second == j; });
    if (!first) ++world.priority_violations;
  }

  std::map<AgentId, DefenderState> previous;
  for (auto& d : world.defenders) previous.emplace(d.id, std::move(d));
  world.team = std::move(res.team);
  world.defenders.clear();
  for (std::size_t i = 0; i < world.team.active.size(); ++i) {
    const DefenderRecord& r = world.team.active[i];
    DefenderState d;
    if (auto it = previous.find(r.id); it != previous.end()) {
      d = std::move(it->second);
    } else {
      d.id = r.id;
      d.pos = r.pos;
      d.v_max = r.v_max;
      d.sensor_range = r.sensor_range;
      emit(opts, {{"event", "spawn"}, {"t", world.time}, {"defender", r.id}, {"pos", point_json(r.pos)}});
    }
    d.role = r.role;
    d.chain.clear();
    for (std::size_t j : res.solution.chains[i]) d.chain.push_back(res.costs.tasks[j].id);
    world.defenders.push_back(std::move(d));
  }
  for (AgentId id : res.removed)
    emit(opts, {{"event", "remove"}, {"t", world.time}, {"defender", id}});
  world.peak_team = std::max(world.peak_team, world.defenders.size());

  // Goals.
  const double pursuit_radius = cfg.pursuit_radius_factor * cfg.epsilon;
  std::vector<Point2> goals(world.defenders.size());
  std::vector<DefenderRecord> monitors;
  MonitorGoalContext ctx;
  ctx.territory = &poly;
  for (std::size_t i = 0; i < world.defenders.size(); ++i) {
    const DefenderState& d = world.defenders[i];
    goals[i] = d.pos;
    if (!d.chain.empty()) {
      const IntruderState& target = *task_intruder.at(d.chain.front());
      goals[i] = distance(d.pos, target.pos) <= pursuit_radius
                     ? clamp_into(poly, intercept_point(d.pos, d.v_max, target))
                     : lead_goal(poly, d.pos, d.v_max, target, arrival_opts);
      ctx.already_covering.push_back(d.pos);
    } else if (d.role == Role::monitoring) {
      monitors.push_back(world.team.active[i]);
    }
  }
  if (!monitors.empty()) {
    if (auto it = design.monitor_layouts.find(monitors.size()); it != design.monitor_layouts.end())
      ctx.layout = it->second;
    const auto mg = monitor_goals(monitors, design.critical_points, design.sensor_range, ctx);
    for (std::size_t i = 0; i < world.defenders.size(); ++i)
      if (auto it = mg.find(world.defenders[i].id); it != mg.end()) goals[i] = it->second;
  }

  if (opts.trace) {
    json step = {{"event", "step"}, {"t", world.time}, {"step", world.step}};
    json ds = json::array();
    for (std::size_t i = 0; i < world.defenders.size(); ++i) {
      const auto& d = world.defenders[i];
      json jd = {{"id", d.id}, {"pos", point_json(d.pos)}, {"role", to_string(d.role)}};
      if (opts.dump_assignments) jd["chain"] = d.chain;
      ds.push_back(jd);
    }
    json is = json::array();
    for (const auto& in : world.intruders)
      is.push_back({{"id", in.id}, {"pos", point_json(in.pos)}, {"tracked", in.tracked}});
    step["defenders"] = ds;
    step["intruders"] = is;
    if (opts.dump_assignments) {
      json ts = json::array();
      for (const Task& t : res.costs.tasks)
        ts.push_back({{"id", t.id}, {"point", point_json(t.arrival_point)}, {"time", t.arrival_time},
                      {"prioritized", t.prioritized}});
      step["tasks"] = ts;
      step["total_cost"] = res.solution.total_cost;
    }
    emit(opts, step);
  }

  // Integration, sub-sampled near the perimeter so capture and intrusion are
  // ordered correctly.
  std::vector<Point2> d_start, d_end, i_start, i_end;
  std::vector<IntruderState> next_intruders;
  for (std::size_t i = 0; i < world.defenders.size(); ++i) {
    d_start.push_back(world.defenders[i].pos);
    world.defenders[i] = step_defender(world.defenders[i], goals[i], cfg.dt, poly);
    d_end.push_back(world.defenders[i].pos);
  }
  bool near_perimeter = false;
  for (const auto& in : world.intruders) {
    IntruderState nx = step_intruder(in, world, cfg.dt, cfg.v_d_max, cfg.retarget_interval);
    const double margin = 2.0 * cfg.epsilon + in.speed * cfg.dt;
    if (std::abs(poly.signed_distance(in.pos)) <= margin) near_perimeter = true;
    i_start.push_back(in.pos);
    i_end.push_back(nx.pos);
    next_intruders.push_back(std::move(nx));
  }
  world.intruders = std::move(next_intruders);
  world.time += cfg.dt;
  const int substeps = near_perimeter ? 10 : 1;
  std::size_t captured_now = 0;
  for (int k = 1; k <= substeps; ++k) {
    const double f = static_cast<double>(k) / substeps;
    for (std::size_t i = 0; i < world.defenders.size(); ++i)
      world.defenders[i].pos = k == substeps ? d_end[i] : d_start[i] + f * (d_end[i] - d_start[i]);
    for (std::size_t i = 0; i < world.intruders.size(); ++i)
      if (world.intruders[i].alive)
        world.intruders[i].pos = k == substeps ? i_end[i] : i_start[i] + f * (i_end[i] - i_start[i]);
    const Neutralization n = neutralization_check(world, cfg.epsilon);
    captured_now += n.captures.size();
    for (auto [d, i] : n.captures)
      emit(opts, {{"event", "capture"}, {"t", world.time}, {"defender", d}, {"intruder", i}});
    for (AgentId i : n.intrusions) emit(opts, {{"event", "intrusion"}, {"t", world.time}, {"intruder", i}});
  }
  std::erase_if(world.intruders, [](const IntruderState& in) { return !in.alive; });
  ++world.step;

  for (std::size_t c = 0; c < captured_now; ++c)
    if (world.intruders_spawned < cfg.episode_intruder_total)
      world.intruders.push_back(spawn_intruder(world, cfg));
}

SimResult run_episode(const StaticDesign& design, const SimConfig& cfg, const StepOptions& opts) {
  WorldState world = make_world(design, cfg);
  SimResult r;
  const auto start = std::chrono::steady_clock::now();
  while (world.intrusions == 0 && world.captures < cfg.episode_intruder_total &&
         world.time < cfg.max_time)
    step_world(world, cfg, opts);
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
  r.captures = world.captures;
  r.intrusions = world.intrusions;
  r.success = world.intrusions == 0 && world.captures == cfg.episode_intruder_total;
  r.peak_team_size = world.peak_team;
  r.spawn_count = world.team.spawn_count;
  r.guarantee_violations = world.guarantee_violations;
  r.priority_violations = world.priority_violations;
  r.steps = world.step;
  r.sim_time = world.time;
  r.mean_step_ms = world.step ? elapsed.count() / static_cast<double>(world.step) : 0.0;
  r.capture_log = std::move(world.capture_log);
  return r;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n, double z) {
  if (n == 0) return {0.0, 100.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
  return {100.0 * std::max(0.0, centre - half), 100.0 * std::min(1.0, centre + half)};
}

MonteCarloResult monte_carlo(const StaticDesign& design, const SimConfig& cfg, std::size_t runs,
                             std::size_t jobs) {
  if (runs == 0) throw std::invalid_argument("runs: must be at least 1");
  MonteCarloResult out;
  out.episodes.resize(runs);
  for (std::size_t i = 0; i < runs; ++i) out.seeds.push_back(cfg.seed + i);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      SimConfig c = cfg;
      c.seed = out.seeds[i];
      out.episodes[i] = run_episode(design, c);
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, runs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  std::size_t wins = 0;
  double peak = 0.0, spawns = 0.0;
  for (const auto& e : out.episodes) {
    wins += e.success ? 1 : 0;
    peak += static_cast<double>(e.peak_team_size);
    spawns += static_cast<double>(e.spawn_count);
  }
  out.success_rate = 100.0 * static_cast<double>(wins) / static_cast<double>(runs);
  std::tie(out.ci_low, out.ci_high) = wilson_interval(wins, runs);
  out.mean_peak_team = peak / static_cast<double>(runs);
  out.mean_spawns = spawns / static_cast<double>(runs);
  return out;
}

}  // namespace pdefense
