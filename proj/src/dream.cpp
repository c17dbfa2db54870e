#include "pdefense/dream.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace pdefense {

namespace {

std::size_t nearest_index(const std::vector<Point2>& pts, Point2 p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = distance(pts[i], p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::size_t count_covered(const std::vector<Point2>& critical, const std::vector<Point2>& sensors,
                          double range) {
  std::size_t n = 0;
  for (const Point2& c : critical) {
    for (const Point2& s : sensors) {
      if (distance(c, s) <= range) {
        ++n;
        break;
      }
    }
  }
  return n;
}

}  // namespace

std::string to_string(Role r) {
  switch (r) {
    case Role::tasked: return "tasked";
    case Role::monitoring: return "monitoring";
    case Role::idle: return "idle";
  }
  return "idle";
}

AgentId TeamState::add(Point2 pos, Role role) {
  const AgentId id = next_id++;
  active.push_back({id, pos, spawn_v_max, spawn_sensor_range, role});
  ++spawn_count;
  return id;
}

std::vector<Point2> coverage_check(const std::vector<DefenderRecord>& defenders,
                                   const std::vector<Point2>& critical_points, double sensor_range) {
  std::vector<Point2> uncovered;
  for (const Point2& c : critical_points) {
    const bool seen = std::any_of(defenders.begin(), defenders.end(), [&](const DefenderRecord& d) {
      return distance(d.pos, c) <= sensor_range;
    });
    if (!seen) uncovered.push_back(c);
  }
  return uncovered;
}

TeamState spawn_for_tasks(TeamState team, const std::vector<Task>& infeasible_tasks) {
  if (team.reserve_stations.stations.empty())
    throw std::invalid_argument("spawn_for_tasks: no reserve stations");
  for (const Task& t : infeasible_tasks) {
    const std::size_t s = nearest_index(team.reserve_stations.stations, t.arrival_point);
    team.add(team.reserve_stations.stations[s], Role::idle);
  }
  return team;
}

AllocationResult allocate(const TeamState& team, const std::vector<Task>& tasks,
                          const StaticDesign& design, const AllocationConfig& cfg) {
  AllocationResult res;
  res.team = team;
  auto solve = [&] {
    std::vector<DefenderSpec> specs;
    specs.reserve(res.team.active.size());
    for (const auto& d : res.team.active) specs.push_back({d.pos, d.v_max});
    res.costs = build_cost_matrix(specs, tasks, cfg.assignment);
    res.solution = solve_assignment(res.costs);
  };
  // Simultaneous arrivals cannot share a chain, so a team smaller than the
  // largest such group has no matching at all. Add first-task slots until it does.
  auto solve_or_grow = [&] {
    for (std::size_t k = 0;; ++k) {
      try {
        solve();
        return;
      } catch (const StructurallyInfeasible&) {
        if (!cfg.allow_spawn || k >= tasks.size()) throw;
      }
      const std::size_t before = res.team.active.size();
      res.team = spawn_for_tasks(std::move(res.team), {tasks[k]});
      for (std::size_t i = before; i < res.team.active.size(); ++i) res.added.push_back(res.team.active[i].id);
    }
  };
  auto note_added = [&](std::size_t from) {
    for (std::size_t i = from; i < res.team.active.size(); ++i) res.added.push_back(res.team.active[i].id);
  };

  if (!tasks.empty() && res.team.active.empty()) {
    if (!cfg.allow_spawn) throw StructurallyInfeasible("allocate: tasks but no defenders");
    // Seed the team so the program has at least one first-task slot.
    const std::size_t s = nearest_index(res.team.reserve_stations.stations, tasks.front().arrival_point);
    res.team.add(res.team.reserve_stations.stations[s], Role::idle);
    note_added(0);
  }
  solve_or_grow();

  std::size_t previous_q = std::numeric_limits<std::size_t>::max();
  while (cfg.allow_spawn && res.solution.infeasible_count > 0) {
    const std::size_t q = res.solution.infeasible_count;
    if (q >= previous_q || res.spawn_rounds >= cfg.max_spawn_rounds) {
      res.guarantee_violation = true;
      break;
    }
    std::vector<Task> infeasible;
    for (std::size_t j : res.solution.kappa_tasks) infeasible.push_back(res.costs.tasks[j]);
    const std::size_t before = res.team.active.size();
    res.team = spawn_for_tasks(std::move(res.team), infeasible);
    note_added(before);
    previous_q = q;
    ++res.spawn_rounds;
    solve_or_grow();
  }

  const double range = design.sensor_range;
  const auto& stations = res.team.reserve_stations.stations;
  if (cfg.monitoring_enabled && cfg.allow_spawn && !stations.empty()) {
    std::size_t additions = 0;
    while (additions < design.n_monitors) {
      const auto uncovered = coverage_check(res.team.active, design.critical_points, range);
      std::optional<std::size_t> station;
      for (const Point2& c : uncovered) {
        const std::size_t s = nearest_index(stations, c);
        if (distance(stations[s], c) <= range) {
          station = s;
          break;
        }
      }
      if (!station) break;
      const std::size_t before = res.team.active.size();
      res.team.add(stations[*station], Role::monitoring);
      note_added(before);
      ++additions;
    }
  }
  if (cfg.monitoring_enabled)
    res.uncovered_critical = coverage_check(res.team.active, design.critical_points, range);

  // Coverage spawns joined after the last solve: give them empty chains.
  const std::size_t n = res.team.active.size();
  for (std::size_t i = res.costs.first.size(); i < n; ++i) {
    std::vector<Cost> row;
    for (const Task& t : res.costs.tasks)
      row.push_back(first_cost(res.team.active[i].pos, cfg.assignment.v_d_max, t, cfg.assignment.alpha,
                               cfg.assignment.kappa));
    res.costs.first.push_back(std::move(row));
  }
  res.solution.chains.resize(n);

  // Roles and removal of redundant unassigned defenders, newest first.
  std::vector<bool> assigned(n, false), gone(n, false);
  for (auto [i, j] : res.solution.first_edges) assigned[i] = true;
  std::size_t remaining = n;
  for (std::size_t idx = n; idx-- > 0;) {
    DefenderRecord& d = res.team.active[idx];
    if (assigned[idx]) {
      d.role = Role::tasked;
      continue;
    }
    bool exclusive = false;
    if (cfg.monitoring_enabled) {
      for (const Point2& c : design.critical_points) {
        if (distance(d.pos, c) > range) continue;
        bool other = false;
        for (std::size_t k = 0; k < n && !other; ++k)
          other = k != idx && !gone[k] && distance(res.team.active[k].pos, c) <= range;
        if (!other) {
          exclusive = true;
          break;
        }
      }
    }
    if (!exclusive && remaining > cfg.min_team) {
      gone[idx] = true;
      --remaining;
      res.removed.push_back(d.id);
    } else {
      d.role = Role::monitoring;
    }
  }

  if (remaining != n) {
    std::vector<std::size_t> new_index(n, 0);
    std::vector<DefenderRecord> kept;
    for (std::size_t i = 0; i < n; ++i) {
      if (gone[i]) continue;
      new_index[i] = kept.size();
      kept.push_back(res.team.active[i]);
    }
    res.team.active = std::move(kept);
    for (auto& [i, j] : res.solution.first_edges) i = new_index[i];
    std::vector<std::vector<std::size_t>> chains;
    for (std::size_t i = 0; i < n; ++i)
      if (!gone[i]) chains.push_back(std::move(res.solution.chains[i]));
    res.solution.chains = std::move(chains);
    // Columns of the cost matrix rows follow the same compaction.
    std::vector<std::vector<Cost>> first;
    for (std::size_t i = 0; i < n; ++i)
      if (!gone[i]) first.push_back(std::move(res.costs.first[i]));
    res.costs.first = std::move(first);
  }
  return res;
}

std::map<AgentId, Point2> monitor_goals(const std::vector<DefenderRecord>& monitors,
                                        const std::vector<Point2>& critical_points,
                                        double sensor_range, const MonitorGoalContext& ctx) {
  std::map<AgentId, Point2> goals;
  if (monitors.empty()) return goals;
  auto inside = [&](Point2 p) { return ctx.territory ? clamp_into(*ctx.territory, p) : p; };
  auto score = [&](const std::vector<Point2>& plan) {
    std::vector<Point2> sensors = ctx.already_covering;
    sensors.insert(sensors.end(), plan.begin(), plan.end());
    return count_covered(critical_points, sensors, sensor_range);
  };

  std::vector<Point2> current;
  for (const auto& m : monitors) current.push_back(m.pos);
  std::vector<Point2> best_plan = current;
  std::size_t best_score = score(current);

  if (ctx.layout && ctx.layout->size() == monitors.size()) {
    // Nearest vacant layout position, globally shortest pairs first.
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < monitors.size(); ++i)
      for (std::size_t k = 0; k < ctx.layout->size(); ++k)
        pairs.emplace_back(distance(current[i], (*ctx.layout)[k]), i, k);
    std::sort(pairs.begin(), pairs.end());
    std::vector<Point2> plan(monitors.size());
    std::vector<bool> mon_done(monitors.size(), false), pos_done(ctx.layout->size(), false);
    for (auto [d, i, k] : pairs) {
      if (mon_done[i] || pos_done[k]) continue;
      mon_done[i] = pos_done[k] = true;
      plan[i] = inside((*ctx.layout)[k]);
    }
    const std::size_t s = score(plan);
    if (s > best_score) {
      best_score = s;
      best_plan = plan;
    }
  }

  std::vector<Point2> candidates = current;
  if (ctx.layout) candidates.insert(candidates.end(), ctx.layout->begin(), ctx.layout->end());
  for (const Point2& c : critical_points) candidates.push_back(inside(c));
  std::vector<bool> covered(critical_points.size(), false);
  for (std::size_t c = 0; c < critical_points.size(); ++c)
    for (const Point2& s : ctx.already_covering)
      if (distance(critical_points[c], s) <= sensor_range) covered[c] = true;
  std::vector<Point2> greedy(monitors.size());
  for (std::size_t i = 0; i < monitors.size(); ++i) {
    std::size_t best_gain = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    Point2 pick = current[i];
    for (const Point2& cand : candidates) {
      std::size_t gain = 0;
      for (std::size_t c = 0; c < critical_points.size(); ++c)
        if (!covered[c] && distance(critical_points[c], cand) <= sensor_range) ++gain;
      const double dist = distance(cand, current[i]);
      if (gain > best_gain || (gain == best_gain && dist < best_dist)) {
        best_gain = gain;
        best_dist = dist;
        pick = cand;
      }
    }
    greedy[i] = pick;
    for (std::size_t c = 0; c < critical_points.size(); ++c)
      if (distance(critical_points[c], pick) <= sensor_range) covered[c] = true;
  }
  if (score(greedy) > best_score) best_plan = greedy;

  for (std::size_t i = 0; i < monitors.size(); ++i) goals[monitors[i].id] = inside(best_plan[i]);
  return goals;
}

}  // namespace pdefense
