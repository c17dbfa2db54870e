#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdefense/assignment.hpp"
#include "pdefense/static_design.hpp"

namespace pdefense {

enum class Role { tasked, monitoring, idle };

struct DefenderRecord {
  AgentId id = 0;
  Point2 pos;
  double v_max = 0.0;
  double sensor_range = 0.0;
  Role role = Role::idle;
};

struct TeamState {
  std::vector<DefenderRecord> active;
  ReserveLayout reserve_stations;
  std::size_t spawn_count = 0;  // cumulative, including the initial team
  AgentId next_id = 0;
  // Parameters given to newly spawned defenders.
  double spawn_v_max = 3.0;
  double spawn_sensor_range = 50.0;

  AgentId add(Point2 pos, Role role);
};

// Critical points outside every active defender's sensor disc.
std::vector<Point2> coverage_check(const std::vector<DefenderRecord>& defenders,
                                   const std::vector<Point2>& critical_points, double sensor_range);

// One new defender per task, each at the reserve station nearest that task's
// arrival point.
TeamState spawn_for_tasks(TeamState team, const std::vector<Task>& infeasible_tasks);

struct AllocationConfig {
  AssignmentConfig assignment;
  bool monitoring_enabled = true;
  bool allow_spawn = true;
  // Unassigned defenders are never removed below this team size.
  std::size_t min_team = 0;
  std::size_t max_spawn_rounds = 32;
};

struct AllocationResult {
  TeamState team;
  CostMatrix costs;
  AssignmentSolution solution;  // defender indices refer to team.active
  std::vector<AgentId> added;
  std::vector<AgentId> removed;
  std::vector<Point2> uncovered_critical;
  // Set when a spawn round failed to reduce the number of kappa edges.
  bool guarantee_violation = false;
  std::size_t spawn_rounds = 0;
};

// One pass of the resource allocation loop: solve; spawn a defender per kappa
// edge and re-solve while that keeps helping; top up monitoring coverage from
// the reserve stations; then drop unassigned defenders that no critical point
// depends on exclusively. Tasks must be sorted by task_order.
AllocationResult allocate(const TeamState& team, const std::vector<Task>& tasks,
                          const StaticDesign& design, const AllocationConfig& cfg);

struct MonitorGoalContext {
  const ConvexPolygon* territory = nullptr;         // goals are clamped into it
  std::vector<Point2> already_covering;             // sensor centres of tasked defenders
  std::optional<std::vector<Point2>> layout;        // optimal positions for this team size
};

// Goal for each monitoring defender. Three plans are scored by covered
// critical points: stay put, the optimal layout (nearest vacant position per
// defender), and a greedy sequential coverage plan. The best plan wins; ties
// prefer staying put, then the layout.
std::map<AgentId, Point2> monitor_goals(const std::vector<DefenderRecord>& monitors,
                                        const std::vector<Point2>& critical_points,
                                        double sensor_range, const MonitorGoalContext& ctx = {});

std::string to_string(Role r);

}  // namespace pdefense
