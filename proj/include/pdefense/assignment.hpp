#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pdefense/geometry.hpp"

namespace pdefense {

using TaskId = std::int64_t;
using AgentId = std::int64_t;

// Spatio-temporal neutralization task: some defender must be at
// arrival_point no later than arrival_time (seconds from now).
struct Task {
  TaskId id = 0;
  Point2 arrival_point;
  double arrival_time = 0.0;
  bool prioritized = false;
  AgentId source_intruder = 0;
};

// Orders tasks by arrival time, ties by id.
bool task_order(const Task& a, const Task& b);

struct Cost {
  enum class Kind { feasible, kappa, forbidden };
  Kind kind = Kind::feasible;
  double value = 0.0;  // alpha * distance, plus kappa if infeasible; unused when forbidden

  static Cost feasible(double v) { return {Kind::feasible, v}; }
  static Cost infeasible(double kappa) { return {Kind::kappa, kappa}; }
  static Cost forbidden() { return {Kind::forbidden, 0.0}; }
  bool is_forbidden() const { return kind == Kind::forbidden; }
  bool is_kappa() const { return kind == Kind::kappa; }
};

struct AssignmentConfig {
  double alpha = 1.0;
  double kappa = 1e9;
  double v_d_max = 3.0;       // speed used for task-to-task legs
  bool priority_rule = true;  // false reproduces the DREAM baseline
};

// Value of an infeasible edge into `task`: kappa, plus an urgency term below
// kappa * kKappaUrgency that is larger for earlier tasks, plus alpha * d. The
// kappa count dominates; among solutions with equal counts the later tasks are
// given up first, then the shortest travel wins.
inline constexpr double kKappaUrgency = 1e-3;
double kappa_cost(double kappa, const Task& task, double alpha, double d);

// First-task cost: alpha * distance if the defender can reach the arrival
// point in time, kappa_cost otherwise.
Cost first_cost(Point2 defender_pos, double v_d_max, const Task& task, double alpha, double kappa);

// Cost of taking task_j right after task_k. Cases, in order: task_j not later
// than task_k is forbidden; a prioritized task_j costs kappa_cost at 2 * kappa
// (it may only be a first task, even an infeasible one); an unreachable leg
// costs kappa_cost; otherwise alpha * distance.
Cost subsequent_cost(const Task& task_k, const Task& task_j, double v_d_max, double alpha,
                     double kappa, bool priority_rule = true);

struct DefenderSpec {
  Point2 pos;
  double v_max = 0.0;
};

struct CostMatrix {
  std::vector<std::vector<Cost>> first;       // N x M
  std::vector<std::vector<Cost>> subsequent;  // (M-1) x M
  std::vector<Task> tasks;                    // ascending arrival time
  double alpha = 1.0;
  double kappa = 0.0;

  std::size_t defenders() const { return first.size(); }
  std::size_t task_count() const { return tasks.size(); }
};

// Throws std::invalid_argument when tasks are not sorted by task_order.
CostMatrix build_cost_matrix(const std::vector<DefenderSpec>& defenders,
                             const std::vector<Task>& tasks, const AssignmentConfig& cfg);

struct AssignmentSolution {
  std::vector<std::pair<std::size_t, std::size_t>> first_edges;      // (defender, task)
  std::vector<std::pair<std::size_t, std::size_t>> successor_edges;  // (predecessor, task)
  double total_cost = 0.0;
  std::vector<std::vector<std::size_t>> chains;  // per defender, task indices in order
  std::size_t infeasible_count = 0;              // selected kappa edges
  std::vector<std::size_t> kappa_tasks;          // targets of the kappa edges, ascending
};

class StructurallyInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact optimum of the first/subsequent edge selection problem, solved as a
// rectangular assignment of tasks to the stacked [first; subsequent] rows.
AssignmentSolution solve_assignment(const CostMatrix& cm);

// Exhaustive search, for cross-checking. Rejects N + M > 9.
AssignmentSolution brute_force_assignment(const CostMatrix& cm);

// Fills chains, totals, and kappa bookkeeping from the selected edges.
void finalize_solution(const CostMatrix& cm, AssignmentSolution& sol);

}  // namespace pdefense
