#include "pdefense/assignment.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "pdefense/hungarian.hpp"

namespace pdefense {

namespace {

const Cost& in_edge_cost(const CostMatrix& cm, std::size_t row, std::size_t task) {
  const std::size_t n = cm.defenders();
  return row < n ? cm.first[row][task] : cm.subsequent[row - n][task];
}

}  // namespace

double kappa_cost(double kappa, const Task& task, double alpha, double d) {
  return kappa + kKappaUrgency * kappa / (1.0 + std::max(task.arrival_time, 0.0)) + alpha * d;
}

bool task_order(const Task& a, const Task& b) {
  if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
  return a.id < b.id;
}

Cost first_cost(Point2 defender_pos, double v_d_max, const Task& task, double alpha, double kappa) {
  const double d = distance(task.arrival_point, defender_pos);
  if (d / v_d_max <= task.arrival_time) return Cost::feasible(alpha * d);
  return Cost::infeasible(kappa_cost(kappa, task, alpha, d));
}

Cost subsequent_cost(const Task& task_k, const Task& task_j, double v_d_max, double alpha,
                     double kappa, bool priority_rule) {
  if (task_j.arrival_time <= task_k.arrival_time) return Cost::forbidden();
  const double d = distance(task_j.arrival_point, task_k.arrival_point);
  // Doubled so an infeasible first edge is always preferred to this one.
  if (priority_rule && task_j.prioritized) return Cost::infeasible(kappa_cost(2.0 * kappa, task_j, alpha, d));
  if (d / v_d_max > task_j.arrival_time - task_k.arrival_time) return Cost::infeasible(kappa_cost(kappa, task_j, alpha, d));
  return Cost::feasible(alpha * d);
}

CostMatrix build_cost_matrix(const std::vector<DefenderSpec>& defenders,
                             const std::vector<Task>& tasks, const AssignmentConfig& cfg) {
  if (!std::is_sorted(tasks.begin(), tasks.end(), task_order))
    throw std::invalid_argument("build_cost_matrix: tasks must be sorted by arrival time");
  CostMatrix cm;
  cm.tasks = tasks;
  cm.alpha = cfg.alpha;
  cm.kappa = cfg.kappa;
  const std::size_t m = tasks.size();
  cm.first.assign(defenders.size(), std::vector<Cost>(m));
  for (std::size_t i = 0; i < defenders.size(); ++i)
    for (std::size_t j = 0; j < m; ++j)
      cm.first[i][j] = first_cost(defenders[i].pos, defenders[i].v_max, tasks[j], cfg.alpha, cfg.kappa);
  if (m > 1) {
    cm.subsequent.assign(m - 1, std::vector<Cost>(m));
    for (std::size_t k = 0; k + 1 < m; ++k)
      for (std::size_t j = 0; j < m; ++j)
        cm.subsequent[k][j] = k == j ? Cost::forbidden()
                                     : subsequent_cost(tasks[k], tasks[j], cfg.v_d_max, cfg.alpha,
                                                       cfg.kappa, cfg.priority_rule);
  }
  return cm;
}

void finalize_solution(const CostMatrix& cm, AssignmentSolution& sol) {
  const std::size_t n = cm.defenders();
  const std::size_t m = cm.task_count();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::sort(sol.first_edges.begin(), sol.first_edges.end());
  std::sort(sol.successor_edges.begin(), sol.successor_edges.end());

  // Sum in task order so equal edge sets always give bit-identical totals.
  std::vector<const Cost*> in_cost(m, nullptr);
  for (auto [i, j] : sol.first_edges) in_cost[j] = &cm.first[i][j];
  for (auto [k, j] : sol.successor_edges) in_cost[j] = &cm.subsequent[k][j];
  sol.total_cost = 0.0;
  sol.infeasible_count = 0;
  sol.kappa_tasks.clear();
  for (std::size_t j = 0; j < m; ++j) {
    if (in_cost[j] == nullptr) throw StructurallyInfeasible("solution leaves a task unassigned");
    if (in_cost[j]->is_forbidden()) throw StructurallyInfeasible("solution uses a forbidden edge");
    sol.total_cost += in_cost[j]->value;
    if (in_cost[j]->is_kappa()) {
      ++sol.infeasible_count;
      sol.kappa_tasks.push_back(j);
    }
  }

  std::vector<std::size_t> next(m, none);
  for (auto [k, j] : sol.successor_edges) next[k] = j;
  sol.chains.assign(n, {});
  for (auto [i, j] : sol.first_edges) {
    for (std::size_t t = j; t != none; t = next[t]) sol.chains[i].push_back(t);
  }
}

AssignmentSolution solve_assignment(const CostMatrix& cm) {
  const std::size_t n = cm.defenders();
  const std::size_t m = cm.task_count();
  AssignmentSolution sol;
  if (m == 0) {
    sol.chains.assign(n, {});
    return sol;
  }
  if (n == 0) throw StructurallyInfeasible("solve_assignment: tasks but no defenders");

  // Tasks are matched to distinct in-edge slots: N defender slots followed by
  // M - 1 predecessor slots. Unused slots are simply left unmatched.
  const std::size_t slots = n + m - 1;
  std::vector<std::vector<double>> cost(m, std::vector<double>(slots, 0.0));
  std::vector<std::vector<bool>> available(m, std::vector<bool>(slots, false));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < slots; ++r) {
      const Cost& c = in_edge_cost(cm, r, j);
      if (c.is_forbidden()) continue;
      available[j][r] = true;
      cost[j][r] = c.value;
    }
  }
  const auto match = min_cost_assignment(cost, available);
  if (!match) throw StructurallyInfeasible("solve_assignment: some task has no admissible in-edge");

  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t r = (*match)[j];
    if (r < n)
      sol.first_edges.emplace_back(r, j);
    else
      sol.successor_edges.emplace_back(r - n, j);
  }
  finalize_solution(cm, sol);
  return sol;
}

AssignmentSolution brute_force_assignment(const CostMatrix& cm) {
  const std::size_t n = cm.defenders();
  const std::size_t m = cm.task_count();
  if (n + m > 9) throw std::invalid_argument("brute_force_assignment: instance exceeds N + M <= 9");
  AssignmentSolution sol;
  if (m == 0) {
    sol.chains.assign(n, {});
    return sol;
  }
  const std::size_t slots = n + m - 1;
  std::vector<bool> used(slots, false);
  std::vector<std::size_t> pick(m), best_pick;
  double best = std::numeric_limits<double>::infinity();

  auto rec = [&](auto&& self, std::size_t j, double acc) -> void {
    if (j == m) {
      if (acc < best) {
        best = acc;
        best_pick = pick;
      }
      return;
    }
    for (std::size_t r = 0; r < slots; ++r) {
      if (used[r]) continue;
      const Cost& c = in_edge_cost(cm, r, j);
      if (c.is_forbidden()) continue;
      used[r] = true;
      pick[j] = r;
      self(self, j + 1, acc + c.value);
      used[r] = false;
    }
  };
  rec(rec, 0, 0.0);
  if (best_pick.empty()) throw StructurallyInfeasible("brute_force_assignment: no feasible edge set");

  for (std::size_t j = 0; j < m; ++j) {
    if (best_pick[j] < n)
      sol.first_edges.emplace_back(best_pick[j], j);
    else
      sol.successor_edges.emplace_back(best_pick[j] - n, j);
  }
  finalize_solution(cm, sol);
  return sol;
}

}  // namespace pdefense
