#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pdefense/assignment.hpp"
#include "pdefense/hungarian.hpp"

using namespace pdefense;

namespace {

// Every task goes to exactly one defender; each defender visits its tasks in
// time order. Enumerates all N^M owner maps.
double chain_oracle(const CostMatrix& cm) {
  const std::size_t n = cm.defenders(), m = cm.task_count();
  std::vector<std::size_t> owner(m, 0);
  double best = INFINITY;
  for (;;) {
    double total = 0.0;
    bool ok = true;
    for (std::size_t d = 0; d < n && ok; ++d) {
      std::optional<std::size_t> prev;
      for (std::size_t j = 0; j < m && ok; ++j) {
        if (owner[j] != d) continue;
        const Cost& c = prev ? cm.subsequent[*prev][j] : cm.first[d][j];
        if (c.is_forbidden()) ok = false;
        total += c.value;
        prev = j;
      }
    }
    if (ok) best = std::min(best, total);
    std::size_t k = 0;
    while (k < m && ++owner[k] == n) owner[k++] = 0;
    if (k == m) break;
  }
  return best;
}

void check_chains(const CostMatrix& cm, const AssignmentSolution& sol) {
  std::vector<int> seen(cm.task_count(), 0);
  REQUIRE(sol.chains.size() == cm.defenders());
  for (std::size_t d = 0; d < sol.chains.size(); ++d) {
    const auto& chain = sol.chains[d];
    for (std::size_t k = 0; k < chain.size(); ++k) {
      ++seen[chain[k]];
      if (k == 0) {
        CHECK_FALSE(cm.first[d][chain[0]].is_forbidden());
      } else {
        CHECK(cm.tasks[chain[k]].arrival_time > cm.tasks[chain[k - 1]].arrival_time);
        CHECK_FALSE(cm.subsequent[chain[k - 1]][chain[k]].is_forbidden());
      }
    }
  }
  for (int s : seen) CHECK(s == 1);
}

std::vector<Task> random_tasks(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> pos(-20.0, 20.0), time(0.5, 8.0);
  std::bernoulli_distribution coin(0.3);
  std::vector<Task> tasks;
  for (std::size_t j = 0; j < m; ++j) {
    Task t;
    t.id = static_cast<TaskId>(j);
    t.arrival_point = {pos(rng), pos(rng)};
    t.arrival_time = std::round(time(rng) * 2.0) / 2.0;  // coarse, so ties occur
    t.prioritized = coin(rng);
    tasks.push_back(t);
  }
  std::sort(tasks.begin(), tasks.end(), task_order);
  return tasks;
}

}  // namespace

TEST_CASE("hungarian solver matches permutations") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::bernoulli_distribution block(0.2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 1 + trial % 4, cols = rows + trial % 3;
    std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
    std::vector<std::vector<bool>> avail(rows, std::vector<bool>(cols, true));
    for (auto& r : cost)
      for (double& c : r) c = u(rng);
    for (auto& r : avail)
      for (std::size_t c = 0; c < cols; ++c) r[c] = !block(rng);

    std::vector<std::size_t> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      double s = 0.0;
      bool ok = true;
      for (std::size_t r = 0; r < rows; ++r) {
        if (!avail[r][perm[r]]) ok = false;
        s += cost[r][perm[r]];
      }
      if (ok) best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));

    const auto got = min_cost_assignment(cost, avail);
    REQUIRE(got.has_value() == std::isfinite(best));
    if (!got) continue;
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      CHECK(avail[r][(*got)[r]]);
      s += cost[r][(*got)[r]];
    }
    CHECK(s == doctest::Approx(best));
  }
}

TEST_CASE("edge costs") {
  const double kappa = 1e6;
  Task t{1, {10, 0}, 4.0, false, 0};
  CHECK(first_cost({0, 0}, 3.0, t, 1.0, kappa).kind == Cost::Kind::feasible);
  CHECK(first_cost({0, 0}, 3.0, t, 2.0, kappa).value == doctest::Approx(20.0));
  const Cost late = first_cost({0, 0}, 2.0, t, 1.0, kappa);
  CHECK(late.is_kappa());
  CHECK(late.value == doctest::Approx(kappa_cost(kappa, t, 1.0, 10.0)));
  CHECK(late.value > kappa);
  CHECK(late.value < kappa * (1.0 + kKappaUrgency) + 10.0 + 1e-6);

  // Earlier infeasible tasks carry the larger urgency term.
  Task early = t;
  early.arrival_time = 1.0;
  CHECK(kappa_cost(kappa, early, 1.0, 0.0) > kappa_cost(kappa, t, 1.0, 0.0));

  Task a{1, {0, 0}, 2.0, false, 0};
  Task b{2, {3, 0}, 3.0, false, 0};
  CHECK(subsequent_cost(a, b, 3.0, 1.0, kappa).value == doctest::Approx(3.0));
  CHECK(subsequent_cost(b, a, 3.0, 1.0, kappa).is_forbidden());
  Task same = b;
  same.arrival_time = a.arrival_time;
  CHECK(subsequent_cost(a, same, 3.0, 1.0, kappa).is_forbidden());
  CHECK(subsequent_cost(a, b, 1.0, 1.0, kappa).is_kappa());

  Task pb = b;
  pb.prioritized = true;
  const Cost pc = subsequent_cost(a, pb, 3.0, 1.0, kappa);
  CHECK(pc.is_kappa());
  CHECK(pc.value > 2.0 * kappa);
  CHECK(subsequent_cost(a, pb, 3.0, 1.0, kappa, false).value == doctest::Approx(3.0));
}

TEST_CASE("cost matrix rejects unsorted tasks") {
  std::vector<Task> tasks{{1, {0, 0}, 5.0, false, 0}, {2, {0, 0}, 1.0, false, 0}};
  CHECK_THROWS_AS(build_cost_matrix({{{0, 0}, 3.0}}, tasks, {}), std::invalid_argument);
}

TEST_CASE("solver equals the chain oracle and the built-in brute force") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::size_t kappa_instances = 0, forbidden_instances = 0, structural = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial) % 3;
    const std::size_t m = 1 + static_cast<std::size_t>(trial / 3) % 4;
    std::vector<DefenderSpec> defs;
    for (std::size_t i = 0; i < n; ++i) defs.push_back({{pos(rng), pos(rng)}, 3.0});
    const auto tasks = random_tasks(rng, m);
    AssignmentConfig cfg;
    cfg.kappa = 1e5;
    cfg.priority_rule = trial % 2 == 0;
    const CostMatrix cm = build_cost_matrix(defs, tasks, cfg);

    bool has_kappa = false, has_forbidden = false;
    for (const auto& r : cm.first)
      for (const Cost& c : r) has_kappa |= c.is_kappa();
    for (const auto& r : cm.subsequent)
      for (const Cost& c : r) has_forbidden |= c.is_forbidden(), has_kappa |= c.is_kappa();
    kappa_instances += has_kappa;
    forbidden_instances += has_forbidden;

    const double oracle = chain_oracle(cm);
    if (!std::isfinite(oracle)) {
      // More simultaneous tasks than defenders.
      ++structural;
      CHECK_THROWS_AS(solve_assignment(cm), StructurallyInfeasible);
      CHECK_THROWS_AS(brute_force_assignment(cm), StructurallyInfeasible);
      continue;
    }
    const AssignmentSolution sol = solve_assignment(cm);
    const AssignmentSolution bf = brute_force_assignment(cm);
    CHECK(sol.total_cost == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(bf.total_cost == doctest::Approx(oracle).epsilon(1e-12));
    check_chains(cm, sol);
    CHECK(sol.kappa_tasks.size() == sol.infeasible_count);
  }
  CHECK(kappa_instances > 20);
  CHECK(forbidden_instances > 20);
  CHECK(structural < 40);
}

TEST_CASE("prioritized tasks lead their chains") {
  // One fast defender could chain both tasks, but the second is prioritized,
  // so it must become a first task of the second defender.
  std::vector<DefenderSpec> defs{{{0, 0}, 3.0}, {{30, 0}, 3.0}};
  std::vector<Task> tasks{{1, {1, 0}, 1.0, false, 0}, {2, {2, 0}, 3.0, true, 0}};
  AssignmentConfig cfg;
  cfg.kappa = 1e6;
  const AssignmentSolution s = solve_assignment(build_cost_matrix(defs, tasks, cfg));
  CHECK(s.chains[0] == std::vector<std::size_t>{0});
  CHECK(s.chains[1] == std::vector<std::size_t>{1});
  CHECK(s.infeasible_count == 1);

  cfg.priority_rule = false;
  const AssignmentSolution d = solve_assignment(build_cost_matrix(defs, tasks, cfg));
  CHECK(d.chains[0] == std::vector<std::size_t>{0, 1});
  CHECK(d.infeasible_count == 0);
}

TEST_CASE("no defenders with tasks is structurally infeasible") {
  std::vector<Task> tasks{{1, {1, 0}, 1.0, false, 0}};
  CHECK_THROWS_AS(solve_assignment(build_cost_matrix({}, tasks, {})), StructurallyInfeasible);
  const AssignmentSolution empty = solve_assignment(build_cost_matrix({{{0, 0}, 3.0}}, {}, {}));
  CHECK(empty.chains.size() == 1);
  CHECK(empty.total_cost == 0.0);
}

TEST_CASE("solve time stays below a millisecond at N + M = 20") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pos(-30.0, 30.0);
  double worst_ms = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DefenderSpec> defs;
    for (int i = 0; i < 8; ++i) defs.push_back({{pos(rng), pos(rng)}, 3.0});
    const auto tasks = random_tasks(rng, 12);
    AssignmentConfig cfg;
    cfg.kappa = 1e6;
    const CostMatrix cm = build_cost_matrix(defs, tasks, cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const AssignmentSolution s = solve_assignment(cm);
    const auto t1 = std::chrono::steady_clock::now();
    worst_ms = std::max(worst_ms, std::chrono::duration<double, std::milli>(t1 - t0).count());
    check_chains(cm, s);
  }
  MESSAGE("worst solve time " << worst_ms << " ms");
  CHECK(worst_ms < 1.0);
}
