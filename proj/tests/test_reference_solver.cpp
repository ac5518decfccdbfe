#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ccucp/errors.hpp"
#include "ccucp/instance.hpp"
#include "ccucp/rational.hpp"
#include "ccucp/reference_solver.hpp"
#include "ccucp/rng.hpp"
#include "ccucp/sampler.hpp"
#include "ccucp/scenario_model.hpp"
#include "helpers.hpp"

using namespace ccucp;

namespace {

std::vector<std::vector<int>> pattern(std::initializer_list<std::initializer_list<int>> rows) {
  std::vector<std::vector<int>> u;
  for (const auto& row : rows) u.emplace_back(row);
  return u;
}

// Switching flags implied by a commitment path: starts and stops are the
// positive and negative parts of the per-period change.
void check_switching_consistent(const UcpInstance& inst, const Solution& sol) {
  for (int g = 0; g < inst.num_generators(); ++g) {
    for (int t = 0; t < inst.horizon; ++t) {
      const int prev = t == 0 ? inst.initial.u0[g] : sol.u[g][t - 1];
      const int delta = sol.u[g][t] - prev;
      CHECK(sol.z_on[g][t] == std::max(delta, 0));
      CHECK(sol.z_off[g][t] == std::max(-delta, 0));
    }
  }
}

// Exhaustive drop-set search over ALL scenario subsets of the allowed size,
// with no pruning: the ground truth the production solver must match.
struct BruteForce {
  bool feasible = false;
  Rational cost;
};

BruteForce brute_force_exact(const UcpInstance& inst, const ScenarioSet& set, double p_level) {
  const int quota = reliability_quota(set.n, p_level);
  const int drops = set.n - quota;
  BruteForce best;

  std::vector<int> drop_set;
  auto evaluate = [&]() {
    std::vector<char> kept(set.n, 1);
    for (int i : drop_set) kept[i] = 0;
    std::vector<double> env(set.horizon, 0.0);
    for (int i = 0; i < set.n; ++i) {
      if (!kept[i]) continue;
      for (int t = 0; t < set.horizon; ++t) env[t] = std::max(env[t], set.at(i, t));
    }
    try {
      const EnvelopeSolution sol = solve_for_envelope(inst, ceil_to_cents(env));
      if (!best.feasible || sol.exact_cost < best.cost) {
        best.feasible = true;
        best.cost = sol.exact_cost;
      }
    } catch (const InfeasibleError&) {
    }
  };
  auto rec = [&](auto&& self, int start, int remaining) -> void {
    if (remaining == 0) {
      evaluate();
      return;
    }
    for (int i = start; i <= set.n - remaining; ++i) {
      drop_set.push_back(i);
      self(self, i + 1, remaining - 1);
      drop_set.pop_back();
    }
  };
  rec(rec, 0, drops);
  return best;
}

}  // namespace

TEST_SUITE("reference_solver") {

TEST_CASE("demand targets round up to the cent grid") {
  CHECK(ceil_to_cents({1.234, 160.0, 0.0}) == std::vector<std::int64_t>{124, 16000, 0});
  CHECK(ceil_to_cents({499.995, 500.0}) == std::vector<std::int64_t>{50000, 50000});
  CHECK(ceil_to_cents({0.001}) == std::vector<std::int64_t>{1});
}

TEST_CASE("ramp-limited deliverable power of the built-in system") {
  // From (off, off, on@100): unit 1 reaches 200 then 350, unit 2 reaches 100
  // then 200, unit 3 is pinned at its 140 MW ceiling.
  CHECK(max_deliverable_cents(builtin_deterministic_instance()) ==
        std::vector<std::int64_t>{44000, 69000, 69000});
}

TEST_CASE("dispatch costing for a fixed commitment pattern") {
  const UcpInstance inst = builtin_deterministic_instance();

  SUBCASE("all units committed against the nominal demand") {
    const auto u = pattern({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
    const DispatchResult r = dispatch_lp(inst, u, {16000, 50000, 40000});
    REQUIRE(r.feasible);
    // Cheapest split with every minimum running: 123 $ of marginal cost.
    CHECK(r.cost == Rational(123));
  }

  SUBCASE("empty pattern against zero demand costs nothing") {
    const auto u = pattern({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    const DispatchResult r = dispatch_lp(inst, u, {0, 0, 0});
    REQUIRE(r.feasible);
    CHECK(r.cost == Rational(0));
    for (const auto& row : r.p)
      for (const auto& v : row) CHECK(v == Rational(0));
  }

  SUBCASE("unit 3 alone cannot carry the 500 MW peak") {
    const auto u = pattern({{0, 0, 0}, {0, 0, 0}, {1, 1, 1}});
    CHECK_FALSE(dispatch_lp(inst, u, {0, 50000, 0}).feasible);
  }

  SUBCASE("ramping is anchored to the initial output") {
    // Unit 1 starts at 0 MW, so a first-period target above its 200 MW/h
    // climb is out of reach even though capacity would allow it.
    const auto u = pattern({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    CHECK_FALSE(dispatch_lp(inst, u, {25000, 0, 0}).feasible);
    CHECK(dispatch_lp(inst, u, {20000, 0, 0}).feasible);
  }
}

TEST_CASE("full-horizon optimum of the built-in system") {
  const UcpInstance inst = builtin_deterministic_instance();
  const Solution sol = solve_deterministic(inst);
  CHECK(sol.objective == doctest::Approx(191.8).epsilon(1e-9));
  CHECK(check_feasible(inst, sol).feasible);
  check_switching_consistent(inst, sol);
}

TEST_CASE("degenerate demands") {
  SUBCASE("zero demand: cheapest move is to shut the running unit down") {
    UcpInstance inst = builtin_deterministic_instance();
    std::get<FixedDemand>(inst.demand).d = {0.0, 0.0, 0.0};
    const Solution sol = solve_deterministic(inst);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK(check_feasible(inst, sol).feasible);
  }

  SUBCASE("demand above the capacity ceiling is infeasible") {
    UcpInstance inst = builtin_deterministic_instance();
    std::get<FixedDemand>(inst.demand).d = {160.0, 700.0, 400.0};  // > 690 total
    CHECK_THROWS_AS(solve_deterministic(inst), InfeasibleError);
  }

  SUBCASE("the deliverable boundary itself is reachable") {
    UcpInstance inst = builtin_deterministic_instance();
    std::get<FixedDemand>(inst.demand).d = {440.0, 690.0, 690.0};
    const Solution sol = solve_deterministic(inst);
    CHECK(check_feasible(inst, sol).feasible);
  }
}

TEST_CASE("scenario-constrained exact solve matches unrestricted brute force") {
  const UcpInstance inst = builtin_stochastic_instance("moderate");
  const ScenarioSet set = sample_scenarios(inst, 8, 42, "moderate");

  for (const double p_level : {0.75, 0.9}) {
    CAPTURE(p_level);
    const Solution sol = solve_stochastic_exact(inst, set, p_level);
    const BruteForce oracle = brute_force_exact(inst, set, p_level);
    REQUIRE(oracle.feasible);
    CHECK(sol.objective == doctest::Approx(oracle.cost.to_double()).epsilon(1e-12));
    const FeasibilityReport rep = check_feasible(inst, sol, &set, p_level);
    CHECK(rep.feasible);
    check_switching_consistent(inst, sol);
    CHECK(std::count(sol.y.begin(), sol.y.end(), 1) >= reliability_quota(set.n, p_level));
  }

  SUBCASE("costs cannot fall as the quota tightens") {
    const Solution lo = solve_stochastic_exact(inst, set, 0.6);
    const Solution hi = solve_stochastic_exact(inst, set, 0.9);
    CHECK(lo.objective <= hi.objective + 1e-9);
  }

  SUBCASE("a full quota reduces to the envelope problem") {
    const Solution sol = solve_stochastic_exact(inst, set, 1.0);
    const EnvelopeSolution env = solve_for_envelope(inst, ceil_to_cents(envelope(set)));
    CHECK(sol.objective == doctest::Approx(env.exact_cost.to_double()).epsilon(1e-12));
    CHECK(std::count(sol.y.begin(), sol.y.end(), 1) == set.n);
  }

  SUBCASE("the scenario-count limit is enforced") {
    const ScenarioSet big = sample_scenarios(inst, 13, 1, "moderate");
    CHECK_THROWS_AS(solve_stochastic_exact(inst, big, 0.9), LimitError);
  }
}

TEST_CASE("greedy dropping is feasible and never beats exact") {
  const UcpInstance inst = builtin_stochastic_instance("moderate");

  SUBCASE("at desk scale the exact answer is a lower bound") {
    const ScenarioSet set = sample_scenarios(inst, 8, 42, "moderate");
    const Solution exact = solve_stochastic_exact(inst, set, 0.75);
    const Solution greedy = solve_stochastic_greedy(inst, set, 0.75);
    CHECK(check_feasible(inst, greedy, &set, 0.75).feasible);
    CHECK(greedy.objective >= exact.objective - 1e-9);
  }

  SUBCASE("a thousand scenarios still yield a feasible schedule") {
    const ScenarioSet set = sample_scenarios(inst, 1000, 7, "moderate");
    const Solution sol = solve_stochastic_greedy(inst, set, 0.9);
    const FeasibilityReport rep = check_feasible(inst, sol, &set, 0.9);
    CHECK(rep.feasible);
    CHECK(std::count(sol.y.begin(), sol.y.end(), 1) >= 900);
  }

  SUBCASE("with nothing to drop, greedy and exact coincide") {
    const ScenarioSet set = sample_scenarios(inst, 6, 11, "moderate");
    const Solution greedy = solve_stochastic_greedy(inst, set, 1.0);
    const Solution exact = solve_stochastic_exact(inst, set, 1.0);
    CHECK(greedy.objective == doctest::Approx(exact.objective).epsilon(1e-12));
  }

  SUBCASE("tied scenarios above the deliverable ceiling are cleared one by one") {
    // Two scenarios share the period-2 maximum of 700 MW, above the 690 MW
    // deliverable bound. No single drop lowers that envelope value, so a
    // greedy that requires an immediate envelope reduction starves the
    // undeliverable period and wastes its budget elsewhere. Both must go.
    ScenarioSet set;
    set.n = 4;
    set.horizon = 3;
    set.demand = {200.0, 700.0, 300.0,   //
                  210.0, 700.0, 310.0,   //
                  220.0, 650.0, 320.0,   //
                  230.0, 640.0, 330.0};
    const Solution sol = solve_stochastic_greedy(inst, set, 0.5);  // quota 2: two drops
    CHECK(sol.y == std::vector<int>{0, 0, 1, 1});
    CHECK(check_feasible(inst, sol, &set, 0.5).feasible);
  }
}

TEST_CASE("dropping a nowhere-maximal scenario never moves the envelope") {
  // This is the property that lets the exact solver restrict its search to
  // per-period argmax scenarios.
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    ScenarioSet set;
    set.n = 6;
    set.horizon = 3;
    for (int i = 0; i < set.n * set.horizon; ++i)
      set.demand.push_back(static_cast<double>(rng.next_below(100)));
    const auto base = envelope(set);
    for (int i = 0; i < set.n; ++i) {
      bool maximal = false;
      for (int t = 0; t < set.horizon; ++t)
        if (set.at(i, t) == base[t]) maximal = true;
      if (maximal) continue;
      std::vector<char> kept(set.n, 1);
      kept[i] = 0;
      CHECK(envelope(set, kept) == base);
    }
  }
}

}  // TEST_SUITE
