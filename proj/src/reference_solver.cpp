#include "ccucp/reference_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "ccucp/errors.hpp"
#include "ccucp/simplex.hpp"

namespace ccucp {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ceil_snapped_cents(double v) {
  const double scaled = v * 100.0;
  const double nearest = std::round(scaled);
  if (std::abs(scaled - nearest) <= 1e-9 * std::max(1.0, std::abs(scaled)))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(scaled));
}

std::int64_t round_cents(double v) { return static_cast<std::int64_t>(std::llround(v * 100.0)); }

LpProblem build_dispatch_lp(const UcpInstance& inst, const std::vector<std::vector<int>>& u,
                            const std::vector<std::int64_t>& envelope_cents) {
  const int g_count = inst.num_generators();
  const int t_count = inst.horizon;
  LpProblem lp;
  lp.num_vars = g_count * t_count;
  lp.lower.assign(lp.num_vars, Rational(0));
  lp.upper.assign(lp.num_vars, Rational(0));
  lp.cost.assign(lp.num_vars, Rational(0));
  auto var = [&](int g, int t) { return g * t_count + t; };
  for (int g = 0; g < g_count; ++g) {
    const auto& gen = inst.generators[g];
    for (int t = 0; t < t_count; ++t) {
      if (u[g][t]) {
        lp.lower[var(g, t)] = Rational(gen.p_min);
        lp.upper[var(g, t)] = Rational(gen.p_max);
      }
      lp.cost[var(g, t)] = Rational(gen.b, 1000);
    }
  }
  for (int t = 0; t < t_count; ++t) {
    LpProblem::Row row;
    for (int g = 0; g < g_count; ++g) row.terms.push_back({var(g, t), Rational(-1)});
    row.rhs = -Rational::from_cents(envelope_cents[t]);
    lp.rows.push_back(std::move(row));
  }
  for (int g = 0; g < g_count; ++g) {
    const auto& gen = inst.generators[g];
    const Rational p_prev0 =
        inst.initial.u0[g] ? Rational::from_cents(round_cents(inst.initial.p0[g])) : Rational(0);
    for (int t = 0; t < t_count; ++t) {
      LpProblem::Row up, down;
      up.terms.push_back({var(g, t), Rational(1)});
      down.terms.push_back({var(g, t), Rational(-1)});
      if (t == 0) {
        up.rhs = Rational(gen.r_up) + p_prev0;
        down.rhs = Rational(gen.r_down) - p_prev0;
      } else {
        up.terms.push_back({var(g, t - 1), Rational(-1)});
        up.rhs = Rational(gen.r_up);
        down.terms.push_back({var(g, t - 1), Rational(1)});
        down.rhs = Rational(gen.r_down);
      }
      lp.rows.push_back(std::move(up));
      lp.rows.push_back(std::move(down));
    }
  }
  return lp;
}

}  // namespace

std::vector<std::int64_t> ceil_to_cents(const std::vector<double>& demand) {
  std::vector<std::int64_t> cents(demand.size());
  for (std::size_t t = 0; t < demand.size(); ++t) cents[t] = ceil_snapped_cents(demand[t]);
  return cents;
}

DispatchResult dispatch_lp(const UcpInstance& inst, const std::vector<std::vector<int>>& u,
                           const std::vector<std::int64_t>& envelope_cents, bool lex_refine) {
  if (static_cast<int>(envelope_cents.size()) != inst.horizon)
    throw ValidationError("envelope length does not match horizon");
  LpProblem lp = build_dispatch_lp(inst, u, envelope_cents);
  LpResult base = solve_lp(lp);
  DispatchResult result;
  if (!base.feasible) return result;
  result.feasible = true;
  result.cost = base.objective;

  std::vector<Rational> x = base.x;
  if (lex_refine) {
    // Pin the optimal cost, then minimize each dispatch variable in turn; the
    // result is the lexicographically smallest cost-optimal dispatch.
    LpProblem::Row cost_row;
    for (int v = 0; v < lp.num_vars; ++v)
      if (lp.cost[v].num != 0) cost_row.terms.push_back({v, lp.cost[v]});
    cost_row.rhs = base.objective;
    LpProblem refine = lp;
    refine.rows.push_back(cost_row);
    for (int v = 0; v < lp.num_vars; ++v) {
      for (int w = 0; w < lp.num_vars; ++w) refine.cost[w] = Rational(w == v ? 1 : 0);
      LpResult step = solve_lp(refine);
      if (!step.feasible) throw LimitError("lp internal error: refinement infeasible");
      refine.lower[v] = step.objective;
      refine.upper[v] = step.objective;
      x[v] = step.objective;
    }
  }

  const int t_count = inst.horizon;
  result.p.assign(inst.num_generators(), std::vector<Rational>(t_count, Rational(0)));
  for (int g = 0; g < inst.num_generators(); ++g)
    for (int t = 0; t < t_count; ++t) result.p[g][t] = x[g * t_count + t];
  return result;
}

std::vector<std::int64_t> max_deliverable_cents(const UcpInstance& inst) {
  const int g_count = inst.num_generators();
  const int t_count = inst.horizon;
  std::vector<std::int64_t> total(t_count, 0);
  for (int g = 0; g < g_count; ++g) {
    const auto& gen = inst.generators[g];
    std::int64_t cap = inst.initial.u0[g] ? round_cents(inst.initial.p0[g]) : 0;
    for (int t = 0; t < t_count; ++t) {
      cap = std::min<std::int64_t>(gen.p_max * 100, cap + gen.r_up * 100);
      // A unit whose reachable maximum is below its minimum cannot run this period.
      if (cap >= gen.p_min * 100) total[t] += cap;
    }
  }
  return total;
}

namespace {

struct EnvelopeTask {
  const UcpInstance* inst;
  std::vector<std::int64_t> envelope_cents;
  Clock::time_point deadline;
  bool has_deadline = false;
};

Money pattern_fixed_cost(const UcpInstance& inst, const std::vector<std::vector<int>>& u) {
  Money total = 0;
  for (int g = 0; g < inst.num_generators(); ++g) {
    const auto& gen = inst.generators[g];
    int prev = inst.initial.u0[g];
    for (int t = 0; t < inst.horizon; ++t) {
      const int cur = u[g][t];
      if (cur > prev) total += gen.c_startup;
      if (cur < prev) total += gen.c_shutdown;
      total += gen.c_fixed * cur;
      prev = cur;
    }
  }
  return total;
}

void derive_switching(const UcpInstance& inst, Solution& sol) {
  const int g_count = inst.num_generators();
  const int t_count = inst.horizon;
  sol.z_on.assign(g_count, std::vector<int>(t_count, 0));
  sol.z_off.assign(g_count, std::vector<int>(t_count, 0));
  for (int g = 0; g < g_count; ++g) {
    int prev = inst.initial.u0[g];
    for (int t = 0; t < t_count; ++t) {
      sol.z_on[g][t] = sol.u[g][t] > prev ? 1 : 0;
      sol.z_off[g][t] = sol.u[g][t] < prev ? 1 : 0;
      prev = sol.u[g][t];
    }
  }
}

struct EnvelopeInternal {
  Solution solution;
  Rational exact_cost;
  std::vector<std::vector<Rational>> exact_p;
};

// `incumbent_bound`, when set, prunes this envelope against a solution already
// found elsewhere: patterns that cannot beat it strictly are skipped, so a
// "no pattern" outcome here only means "nothing better", not infeasible.
EnvelopeInternal solve_envelope_task(const EnvelopeTask& task,
                                     std::optional<Rational> incumbent_bound) {
  const UcpInstance& inst = *task.inst;
  const int g_count = inst.num_generators();
  const int t_count = inst.horizon;
  const int bits = g_count * t_count;
  if (bits > 24) throw LimitError("commitment enumeration limited to 24 generator-periods");

  std::optional<Rational> best_cost = incumbent_bound;
  std::optional<std::vector<std::vector<int>>> best_u;
  bool found = false;

  std::vector<std::vector<int>> u(g_count, std::vector<int>(t_count, 0));
  const std::uint32_t patterns = 1u << bits;
  for (std::uint32_t id = 0; id < patterns; ++id) {
    if (task.has_deadline && (id & 63u) == 0 && Clock::now() > task.deadline)
      throw LimitError("time budget exceeded while enumerating commitment patterns");
    // Bit (bits-1-k) holds position k of the generator-major sequence, so
    // ascending id enumerates commitment sequences in lexicographic order and
    // the first strict improvement is automatically the lex-smallest tie.
    for (int g = 0; g < g_count; ++g)
      for (int t = 0; t < t_count; ++t)
        u[g][t] = (id >> (bits - 1 - (g * t_count + t))) & 1u;

    // Reachability prefilter: committed forward maxima must cover the envelope.
    bool reachable = true;
    {
      std::vector<std::int64_t> cap(g_count, 0);
      for (int g = 0; g < g_count; ++g)
        cap[g] = inst.initial.u0[g] ? round_cents(inst.initial.p0[g]) : 0;
      for (int t = 0; t < t_count && reachable; ++t) {
        std::int64_t sum = 0;
        for (int g = 0; g < g_count; ++g) {
          const auto& gen = inst.generators[g];
          cap[g] = u[g][t] ? std::min<std::int64_t>(gen.p_max * 100, cap[g] + gen.r_up * 100) : 0;
          sum += cap[g];
        }
        if (sum < task.envelope_cents[t]) reachable = false;
      }
    }
    if (!reachable) continue;

    const Money fixed = pattern_fixed_cost(inst, u);
    if (best_cost) {
      // Dispatch lower bound per period: committed minima cost, or cheapest
      // committed marginal price covering the envelope, whichever is larger.
      Rational bound = Rational(fixed, 1000);
      for (int t = 0; t < t_count; ++t) {
        Rational min_out_cost(0);
        std::optional<Rational> cheapest;
        for (int g = 0; g < g_count; ++g) {
          if (!u[g][t]) continue;
          const Rational b(inst.generators[g].b, 1000);
          min_out_cost += b * Rational(inst.generators[g].p_min);
          if (!cheapest || b < *cheapest) cheapest = b;
        }
        if (cheapest) {
          const Rational demand_cost = *cheapest * Rational::from_cents(task.envelope_cents[t]);
          bound += min_out_cost < demand_cost ? demand_cost : min_out_cost;
        }
      }
      if (bound >= *best_cost) continue;
    }

    const DispatchResult dispatch = dispatch_lp(inst, u, task.envelope_cents, false);
    if (!dispatch.feasible) continue;
    const Rational total = Rational(fixed, 1000) + dispatch.cost;
    if (!best_cost || total < *best_cost) {
      best_cost = total;
      best_u = u;
      found = true;
    }
  }

  if (!found)
    throw InfeasibleError("no commitment pattern admits a dispatch for this envelope");

  Solution sol;
  sol.u = *best_u;
  derive_switching(inst, sol);
  const DispatchResult final_dispatch = dispatch_lp(inst, *best_u, task.envelope_cents, true);
  sol.p.assign(g_count, std::vector<double>(t_count, 0.0));
  for (int g = 0; g < g_count; ++g)
    for (int t = 0; t < t_count; ++t) sol.p[g][t] = final_dispatch.p[g][t].to_double();
  sol.objective = objective_value(inst, sol);
  return EnvelopeInternal{std::move(sol), *best_cost, final_dispatch.p};
}

EnvelopeTask make_task(const UcpInstance& inst, const std::vector<std::int64_t>& envelope_cents,
                       const SolverLimits& limits) {
  EnvelopeTask task;
  task.inst = &inst;
  task.envelope_cents = envelope_cents;
  if (limits.time_budget_seconds > 0) {
    task.has_deadline = true;
    task.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(limits.time_budget_seconds));
  }
  return task;
}

// y_i = 1 exactly when scenario i is covered in every period, evaluated on the
// exact rational dispatch; kept scenarios hold by construction, dropped ones
// may be covered incidentally.
void fill_satisfaction(const ScenarioSet& scenarios,
                       const std::vector<std::vector<Rational>>& exact_p, Solution& sol) {
  const int t_count = scenarios.horizon;
  sol.y.assign(scenarios.n, 0);
  for (int i = 0; i < scenarios.n; ++i) {
    bool ok = true;
    for (int t = 0; t < t_count && ok; ++t) {
      Rational total(0);
      for (const auto& row : exact_p) total += row[t];
      ok = total >= Rational::from_cents(round_cents(scenarios.at(i, t)));
    }
    sol.y[i] = ok ? 1 : 0;
  }
}

}  // namespace

EnvelopeSolution solve_for_envelope(const UcpInstance& inst,
                                    const std::vector<std::int64_t>& envelope_cents,
                                    const SolverLimits& limits) {
  EnvelopeInternal internal =
      solve_envelope_task(make_task(inst, envelope_cents, limits), std::nullopt);
  return EnvelopeSolution{std::move(internal.solution), internal.exact_cost};
}

Solution solve_deterministic(const UcpInstance& inst, const SolverLimits& limits) {
  if (inst.is_stochastic()) throw ValidationError("deterministic solve requires fixed demand");
  auto issues = validate(inst);
  if (!issues.empty()) throw ValidationError("invalid instance: " + issues.front());
  return solve_for_envelope(inst, ceil_to_cents(inst.fixed_demand().d), limits).solution;
}

namespace {

std::vector<std::int64_t> envelope_cents_of(const ScenarioSet& scenarios,
                                            std::uint64_t kept_mask) {
  std::vector<std::int64_t> env(scenarios.horizon, std::numeric_limits<std::int64_t>::min());
  for (int i = 0; i < scenarios.n; ++i) {
    if (!((kept_mask >> i) & 1u)) continue;
    for (int t = 0; t < scenarios.horizon; ++t)
      env[t] = std::max(env[t], round_cents(scenarios.at(i, t)));
  }
  return env;
}

// All kept scenarios that attain the per-period maximum somewhere.
std::vector<int> maximal_scenarios(const ScenarioSet& scenarios, std::uint64_t kept_mask) {
  std::set<int> out;
  for (int t = 0; t < scenarios.horizon; ++t) {
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    for (int i = 0; i < scenarios.n; ++i)
      if ((kept_mask >> i) & 1u) best = std::max(best, round_cents(scenarios.at(i, t)));
    for (int i = 0; i < scenarios.n; ++i)
      if (((kept_mask >> i) & 1u) && round_cents(scenarios.at(i, t)) == best) out.insert(i);
  }
  return {out.begin(), out.end()};
}

// Depth-first over drop sets, branching only on currently maximal scenarios.
// Any envelope reachable by an arbitrary drop set is dominated by a state this
// walk reaches: non-maximal drops never change the envelope.
void collect_drop_states(const ScenarioSet& scenarios, std::uint64_t kept_mask, int drops_left,
                         std::set<std::uint64_t>& visited, std::set<std::uint64_t>& leaves) {
  if (drops_left == 0) {
    leaves.insert(kept_mask);
    return;
  }
  if (!visited.insert(kept_mask).second) return;
  for (int cand : maximal_scenarios(scenarios, kept_mask))
    collect_drop_states(scenarios, kept_mask & ~(std::uint64_t{1} << cand), drops_left - 1,
                        visited, leaves);
}

}  // namespace

Solution solve_stochastic_exact(const UcpInstance& inst, const ScenarioSet& scenarios,
                                double p_level, const SolverLimits& limits) {
  if (!inst.is_stochastic()) throw ValidationError("stochastic solve requires gaussian demand");
  if (scenarios.n > limits.max_exact_scenarios)
    throw LimitError("exact solve limited to " + std::to_string(limits.max_exact_scenarios) +
                     " scenarios; use the greedy solver");
  if (scenarios.horizon != inst.horizon)
    throw ValidationError("scenario horizon does not match instance");

  const int quota = reliability_quota(scenarios.n, p_level);
  const int max_drops = scenarios.n - quota;
  const std::uint64_t full_mask = (std::uint64_t{1} << scenarios.n) - 1;

  std::set<std::uint64_t> visited, leaves;
  collect_drop_states(scenarios, full_mask, max_drops, visited, leaves);

  // Distinct envelopes only, cheapest total demand first so the incumbent
  // prunes aggressively.
  std::set<std::vector<std::int64_t>> distinct;
  for (std::uint64_t mask : leaves) distinct.insert(envelope_cents_of(scenarios, mask));
  std::vector<std::vector<std::int64_t>> envelopes(distinct.begin(), distinct.end());
  std::sort(envelopes.begin(), envelopes.end(), [](const auto& a, const auto& b) {
    std::int64_t sa = 0, sb = 0;
    for (auto v : a) sa += v;
    for (auto v : b) sb += v;
    return sa != sb ? sa < sb : a < b;
  });

  EnvelopeTask task = make_task(inst, {}, limits);
  std::optional<EnvelopeInternal> best;
  for (const auto& env : envelopes) {
    task.envelope_cents = env;
    try {
      std::optional<Rational> bound;
      if (best) bound = best->exact_cost;
      EnvelopeInternal cand = solve_envelope_task(task, bound);
      if (!best || cand.exact_cost < best->exact_cost) best = std::move(cand);
    } catch (const InfeasibleError&) {
      // nothing better (or nothing at all) under this envelope; keep going
    }
  }
  if (!best) throw InfeasibleError("no drop set within the reliability quota admits a dispatch");

  Solution sol = std::move(best->solution);
  fill_satisfaction(scenarios, best->exact_p, sol);
  sol.objective = objective_value(inst, sol);
  return sol;
}

Solution solve_stochastic_greedy(const UcpInstance& inst, const ScenarioSet& scenarios,
                                 double p_level) {
  if (!inst.is_stochastic()) throw ValidationError("stochastic solve requires gaussian demand");
  if (scenarios.horizon != inst.horizon)
    throw ValidationError("scenario horizon does not match instance");

  const int quota = reliability_quota(scenarios.n, p_level);
  const int t_count = scenarios.horizon;
  const auto deliverable = max_deliverable_cents(inst);

  std::vector<char> kept(scenarios.n, 1);
  auto recompute = [&](const std::vector<char>& mask) {
    std::vector<std::int64_t> e(t_count, std::numeric_limits<std::int64_t>::min());
    for (int i = 0; i < scenarios.n; ++i) {
      if (!mask[i]) continue;
      for (int t = 0; t < t_count; ++t) e[t] = std::max(e[t], round_cents(scenarios.at(i, t)));
    }
    return e;
  };
  std::vector<std::int64_t> env = recompute(kept);

  for (int step = 0; step < scenarios.n - quota; ++step) {
    std::vector<char> undeliverable(t_count, 0);
    for (int t = 0; t < t_count; ++t) undeliverable[t] = env[t] > deliverable[t];

    std::set<int> candidates;
    for (int t = 0; t < t_count; ++t)
      for (int i = 0; i < scenarios.n; ++i)
        if (kept[i] && round_cents(scenarios.at(i, t)) == env[t]) candidates.insert(i);

    int best = -1;
    bool best_helps = false;
    std::int64_t best_reduction = -1;
    for (int cand : candidates) {
      kept[cand] = 0;
      const auto e2 = recompute(kept);
      kept[cand] = 1;
      std::int64_t reduction = 0;
      // A drop helps when the candidate attains the envelope in an
      // undeliverable period. Requiring the envelope to fall immediately
      // would stall on quantized demand ties at the maximum: no single drop
      // lowers the envelope then, yet clearing the tied scenarios one by one
      // is the only way back under the deliverable bound.
      bool helps = false;
      for (int t = 0; t < t_count; ++t) {
        reduction += env[t] - e2[t];
        if (undeliverable[t] && round_cents(scenarios.at(cand, t)) == env[t]) helps = true;
      }
      if (best == -1 || (helps && !best_helps) ||
          (helps == best_helps && reduction > best_reduction)) {
        best = cand;
        best_helps = helps;
        best_reduction = reduction;
      }
    }
    kept[best] = 0;
    env = recompute(kept);
  }

  for (int t = 0; t < t_count; ++t)
    if (env[t] > deliverable[t])
      throw InfeasibleError("envelope exceeds deliverable power after the drop quota");

  SolverLimits no_budget;
  no_budget.time_budget_seconds = 0.0;
  EnvelopeInternal internal = solve_envelope_task(make_task(inst, env, no_budget), std::nullopt);
  Solution sol = std::move(internal.solution);
  fill_satisfaction(scenarios, internal.exact_p, sol);
  sol.objective = objective_value(inst, sol);
  return sol;
}

}  // namespace ccucp
