#pragma once

#include <cstdint>
#include <vector>

#include "ccucp/instance.hpp"
#include "ccucp/rational.hpp"
#include "ccucp/sampler.hpp"
#include "ccucp/scenario_model.hpp"

namespace ccucp {

struct SolverLimits {
  int max_exact_scenarios = 12;
  double time_budget_seconds = 60.0;
};

// Least-cost dispatch for a fixed commitment pattern against per-period demand
// targets given in hundredths of MW. Exact rational LP; ramping applies to the
// output level even across on/off transitions, and period 1 ramps from the
// initial output. With lex_refine the dispatch returned is the
// lexicographically smallest (generator-major) among cost-optimal ones.
struct DispatchResult {
  bool feasible = false;
  Rational cost;                        // marginal dispatch cost only
  std::vector<std::vector<Rational>> p;  // G x T
};
DispatchResult dispatch_lp(const UcpInstance& inst, const std::vector<std::vector<int>>& u,
                           const std::vector<std::int64_t>& envelope_cents,
                           bool lex_refine = false);

// Demand targets rounded up to the cent grid; integral values stay exact.
std::vector<std::int64_t> ceil_to_cents(const std::vector<double>& demand);

// Per-period maximum deliverable power (hundredths of MW) over all commitment
// choices: every unit follows its forward ramp-limited maximum profile.
std::vector<std::int64_t> max_deliverable_cents(const UcpInstance& inst);

// Commitment enumeration + dispatch LP for one demand envelope. Switching
// indicators are derived from the pattern; ties in cost break toward the
// lexicographically smallest commitment sequence. Throws InfeasibleError when
// no pattern admits a dispatch.
struct EnvelopeSolution {
  Solution solution;
  Rational exact_cost;
};
EnvelopeSolution solve_for_envelope(const UcpInstance& inst,
                                    const std::vector<std::int64_t>& envelope_cents,
                                    const SolverLimits& limits = {});

// Full-horizon optimum for fixed demand.
Solution solve_deterministic(const UcpInstance& inst, const SolverLimits& limits = {});

// Exact chance-constrained optimum by scenario drop-set enumeration. Drop sets
// are explored through per-period-maximal scenarios only, which reaches every
// achievable envelope; distinct envelopes are solved once each. Requires
// n <= limits.max_exact_scenarios.
Solution solve_stochastic_exact(const UcpInstance& inst, const ScenarioSet& scenarios,
                                double p_level, const SolverLimits& limits = {});

// Scalable surrogate: drops scenarios one at a time until the reliability quota
// is reached, preferring scenarios that attain the envelope in a period above
// the deliverable bound (so quantization ties at the maximum are cleared one by
// one), then the largest envelope reduction, then smallest index. Feasible
// whenever dropping every scenario above the deliverable bound fits the quota;
// not necessarily optimal.
Solution solve_stochastic_greedy(const UcpInstance& inst, const ScenarioSet& scenarios,
                                 double p_level);

}  // namespace ccucp
