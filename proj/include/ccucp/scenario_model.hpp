#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccucp/instance.hpp"
#include "ccucp/sampler.hpp"

namespace ccucp {

// Bits needed for an integer slack range [0, s_max]: ceil(log2(s_max+1)), 0 when s_max = 0.
int bits_for_range(std::int64_t s_max);

// Minimum number of scenarios that must be satisfied: ceil(p * n), with values
// within 1e-9 relative of an integer snapped first (0.9*10 must give 9, not 10).
// Accepts 0 < p <= 1.
int reliability_quota(int n, double p);

// Per-period max demand over the kept scenarios; kept empty means "all kept".
std::vector<double> envelope(const ScenarioSet& set, const std::vector<char>& kept = {});

struct Solution {
  std::vector<std::vector<int>> u;      // G x T commitment
  std::vector<std::vector<int>> z_on;   // G x T startup flags
  std::vector<std::vector<int>> z_off;  // G x T shutdown flags
  std::vector<std::vector<double>> p;   // G x T dispatch, MW
  std::vector<int> y;                   // scenario satisfaction flags (empty when fixed demand)
  double objective = 0.0;
};

// Total cost: startup + shutdown + fixed commitment + marginal dispatch.
double objective_value(const UcpInstance& inst, const Solution& sol);

struct GroupCheck {
  bool pass = true;
  double max_violation = 0.0;
};

struct FeasibilityReport {
  GroupCheck logic;        // u_t - u_{t-1} = z_on - z_off
  GroupCheck exclusivity;  // z_on + z_off <= 1
  GroupCheck capacity;     // p_min u <= p <= p_max u
  GroupCheck ramping;      // -r_down <= p_t - p_{t-1} <= r_up
  GroupCheck demand;       // sum_g p >= demand (every period; per flagged scenario)
  GroupCheck reliability;  // sum_i y_i >= quota (stochastic only)
  bool feasible = false;

  std::string to_json() const;
};

// For gaussian-demand instances, scenarios and sol.y are required and demand is
// checked on every scenario with y_i = 1; for fixed demand they are ignored.
FeasibilityReport check_feasible(const UcpInstance& inst, const Solution& sol,
                                 const ScenarioSet* scenarios = nullptr, double p_level = 0.0,
                                 double tol = 1e-6);

std::string solution_to_json(const Solution& sol);
Solution solution_from_json(const std::string& text);
void save_solution(const Solution& sol, const std::string& path);
Solution load_solution(const std::string& path);

}  // namespace ccucp
