#include "ccucp/scenario_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccucp {

using nlohmann::json;

int bits_for_range(std::int64_t s_max) {
  if (s_max < 0) throw ValidationError("slack range must be non-negative");
  if (s_max == 0) return 0;
  return std::bit_width(static_cast<std::uint64_t>(s_max));
}

namespace {

// Snap values that are within 1e-9 relative of an integer, then ceil. Guards
// against 0.9*10 = 9.000000000000002 ceiling to 10.
std::int64_t ceil_snapped(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(x));
}

void require_shape(const UcpInstance& inst, const Solution& sol) {
  const auto g_count = static_cast<std::size_t>(inst.num_generators());
  const auto t_count = static_cast<std::size_t>(inst.horizon);
  auto ok = [&](const auto& m) {
    if (m.size() != g_count) return false;
    for (const auto& row : m)
      if (row.size() != t_count) return false;
    return true;
  };
  if (!ok(sol.u) || !ok(sol.z_on) || !ok(sol.z_off) || !ok(sol.p))
    throw ValidationError("solution arrays must be G x T");
}

}  // namespace

int reliability_quota(int n, double p) {
  if (n < 1) throw ValidationError("scenario count must be positive");
  if (!(p > 0.0) || p > 1.0) throw ValidationError("chance level must satisfy 0 < p <= 1");
  return static_cast<int>(ceil_snapped(p * n));
}

std::vector<double> envelope(const ScenarioSet& set, const std::vector<char>& kept) {
  if (!kept.empty() && static_cast<int>(kept.size()) != set.n)
    throw ValidationError("kept mask length does not match scenario count");
  std::vector<double> env(set.horizon, 0.0);
  bool any = false;
  for (int i = 0; i < set.n; ++i) {
    if (!kept.empty() && !kept[i]) continue;
    for (int t = 0; t < set.horizon; ++t) env[t] = any ? std::max(env[t], set.at(i, t)) : set.at(i, t);
    any = true;
  }
  if (!any) throw ValidationError("envelope of an empty scenario selection");
  return env;
}

double objective_value(const UcpInstance& inst, const Solution& sol) {
  require_shape(inst, sol);
  const int g_count = inst.num_generators();
  const int t_count = inst.horizon;
  Money commitment = 0;  // exact part: startup, shutdown, fixed
  double dispatch = 0.0;
  for (int g = 0; g < g_count; ++g) {
    const auto& gen = inst.generators[g];
    for (int t = 0; t < t_count; ++t) {
      commitment += gen.c_startup * sol.z_on[g][t];
      commitment += gen.c_shutdown * sol.z_off[g][t];
      commitment += gen.c_fixed * sol.u[g][t];
      dispatch += money_to_double(gen.b) * sol.p[g][t];
    }
  }
  return money_to_double(commitment) + dispatch;
}

namespace {

void record(GroupCheck& check, double violation) {
  if (violation > check.max_violation) check.max_violation = violation;
}

}  // namespace

FeasibilityReport check_feasible(const UcpInstance& inst, const Solution& sol,
                                 const ScenarioSet* scenarios, double p_level, double tol) {
  require_shape(inst, sol);
  const int g_count = inst.num_generators();
  const int t_count = inst.horizon;
  FeasibilityReport rep;

  for (int g = 0; g < g_count; ++g) {
    const auto& gen = inst.generators[g];
    for (int t = 0; t < t_count; ++t) {
      const int u_prev = t == 0 ? inst.initial.u0[g] : sol.u[g][t - 1];
      const double p_prev = t == 0 ? inst.initial.p0[g] : sol.p[g][t - 1];
      record(rep.logic,
             std::abs(sol.u[g][t] - u_prev - sol.z_on[g][t] + sol.z_off[g][t]));
      record(rep.exclusivity, static_cast<double>(sol.z_on[g][t] + sol.z_off[g][t] - 1));
      record(rep.capacity, gen.p_min * sol.u[g][t] - sol.p[g][t]);
      record(rep.capacity, sol.p[g][t] - gen.p_max * sol.u[g][t]);
      record(rep.ramping, sol.p[g][t] - p_prev - gen.r_up);
      record(rep.ramping, p_prev - sol.p[g][t] - gen.r_down);
    }
  }

  std::vector<double> total(t_count, 0.0);
  for (int t = 0; t < t_count; ++t)
    for (int g = 0; g < g_count; ++g) total[t] += sol.p[g][t];

  if (inst.is_stochastic()) {
    if (scenarios == nullptr || sol.y.empty())
      throw ValidationError("stochastic feasibility check requires scenarios and y flags");
    if (static_cast<int>(sol.y.size()) != scenarios->n)
      throw ValidationError("y length does not match scenario count");
    int satisfied = 0;
    for (int i = 0; i < scenarios->n; ++i) {
      if (!sol.y[i]) continue;
      ++satisfied;
      for (int t = 0; t < t_count; ++t) record(rep.demand, scenarios->at(i, t) - total[t]);
    }
    const int quota = reliability_quota(scenarios->n, p_level);
    record(rep.reliability, static_cast<double>(quota - satisfied));
  } else {
    const auto& d = inst.fixed_demand().d;
    for (int t = 0; t < t_count; ++t) record(rep.demand, d[t] - total[t]);
  }

  for (GroupCheck* check : {&rep.logic, &rep.exclusivity, &rep.capacity, &rep.ramping, &rep.demand,
                            &rep.reliability}) {
    check->max_violation = std::max(check->max_violation, 0.0);
    check->pass = check->max_violation <= tol;
  }
  rep.feasible = rep.logic.pass && rep.exclusivity.pass && rep.capacity.pass &&
                 rep.ramping.pass && rep.demand.pass && rep.reliability.pass;
  return rep;
}

namespace {

json group_json(const GroupCheck& check) {
  return {{"pass", check.pass}, {"max_violation", check.max_violation}};
}

}  // namespace

std::string FeasibilityReport::to_json() const {
  json j = {{"logic", group_json(logic)},
            {"exclusivity", group_json(exclusivity)},
            {"capacity", group_json(capacity)},
            {"ramping", group_json(ramping)},
            {"demand", group_json(demand)},
            {"reliability", group_json(reliability)},
            {"feasible", feasible}};
  return j.dump(2);
}

std::string solution_to_json(const Solution& sol) {
  json j = {{"u", sol.u},         {"z_on", sol.z_on},          {"z_off", sol.z_off},
            {"p", sol.p},         {"objective", sol.objective}};
  if (!sol.y.empty()) j["y"] = sol.y;
  return j.dump(2);
}

Solution solution_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    Solution sol;
    sol.u = j.at("u").get<std::vector<std::vector<int>>>();
    sol.z_on = j.at("z_on").get<std::vector<std::vector<int>>>();
    sol.z_off = j.at("z_off").get<std::vector<std::vector<int>>>();
    sol.p = j.at("p").get<std::vector<std::vector<double>>>();
    if (j.contains("y")) sol.y = j["y"].get<std::vector<int>>();
    sol.objective = j.value("objective", 0.0);
    return sol;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed solution JSON: ") + e.what());
  }
}

void save_solution(const Solution& sol, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write solution file: " + path);
  out << solution_to_json(sol) << "\n";
}

Solution load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open solution file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return solution_from_json(buf.str());
}

}  // namespace ccucp
