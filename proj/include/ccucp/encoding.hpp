#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccucp/instance.hpp"
#include "ccucp/sampler.hpp"
#include "ccucp/scenario_model.hpp"

namespace ccucp {

// Bits per dispatch level: ceil(log2(max_g(p_max - p_min) + 1)); the level
// decodes as p = p_min * u + sum_k 2^k p_k.
int dispatch_bit_count(const UcpInstance& inst);

// Range-exact slack weights for [0, s_max]: plain powers 1,2,...,2^(n-2) plus a
// final adjusted weight s_max - (2^(n-1) - 1). Same bit count as plain binary,
// but no representable value exceeds s_max, so a zero penalty can never mask a
// violated inequality.
std::vector<std::int64_t> slack_weights(std::int64_t s_max);

std::int64_t slack_value(const std::vector<std::int64_t>& weights,
                         const std::vector<std::uint8_t>& bits, int offset);

// Variable ordering: u, z_on, z_off (generator-major), dispatch bits, scenario
// flags y, then slacks: demand (period-major; scenario-major stochastic),
// reliability, ramp, capacity.
struct SlackBlock {
  std::int64_t s_max = 0;
  int offset = 0;
  std::vector<std::int64_t> weights;
  int width() const { return static_cast<int>(weights.size()); }
};

struct Layout {
  int G = 0, T = 0, N = 0;  // N = 0 for fixed demand
  int dispatch_bits = 0;
  int num_vars = 0;
  int u_offset = 0, z_on_offset = 0, z_off_offset = 0, p_offset = 0, y_offset = 0;
  std::vector<SlackBlock> demand_slack;       // T entries, or N*T scenario-major
  std::vector<SlackBlock> reliability_slack;  // empty, or one entry
  std::vector<SlackBlock> ramp_slack;         // G*T
  std::vector<SlackBlock> capacity_slack;     // G*T

  int u(int g, int t) const { return u_offset + g * T + t; }
  int z_on(int g, int t) const { return z_on_offset + g * T + t; }
  int z_off(int g, int t) const { return z_off_offset + g * T + t; }
  int p_bit(int g, int t, int k) const { return p_offset + (g * T + t) * dispatch_bits + k; }
  int y(int i) const { return y_offset + i; }
  const SlackBlock& demand_block(int i, int t) const { return demand_slack[i * T + t]; }
  const SlackBlock& ramp_block(int g, int t) const { return ramp_slack[g * T + t]; }
  const SlackBlock& capacity_block(int g, int t) const { return capacity_slack[g * T + t]; }

  std::string manifest_json() const;
};

Layout make_layout(const UcpInstance& inst);
Layout make_layout(const UcpInstance& inst, const ScenarioSet& scenarios, double p_level);

// Integer-coefficient penalty equations in bit-variable space. Squared groups
// penalize (lhs - slack)^2; logic2 and coupling are direct product penalties.
struct LinearExpr {
  std::vector<std::pair<int, std::int64_t>> terms;
  std::int64_t constant = 0;
};

struct SlackedEquation {
  LinearExpr lhs;  // decision part only; must equal the slack value when feasible
  int slack_offset = 0;
  std::int64_t s_max = 0;
  std::vector<std::int64_t> weights;
};

struct PenaltyStructure {
  std::vector<LinearExpr> logic1;            // u_t - u_{t-1} - z_on + z_off = 0
  std::vector<std::pair<int, int>> logic2;   // z_on * z_off = 0
  struct CouplingTerm {
    int u;
    std::vector<int> p_bits;
  };
  std::vector<CouplingTerm> coupling;        // (1 - u) * p_k = 0
  std::vector<SlackedEquation> demand;       // coverage of demand / flagged scenarios
  std::vector<SlackedEquation> reliability;  // sum y_i >= quota
  std::vector<SlackedEquation> ramp;         // |p_t - p_{t-1}| within ramp window
  std::vector<SlackedEquation> capacity;     // p <= p_max
};

PenaltyStructure build_penalties(const UcpInstance& inst, const Layout& layout,
                                 const ScenarioSet* scenarios = nullptr, double p_level = 0.0);

std::int64_t eval_expr(const LinearExpr& expr, const std::vector<std::uint8_t>& bits);

// Bitstring for an integral solution, with canonical slacks synthesized from
// the constraint residuals (clamped into range when a constraint is violated).
std::vector<std::uint8_t> encode_solution(const UcpInstance& inst, const Layout& layout,
                                          const Solution& sol,
                                          const ScenarioSet* scenarios = nullptr,
                                          double p_level = 0.0);

// Reads u, z_on, z_off, dispatch levels and y from the bitstring; slack bits
// are not part of the solution. objective is filled in.
Solution decode_solution(const UcpInstance& inst, const Layout& layout,
                         const std::vector<std::uint8_t>& bits);

}  // namespace ccucp
