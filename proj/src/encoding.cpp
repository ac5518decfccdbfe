#include "ccucp/encoding.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ccucp/errors.hpp"

namespace ccucp {

using nlohmann::json;

int dispatch_bit_count(const UcpInstance& inst) {
  int span = 0;
  for (const auto& gen : inst.generators) span = std::max(span, gen.p_max - gen.p_min);
  return bits_for_range(span);
}

std::vector<std::int64_t> slack_weights(std::int64_t s_max) {
  const int n = bits_for_range(s_max);
  std::vector<std::int64_t> weights;
  weights.reserve(n);
  for (int i = 0; i < n - 1; ++i) weights.push_back(std::int64_t{1} << i);
  if (n > 0) weights.push_back(s_max - ((std::int64_t{1} << (n - 1)) - 1));
  return weights;
}

std::int64_t slack_value(const std::vector<std::int64_t>& weights,
                         const std::vector<std::uint8_t>& bits, int offset) {
  std::int64_t value = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (bits[offset + i]) value += weights[i];
  return value;
}

namespace {

std::int64_t ceil_snapped(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::ceil(x));
}

std::int64_t integral_or_throw(double v, const char* what) {
  const double nearest = std::round(v);
  if (std::abs(v - nearest) > 1e-9 * std::max(1.0, std::abs(v)))
    throw ValidationError(std::string(what) + " must be integral for the binary encoding");
  return static_cast<std::int64_t>(nearest);
}

Layout make_layout_impl(const UcpInstance& inst, const ScenarioSet* scenarios, double p_level) {
  auto issues = validate(inst);
  if (!issues.empty()) throw ValidationError("invalid instance: " + issues.front());

  Layout lay;
  lay.G = inst.num_generators();
  lay.T = inst.horizon;
  lay.N = scenarios ? scenarios->n : 0;
  lay.dispatch_bits = dispatch_bit_count(inst);

  int cursor = 0;
  lay.u_offset = cursor;
  cursor += lay.G * lay.T;
  lay.z_on_offset = cursor;
  cursor += lay.G * lay.T;
  lay.z_off_offset = cursor;
  cursor += lay.G * lay.T;
  lay.p_offset = cursor;
  cursor += lay.G * lay.T * lay.dispatch_bits;
  lay.y_offset = cursor;
  cursor += lay.N;

  // Maximum encodable total output, the demand slack range.
  std::int64_t max_total = 0;
  for (const auto& gen : inst.generators)
    max_total += gen.p_min + ((std::int64_t{1} << lay.dispatch_bits) - 1);

  auto push_block = [&cursor](std::vector<SlackBlock>& blocks, std::int64_t s_max) {
    SlackBlock block;
    block.s_max = s_max;
    block.offset = cursor;
    block.weights = slack_weights(s_max);
    cursor += block.width();
    blocks.push_back(std::move(block));
  };

  if (!scenarios) {
    for (int t = 0; t < lay.T; ++t) push_block(lay.demand_slack, max_total);
  } else {
    // Scenario demands enter in hundredths of MW, so the range scales by 100.
    for (int i = 0; i < lay.N; ++i)
      for (int t = 0; t < lay.T; ++t) push_block(lay.demand_slack, 100 * max_total);
    const int quota = reliability_quota(scenarios->n, p_level);
    push_block(lay.reliability_slack, scenarios->n - quota);
  }
  for (int g = 0; g < lay.G; ++g) {
    const auto& gen = inst.generators[g];
    for (int t = 0; t < lay.T; ++t)
      push_block(lay.ramp_slack, static_cast<std::int64_t>(gen.r_up) + gen.r_down);
  }
  for (int g = 0; g < lay.G; ++g)
    for (int t = 0; t < lay.T; ++t)
      push_block(lay.capacity_slack, inst.generators[g].p_max);

  lay.num_vars = cursor;
  return lay;
}

}  // namespace

Layout make_layout(const UcpInstance& inst) {
  if (inst.is_stochastic())
    throw ValidationError("layout for a gaussian-demand instance needs scenarios and a chance level");
  return make_layout_impl(inst, nullptr, 0.0);
}

Layout make_layout(const UcpInstance& inst, const ScenarioSet& scenarios, double p_level) {
  if (!inst.is_stochastic())
    throw ValidationError("scenario layout requires an instance with gaussian demand");
  if (scenarios.horizon != inst.horizon)
    throw ValidationError("scenario horizon does not match instance");
  return make_layout_impl(inst, &scenarios, p_level);
}

std::string Layout::manifest_json() const {
  json entries = json::array();
  auto add = [&entries](const std::string& name, int offset, int width) {
    entries.push_back({{"name", name}, {"start", offset}, {"width", width}});
  };
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      add("u[" + std::to_string(g) + "][" + std::to_string(t) + "]", u(g, t), 1);
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      add("z_on[" + std::to_string(g) + "][" + std::to_string(t) + "]", z_on(g, t), 1);
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      add("z_off[" + std::to_string(g) + "][" + std::to_string(t) + "]", z_off(g, t), 1);
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      add("p[" + std::to_string(g) + "][" + std::to_string(t) + "]", p_bit(g, t, 0),
          dispatch_bits);
  for (int i = 0; i < N; ++i) add("y[" + std::to_string(i) + "]", y(i), 1);
  if (N == 0) {
    for (int t = 0; t < T; ++t)
      add("demand_slack[" + std::to_string(t) + "]", demand_slack[t].offset,
          demand_slack[t].width());
  } else {
    for (int i = 0; i < N; ++i)
      for (int t = 0; t < T; ++t)
        add("demand_slack[" + std::to_string(i) + "][" + std::to_string(t) + "]",
            demand_block(i, t).offset, demand_block(i, t).width());
  }
  for (const auto& block : reliability_slack)
    add("reliability_slack", block.offset, block.width());
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      add("ramp_slack[" + std::to_string(g) + "][" + std::to_string(t) + "]",
          ramp_block(g, t).offset, ramp_block(g, t).width());
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t)
      add("capacity_slack[" + std::to_string(g) + "][" + std::to_string(t) + "]",
          capacity_block(g, t).offset, capacity_block(g, t).width());
  json j = {{"num_vars", num_vars}, {"entries", entries}};
  return j.dump(2);
}

PenaltyStructure build_penalties(const UcpInstance& inst, const Layout& layout,
                                 const ScenarioSet* scenarios, double p_level) {
  if ((layout.N > 0) != (scenarios != nullptr))
    throw ValidationError("penalty structure needs scenarios exactly when the layout has them");
  const int g_count = layout.G;
  const int t_count = layout.T;
  PenaltyStructure ps;

  for (int g = 0; g < g_count; ++g) {
    for (int t = 0; t < t_count; ++t) {
      LinearExpr logic;
      logic.terms.push_back({layout.u(g, t), 1});
      if (t == 0)
        logic.constant -= inst.initial.u0[g];
      else
        logic.terms.push_back({layout.u(g, t - 1), -1});
      logic.terms.push_back({layout.z_on(g, t), -1});
      logic.terms.push_back({layout.z_off(g, t), 1});
      ps.logic1.push_back(std::move(logic));

      ps.logic2.push_back({layout.z_on(g, t), layout.z_off(g, t)});

      PenaltyStructure::CouplingTerm coupling;
      coupling.u = layout.u(g, t);
      for (int k = 0; k < layout.dispatch_bits; ++k)
        coupling.p_bits.push_back(layout.p_bit(g, t, k));
      ps.coupling.push_back(std::move(coupling));
    }
  }

  // Output level of (g, t) as a linear expression, optionally scaled.
  auto output_terms = [&](LinearExpr& expr, int g, int t, std::int64_t scale) {
    expr.terms.push_back({layout.u(g, t), scale * inst.generators[g].p_min});
    for (int k = 0; k < layout.dispatch_bits; ++k)
      expr.terms.push_back({layout.p_bit(g, t, k), scale * (std::int64_t{1} << k)});
  };
  auto slacked = [](LinearExpr lhs, const SlackBlock& block) {
    SlackedEquation eq;
    eq.lhs = std::move(lhs);
    eq.slack_offset = block.offset;
    eq.s_max = block.s_max;
    eq.weights = block.weights;
    return eq;
  };

  if (!scenarios) {
    const auto& d = inst.fixed_demand().d;
    for (int t = 0; t < t_count; ++t) {
      LinearExpr lhs;
      for (int g = 0; g < g_count; ++g) output_terms(lhs, g, t, 1);
      // Integral total output covers d exactly when it covers ceil(d).
      lhs.constant -= ceil_snapped(d[t]);
      ps.demand.push_back(slacked(std::move(lhs), layout.demand_slack[t]));
    }
  } else {
    for (int i = 0; i < layout.N; ++i) {
      for (int t = 0; t < t_count; ++t) {
        LinearExpr lhs;
        for (int g = 0; g < g_count; ++g) output_terms(lhs, g, t, 100);
        const std::int64_t demand_cents =
            static_cast<std::int64_t>(std::llround(scenarios->at(i, t) * 100.0));
        lhs.terms.push_back({layout.y(i), -demand_cents});
        ps.demand.push_back(slacked(std::move(lhs), layout.demand_block(i, t)));
      }
    }
    LinearExpr rel;
    for (int i = 0; i < layout.N; ++i) rel.terms.push_back({layout.y(i), 1});
    rel.constant -= reliability_quota(scenarios->n, p_level);
    ps.reliability.push_back(slacked(std::move(rel), layout.reliability_slack.front()));
  }

  for (int g = 0; g < g_count; ++g) {
    const auto& gen = inst.generators[g];
    const std::int64_t p0 = integral_or_throw(inst.initial.p0[g], "initial output");
    for (int t = 0; t < t_count; ++t) {
      LinearExpr lhs;  // p_t - p_{t-1} + r_down, in [0, r_up + r_down] when legal
      output_terms(lhs, g, t, 1);
      if (t == 0)
        lhs.constant -= p0;
      else
        output_terms(lhs, g, t - 1, -1);
      lhs.constant += gen.r_down;
      ps.ramp.push_back(slacked(std::move(lhs), layout.ramp_block(g, t)));

      LinearExpr cap;  // p_max - p_t, in [0, p_max] when within capacity
      cap.constant = gen.p_max;
      output_terms(cap, g, t, -1);
      ps.capacity.push_back(slacked(std::move(cap), layout.capacity_block(g, t)));
    }
  }
  return ps;
}

std::int64_t eval_expr(const LinearExpr& expr, const std::vector<std::uint8_t>& bits) {
  std::int64_t value = expr.constant;
  for (const auto& [var, coeff] : expr.terms)
    if (bits[var]) value += coeff;
  return value;
}

namespace {

void write_slack(std::vector<std::uint8_t>& bits, const SlackedEquation& eq) {
  std::int64_t value = eval_expr(eq.lhs, bits);
  value = std::clamp<std::int64_t>(value, 0, eq.s_max);
  const int n = static_cast<int>(eq.weights.size());
  if (n == 0) return;
  const std::int64_t plain_max = (std::int64_t{1} << (n - 1)) - 1;
  std::int64_t rest = value;
  if (value > plain_max) {
    bits[eq.slack_offset + n - 1] = 1;
    rest -= eq.weights.back();
  } else {
    bits[eq.slack_offset + n - 1] = 0;
  }
  for (int i = 0; i < n - 1; ++i) bits[eq.slack_offset + i] = (rest >> i) & 1;
}

int bit_or_throw(int v, const char* what) {
  if (v != 0 && v != 1) throw ValidationError(std::string(what) + " must be 0 or 1");
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_solution(const UcpInstance& inst, const Layout& layout,
                                          const Solution& sol, const ScenarioSet* scenarios,
                                          double p_level) {
  if (static_cast<int>(sol.u.size()) != layout.G)
    throw ValidationError("solution does not match layout shape");
  std::vector<std::uint8_t> bits(layout.num_vars, 0);
  for (int g = 0; g < layout.G; ++g) {
    for (int t = 0; t < layout.T; ++t) {
      bits[layout.u(g, t)] = bit_or_throw(sol.u[g][t], "u");
      bits[layout.z_on(g, t)] = bit_or_throw(sol.z_on[g][t], "z_on");
      bits[layout.z_off(g, t)] = bit_or_throw(sol.z_off[g][t], "z_off");
      const std::int64_t level = integral_or_throw(sol.p[g][t], "dispatch");
      const std::int64_t rem = level - static_cast<std::int64_t>(inst.generators[g].p_min) *
                                           sol.u[g][t];
      if (rem < 0 || rem >= (std::int64_t{1} << layout.dispatch_bits))
        throw ValidationError("dispatch level is not representable in the bit encoding");
      for (int k = 0; k < layout.dispatch_bits; ++k)
        bits[layout.p_bit(g, t, k)] = (rem >> k) & 1;
    }
  }
  if (layout.N > 0) {
    if (static_cast<int>(sol.y.size()) != layout.N)
      throw ValidationError("solution y length does not match scenario count");
    for (int i = 0; i < layout.N; ++i) bits[layout.y(i)] = bit_or_throw(sol.y[i], "y");
  }

  const PenaltyStructure ps = build_penalties(inst, layout, scenarios, p_level);
  for (const auto& group : {&ps.demand, &ps.reliability, &ps.ramp, &ps.capacity})
    for (const auto& eq : *group) write_slack(bits, eq);
  return bits;
}

Solution decode_solution(const UcpInstance& inst, const Layout& layout,
                         const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != layout.num_vars)
    throw ValidationError("bitstring length does not match layout");
  Solution sol;
  sol.u.assign(layout.G, std::vector<int>(layout.T, 0));
  sol.z_on.assign(layout.G, std::vector<int>(layout.T, 0));
  sol.z_off.assign(layout.G, std::vector<int>(layout.T, 0));
  sol.p.assign(layout.G, std::vector<double>(layout.T, 0.0));
  for (int g = 0; g < layout.G; ++g) {
    for (int t = 0; t < layout.T; ++t) {
      sol.u[g][t] = bits[layout.u(g, t)];
      sol.z_on[g][t] = bits[layout.z_on(g, t)];
      sol.z_off[g][t] = bits[layout.z_off(g, t)];
      std::int64_t level = static_cast<std::int64_t>(inst.generators[g].p_min) * sol.u[g][t];
      for (int k = 0; k < layout.dispatch_bits; ++k)
        if (bits[layout.p_bit(g, t, k)]) level += std::int64_t{1} << k;
      sol.p[g][t] = static_cast<double>(level);
    }
  }
  if (layout.N > 0) {
    sol.y.assign(layout.N, 0);
    for (int i = 0; i < layout.N; ++i) sol.y[i] = bits[layout.y(i)];
  }
  sol.objective = objective_value(inst, sol);
  return sol;
}

}  // namespace ccucp
