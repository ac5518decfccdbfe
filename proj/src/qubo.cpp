#include "ccucp/qubo.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccucp/errors.hpp"

namespace ccucp {

using nlohmann::json;

PenaltyWeights PenaltyWeights::tuned_reference() {
  PenaltyWeights w;
  w.logic1 = 24.62;
  w.logic2 = 3.63;
  w.demand = 7.21;
  w.coupling = 1081.48;
  w.capacity = 31.61;
  w.ramp = 37.32;
  w.reliability = 1.0;
  return w;
}

std::string PenaltyWeights::to_json() const {
  json j = {{"logic1", logic1},     {"logic2", logic2}, {"demand", demand},
            {"coupling", coupling}, {"capacity", capacity}, {"ramp", ramp},
            {"reliability", reliability}};
  return j.dump(2);
}

PenaltyWeights PenaltyWeights::from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    PenaltyWeights w;
    w.logic1 = j.at("logic1").get<double>();
    w.logic2 = j.at("logic2").get<double>();
    w.demand = j.at("demand").get<double>();
    w.coupling = j.at("coupling").get<double>();
    w.capacity = j.at("capacity").get<double>();
    w.ramp = j.at("ramp").get<double>();
    w.reliability = j.value("reliability", 1.0);
    for (double v : {w.logic1, w.logic2, w.demand, w.coupling, w.capacity, w.ramp, w.reliability})
      if (!(v > 0.0)) throw ValidationError("penalty weights must be positive");
    return w;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed weights JSON: ") + e.what());
  }
}

namespace {

void add_linear(QuboModel& model, int var, double coeff) { model.linear[var] += coeff; }

void add_quadratic(QuboModel& model, int a, int b, double coeff) {
  if (a == b) throw ValidationError("quadratic term with identical indices");
  if (a > b) std::swap(a, b);
  model.quadratic[{a, b}] += coeff;
}

// lambda * (sum_i a_i x_i + c)^2 expanded over binary x (x^2 = x).
void add_squared(QuboModel& model, const std::vector<std::pair<int, std::int64_t>>& terms,
                 std::int64_t constant, double lambda) {
  model.offset += lambda * static_cast<double>(constant) * static_cast<double>(constant);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto [vi, ai] = terms[i];
    add_linear(model, vi,
               lambda * static_cast<double>(ai) * (static_cast<double>(ai) + 2.0 * constant));
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      add_quadratic(model, vi, terms[j].first,
                    lambda * 2.0 * static_cast<double>(ai) * static_cast<double>(terms[j].second));
  }
}

std::vector<std::pair<int, std::int64_t>> full_terms(const SlackedEquation& eq) {
  auto terms = eq.lhs.terms;
  for (std::size_t i = 0; i < eq.weights.size(); ++i)
    terms.push_back({eq.slack_offset + static_cast<int>(i), -eq.weights[i]});
  return terms;
}

}  // namespace

QuboModel compile_qubo(const UcpInstance& inst, const Layout& layout,
                       const PenaltyWeights& weights, const ScenarioSet* scenarios,
                       double p_level) {
  QuboModel model;
  model.num_vars = layout.num_vars;
  model.layout = layout;
  model.structure = build_penalties(inst, layout, scenarios, p_level);
  model.weights = weights;
  model.has_structure = true;

  // Objective: startup/shutdown/fixed commitment cost plus marginal dispatch.
  for (int g = 0; g < layout.G; ++g) {
    const auto& gen = inst.generators[g];
    for (int t = 0; t < layout.T; ++t) {
      add_linear(model, layout.z_on(g, t), money_to_double(gen.c_startup));
      add_linear(model, layout.z_off(g, t), money_to_double(gen.c_shutdown));
      add_linear(model, layout.u(g, t),
                 money_to_double(gen.c_fixed) + money_to_double(gen.b) * gen.p_min);
      for (int k = 0; k < layout.dispatch_bits; ++k)
        add_linear(model, layout.p_bit(g, t, k),
                   money_to_double(gen.b) * static_cast<double>(std::int64_t{1} << k));
    }
  }

  const PenaltyStructure& ps = model.structure;
  for (const auto& expr : ps.logic1) add_squared(model, expr.terms, expr.constant, weights.logic1);
  for (const auto& [z_on, z_off] : ps.logic2) add_quadratic(model, z_on, z_off, weights.logic2);
  for (const auto& term : ps.coupling) {
    for (int p_bit : term.p_bits) {
      add_linear(model, p_bit, weights.coupling);
      add_quadratic(model, term.u, p_bit, -weights.coupling);
    }
  }
  for (const auto& eq : ps.demand)
    add_squared(model, full_terms(eq), eq.lhs.constant, weights.demand);
  for (const auto& eq : ps.reliability)
    add_squared(model, full_terms(eq), eq.lhs.constant, weights.reliability);
  for (const auto& eq : ps.ramp) add_squared(model, full_terms(eq), eq.lhs.constant, weights.ramp);
  for (const auto& eq : ps.capacity)
    add_squared(model, full_terms(eq), eq.lhs.constant, weights.capacity);

  // Merged exact zeros carry no coupling; drop them.
  for (auto it = model.linear.begin(); it != model.linear.end();)
    it = it->second == 0.0 ? model.linear.erase(it) : std::next(it);
  for (auto it = model.quadratic.begin(); it != model.quadratic.end();)
    it = it->second == 0.0 ? model.quadratic.erase(it) : std::next(it);
  return model;
}

double QuboModel::energy(const std::vector<std::uint8_t>& bits) const {
  if (static_cast<int>(bits.size()) != num_vars)
    throw ValidationError("bitstring length does not match qubo");
  double e = offset;
  for (const auto& [var, coeff] : linear)
    if (bits[var]) e += coeff;
  for (const auto& [pair, coeff] : quadratic)
    if (bits[pair.first] && bits[pair.second]) e += coeff;
  return e;
}

std::map<std::string, double> QuboModel::penalty_breakdown(
    const std::vector<std::uint8_t>& bits) const {
  if (!has_structure)
    throw ValidationError("penalty breakdown requires a model compiled from an instance");
  if (static_cast<int>(bits.size()) != num_vars)
    throw ValidationError("bitstring length does not match qubo");

  std::map<std::string, double> out;
  // Violation of the underlying inequality: distance from the decision-side
  // value to the representable slack interval [0, s_max]. The slack register's
  // current contents are irrelevant here — a misaligned slack raises energy()
  // but does not make the decoded schedule infeasible.
  auto squared_total = [&bits](const std::vector<SlackedEquation>& eqs) {
    std::int64_t total = 0;
    for (const auto& eq : eqs) {
      const std::int64_t lhs = eval_expr(eq.lhs, bits);
      std::int64_t viol = 0;
      if (lhs < 0)
        viol = -lhs;
      else if (lhs > eq.s_max)
        viol = lhs - eq.s_max;
      total += viol * viol;
    }
    return total;
  };

  std::int64_t logic1_total = 0;
  for (const auto& expr : structure.logic1) {
    const std::int64_t r = eval_expr(expr, bits);
    logic1_total += r * r;
  }
  out["logic1"] = weights.logic1 * static_cast<double>(logic1_total);

  std::int64_t logic2_total = 0;
  for (const auto& [z_on, z_off] : structure.logic2) logic2_total += bits[z_on] && bits[z_off];
  out["logic2"] = weights.logic2 * static_cast<double>(logic2_total);

  std::int64_t coupling_total = 0;
  for (const auto& term : structure.coupling) {
    if (bits[term.u]) continue;
    for (int p_bit : term.p_bits) coupling_total += bits[p_bit];
  }
  out["coupling"] = weights.coupling * static_cast<double>(coupling_total);

  out["demand"] = weights.demand * static_cast<double>(squared_total(structure.demand));
  out["capacity"] = weights.capacity * static_cast<double>(squared_total(structure.capacity));
  out["ramp"] = weights.ramp * static_cast<double>(squared_total(structure.ramp));
  if (!structure.reliability.empty())
    out["reliability"] =
        weights.reliability * static_cast<double>(squared_total(structure.reliability));
  return out;
}

void export_qubo(const QuboModel& model, const std::string& path,
                 const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write qubo file: " + path);
  char buf[64];
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", model.offset);
  out << "qubo " << model.num_vars << " " << model.linear.size() << " " << model.quadratic.size()
      << " " << buf << "\n";
  for (const auto& [var, coeff] : model.linear) {
    std::snprintf(buf, sizeof buf, "%.12g", coeff);
    out << var << " " << buf << "\n";
  }
  for (const auto& [pair, coeff] : model.quadratic) {
    std::snprintf(buf, sizeof buf, "%.12g", coeff);
    out << pair.first << " " << pair.second << " " << buf << "\n";
  }
}

QuboModel import_qubo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open qubo file: " + path);
  QuboModel model;
  std::string line;
  bool seen_header = false;
  std::size_t expect_linear = 0, expect_quadratic = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream row(line);
    if (!seen_header) {
      std::string tag;
      row >> tag >> model.num_vars >> expect_linear >> expect_quadratic >> model.offset;
      if (row.fail() || tag != "qubo")
        throw ValidationError("qubo file must start with a qubo header line");
      if (model.num_vars < 0) throw ValidationError("qubo header has negative num_vars");
      seen_header = true;
      continue;
    }
    std::vector<std::string> tokens;
    std::string tok;
    while (row >> tok) tokens.push_back(tok);
    auto parse_index = [&](const std::string& s) {
      std::size_t pos = 0;
      int v;
      try {
        v = std::stoi(s, &pos);
      } catch (const std::exception&) {
        throw ValidationError("malformed qubo line: " + line);
      }
      if (pos != s.size() || v < 0 || v >= model.num_vars)
        throw ValidationError("qubo index out of range: " + line);
      return v;
    };
    auto parse_coeff = [&](const std::string& s) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(s, &pos);
      } catch (const std::exception&) {
        throw ValidationError("malformed qubo line: " + line);
      }
      if (pos != s.size()) throw ValidationError("malformed qubo line: " + line);
      return v;
    };
    if (tokens.size() == 2) {
      const int idx = parse_index(tokens[0]);
      if (model.linear.count(idx)) throw ValidationError("duplicate qubo linear entry: " + line);
      model.linear[idx] = parse_coeff(tokens[1]);
    } else if (tokens.size() == 3) {
      int i = parse_index(tokens[0]);
      int j = parse_index(tokens[1]);
      if (i == j) throw ValidationError("qubo quadratic term with identical indices: " + line);
      const double coeff = parse_coeff(tokens[2]);
      const bool reversed = i > j;
      if (reversed) std::swap(i, j);
      auto it = model.quadratic.find({i, j});
      if (it != model.quadratic.end()) {
        if (!reversed) throw ValidationError("duplicate qubo quadratic entry: " + line);
        it->second += coeff;  // reversed duplicate merges
      } else {
        model.quadratic.emplace(std::make_pair(i, j), coeff);
      }
    } else {
      throw ValidationError("malformed qubo line: " + line);
    }
  }
  if (!seen_header) throw ValidationError("qubo file has no header: " + path);
  if (model.linear.size() != expect_linear || model.quadratic.size() != expect_quadratic)
    throw ValidationError("qubo term counts do not match the header");
  return model;
}

}  // namespace ccucp
