#include "ccucp/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ccucp {

using nlohmann::json;

std::vector<std::vector<double>> correlation_matrix(const std::string& regime) {
  double r12, r13, r23;
  if (regime == "none") {
    r12 = r13 = r23 = 0.0;
  } else if (regime == "moderate") {
    r12 = 0.3;
    r13 = 0.4;
    r23 = 0.5;
  } else if (regime == "strong") {
    r12 = 0.6;
    r13 = 0.7;
    r23 = 0.8;
  } else {
    throw ValidationError("unknown correlation regime '" + regime + "' (valid: none, moderate, strong)");
  }
  return {{1.0, r12, r13}, {r12, 1.0, r23}, {r13, r23, 1.0}};
}

namespace {

std::vector<GeneratorParams> builtin_generators() {
  // p_min p_max r_down r_up c_startup c_shutdown b c_fixed
  std::vector<GeneratorParams> gens(3);
  gens[0] = {50, 350, 200, 300, money_from_double(20.0), money_from_double(0.5),
             money_from_double(5.0), money_from_double(0.10)};
  gens[1] = {80, 200, 100, 150, money_from_double(18.0), money_from_double(0.3),
             money_from_double(7.0), money_from_double(0.125)};
  gens[2] = {40, 140, 100, 100, money_from_double(5.0), money_from_double(1.0),
             money_from_double(6.0), money_from_double(0.150)};
  return gens;
}

InitialState builtin_initial() { return {{0, 0, 1}, {0.0, 0.0, 100.0}}; }

}  // namespace

UcpInstance builtin_deterministic_instance() {
  UcpInstance inst;
  inst.generators = builtin_generators();
  inst.horizon = 3;
  inst.initial = builtin_initial();
  inst.demand = FixedDemand{{160.0, 500.0, 400.0}};
  return inst;
}

UcpInstance builtin_stochastic_instance(const std::string& regime) {
  UcpInstance inst;
  inst.generators = builtin_generators();
  inst.horizon = 3;
  inst.initial = builtin_initial();
  inst.demand = GaussianDemand{{225.0, 630.0, 400.0}, {25.0, 40.0, 28.0}, correlation_matrix(regime)};
  return inst;
}

std::vector<std::string> validate(const UcpInstance& inst) {
  std::vector<std::string> issues;
  auto add = [&](const std::string& msg) { issues.push_back(msg); };

  const int g_count = inst.num_generators();
  const int t_count = inst.horizon;
  if (g_count < 1) add("instance has no generators");
  if (t_count < 1) add("horizon must be at least 1");

  for (int g = 0; g < g_count; ++g) {
    const auto& gen = inst.generators[g];
    const std::string who = "generator " + std::to_string(g + 1);
    if (gen.p_min < 0) add(who + ": p_min (" + std::to_string(gen.p_min) + ") is negative");
    if (gen.p_max < 0) add(who + ": p_max (" + std::to_string(gen.p_max) + ") is negative");
    if (gen.p_min > gen.p_max)
      add(who + ": p_min (" + std::to_string(gen.p_min) + ") exceeds p_max (" +
          std::to_string(gen.p_max) + ")");
    if (gen.r_up < 0) add(who + ": r_up is negative");
    if (gen.r_down < 0) add(who + ": r_down is negative");
    if (gen.c_startup < 0) add(who + ": c_startup is negative");
    if (gen.c_shutdown < 0) add(who + ": c_shutdown is negative");
    if (gen.c_fixed < 0) add(who + ": c_fixed is negative");
    if (gen.b < 0) add(who + ": b is negative");
  }

  if (static_cast<int>(inst.initial.u0.size()) != g_count)
    add("initial.u0 length does not match generator count");
  if (static_cast<int>(inst.initial.p0.size()) != g_count)
    add("initial.p0 length does not match generator count");
  for (int g = 0; g < g_count && g < static_cast<int>(inst.initial.u0.size()) &&
                  g < static_cast<int>(inst.initial.p0.size());
       ++g) {
    const std::string who = "generator " + std::to_string(g + 1);
    const int u0 = inst.initial.u0[g];
    const double p0 = inst.initial.p0[g];
    if (u0 != 0 && u0 != 1) add(who + ": u0 must be 0 or 1");
    if (u0 == 0 && p0 != 0.0) add(who + ": p0 must be 0 when u0 is 0");
    if (u0 == 1 && g < g_count &&
        (p0 < inst.generators[g].p_min - 1e-9 || p0 > inst.generators[g].p_max + 1e-9))
      add(who + ": p0 outside [p_min, p_max] while committed");
  }

  if (const auto* fixed = std::get_if<FixedDemand>(&inst.demand)) {
    if (static_cast<int>(fixed->d.size()) != t_count)
      add("demand.d length does not match horizon");
    for (std::size_t t = 0; t < fixed->d.size(); ++t)
      if (!(fixed->d[t] >= 0.0)) add("demand.d[" + std::to_string(t) + "] is negative or NaN");
  } else {
    const auto& gd = std::get<GaussianDemand>(inst.demand);
    if (static_cast<int>(gd.mu.size()) != t_count) add("demand.mu length does not match horizon");
    if (static_cast<int>(gd.sigma.size()) != t_count)
      add("demand.sigma length does not match horizon");
    for (std::size_t t = 0; t < gd.sigma.size(); ++t)
      if (!(gd.sigma[t] > 0.0)) add("demand.sigma[" + std::to_string(t) + "] must be positive");
    const std::size_t n = gd.corr.size();
    if (static_cast<int>(n) != t_count) {
      add("demand.corr must be horizon x horizon");
    } else {
      bool shape_ok = true;
      for (const auto& row : gd.corr)
        if (row.size() != n) shape_ok = false;
      if (!shape_ok) {
        add("demand.corr must be square");
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (std::abs(gd.corr[i][i] - 1.0) > 1e-12)
            add("demand.corr diagonal entry " + std::to_string(i) + " is not 1");
          for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(gd.corr[i][j] - gd.corr[j][i]) > 1e-12)
              add("demand.corr is not symmetric at (" + std::to_string(i) + "," +
                  std::to_string(j) + ")");
            if (gd.corr[i][j] < -1.0 - 1e-12 || gd.corr[i][j] > 1.0 + 1e-12)
              add("correlation out of range at (" + std::to_string(i) + "," + std::to_string(j) +
                  "): " + std::to_string(gd.corr[i][j]));
          }
        }
        // Cholesky probe: fails exactly when the matrix is not positive semidefinite.
        if (issues.empty()) {
          std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
          for (std::size_t k = 0; k < n && issues.empty(); ++k) {
            double pivot = gd.corr[k][k];
            for (std::size_t j = 0; j < k; ++j) pivot -= l[k][j] * l[k][j];
            if (pivot < -1e-10) {
              add("correlation matrix is not positive semidefinite (pivot " + std::to_string(k) +
                  ")");
              break;
            }
            l[k][k] = std::sqrt(std::max(pivot, 0.0));
            for (std::size_t i = k + 1; i < n; ++i) {
              double v = gd.corr[i][k];
              for (std::size_t j = 0; j < k; ++j) v -= l[i][j] * l[k][j];
              l[i][k] = l[k][k] > 0.0 ? v / l[k][k] : 0.0;
            }
          }
        }
      }
    }
  }
  return issues;
}

namespace {

Money money_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError(std::string("missing or non-numeric generator field: ") + key);
  return money_from_double(j[key].get<double>());
}

int int_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ValidationError(std::string("missing or non-numeric generator field: ") + key);
  const double v = j[key].get<double>();
  const long long r = std::llround(v);
  if (std::abs(v - static_cast<double>(r)) > 1e-9)
    throw ValidationError(std::string("generator field must be integral MW: ") + key);
  return static_cast<int>(r);
}

}  // namespace

UcpInstance instance_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed instance JSON: ") + e.what());
  }
  try {
    UcpInstance inst;
    if (!j.contains("generators") || !j["generators"].is_array())
      throw ValidationError("instance JSON lacks a generators array");
    for (const auto& gj : j["generators"]) {
      GeneratorParams gp;
      gp.p_min = int_field(gj, "p_min");
      gp.p_max = int_field(gj, "p_max");
      gp.r_up = int_field(gj, "r_up");
      gp.r_down = int_field(gj, "r_down");
      gp.c_startup = money_field(gj, "c_startup");
      gp.c_shutdown = money_field(gj, "c_shutdown");
      gp.c_fixed = money_field(gj, "c_fixed");
      gp.b = money_field(gj, "b");
      inst.generators.push_back(gp);
    }
    if (!j.contains("horizon") || !j["horizon"].is_number_integer())
      throw ValidationError("instance JSON lacks an integer horizon");
    inst.horizon = j["horizon"].get<int>();
    if (!j.contains("initial")) throw ValidationError("instance JSON lacks initial state");
    inst.initial.u0 = j["initial"].at("u0").get<std::vector<int>>();
    inst.initial.p0 = j["initial"].at("p0").get<std::vector<double>>();
    if (!j.contains("demand") || !j["demand"].contains("kind"))
      throw ValidationError("instance JSON lacks demand.kind");
    const std::string kind = j["demand"]["kind"].get<std::string>();
    if (kind == "fixed") {
      inst.demand = FixedDemand{j["demand"].at("d").get<std::vector<double>>()};
    } else if (kind == "gaussian") {
      GaussianDemand gd;
      gd.mu = j["demand"].at("mu").get<std::vector<double>>();
      gd.sigma = j["demand"].at("sigma").get<std::vector<double>>();
      gd.corr = j["demand"].at("corr").get<std::vector<std::vector<double>>>();
      inst.demand = gd;
    } else {
      throw ValidationError("demand.kind must be \"fixed\" or \"gaussian\"");
    }
    return inst;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed instance JSON: ") + e.what());
  }
}

std::string instance_to_json(const UcpInstance& inst) {
  json j;
  j["generators"] = json::array();
  for (const auto& gp : inst.generators) {
    j["generators"].push_back({{"p_min", gp.p_min},
                               {"p_max", gp.p_max},
                               {"r_up", gp.r_up},
                               {"r_down", gp.r_down},
                               {"c_startup", money_to_double(gp.c_startup)},
                               {"c_shutdown", money_to_double(gp.c_shutdown)},
                               {"c_fixed", money_to_double(gp.c_fixed)},
                               {"b", money_to_double(gp.b)}});
  }
  j["horizon"] = inst.horizon;
  j["initial"] = {{"u0", inst.initial.u0}, {"p0", inst.initial.p0}};
  if (const auto* fixed = std::get_if<FixedDemand>(&inst.demand)) {
    j["demand"] = {{"kind", "fixed"}, {"d", fixed->d}};
  } else {
    const auto& gd = inst.gaussian_demand();
    j["demand"] = {{"kind", "gaussian"}, {"mu", gd.mu}, {"sigma", gd.sigma}, {"corr", gd.corr}};
  }
  return j.dump(2);
}

UcpInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  UcpInstance inst = instance_from_json(buf.str());
  auto issues = validate(inst);
  if (!issues.empty()) {
    std::string msg = "invalid instance " + path + ":";
    for (const auto& m : issues) msg += "\n  " + m;
    throw ValidationError(msg);
  }
  return inst;
}

void save_instance(const UcpInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write instance file: " + path);
  out << instance_to_json(inst) << "\n";
}

}  // namespace ccucp
