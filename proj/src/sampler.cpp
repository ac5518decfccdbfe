#include "ccucp/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccucp/rng.hpp"

namespace ccucp {

using nlohmann::json;

std::vector<std::vector<double>> cholesky_lower(const std::vector<std::vector<double>>& corr) {
  const std::size_t n = corr.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    if (corr[k].size() != n) throw ValidationError("correlation matrix is not square");
    double pivot = corr[k][k];
    for (std::size_t j = 0; j < k; ++j) pivot -= l[k][j] * l[k][j];
    if (pivot < -1e-10)
      throw ValidationError("correlation matrix is not positive semidefinite (pivot " +
                            std::to_string(k) + ")");
    l[k][k] = std::sqrt(std::max(pivot, 0.0));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = corr[i][k];
      for (std::size_t j = 0; j < k; ++j) v -= l[i][j] * l[k][j];
      l[i][k] = l[k][k] > 0.0 ? v / l[k][k] : 0.0;
    }
  }
  return l;
}

namespace {

double quantize2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

ScenarioSet sample_scenarios(const UcpInstance& inst, int n, std::uint64_t seed,
                             const std::string& regime_label) {
  if (!inst.is_stochastic())
    throw ValidationError("sampling requires an instance with gaussian demand");
  if (n < 1) throw ValidationError("scenario count must be positive");
  const auto& gd = inst.gaussian_demand();
  const int t_count = inst.horizon;
  const auto l = cholesky_lower(gd.corr);

  ScenarioSet set;
  set.n = n;
  set.horizon = t_count;
  set.seed = seed;
  set.regime = regime_label;
  set.demand.resize(static_cast<std::size_t>(n) * t_count);
  std::vector<double> z(t_count);
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    for (int t = 0; t < t_count; ++t) z[t] = rng.next_normal();
    for (int t = 0; t < t_count; ++t) {
      double corr_z = 0.0;
      for (int j = 0; j <= t; ++j) corr_z += l[t][j] * z[j];
      const double d = gd.mu[t] + gd.sigma[t] * corr_z;
      set.demand[static_cast<std::size_t>(i) * t_count + t] = quantize2(std::max(d, 0.0));
    }
  }
  return set;
}

std::vector<double> scenario_mean(const ScenarioSet& set) {
  std::vector<double> mean(set.horizon, 0.0);
  for (int i = 0; i < set.n; ++i)
    for (int t = 0; t < set.horizon; ++t) mean[t] += set.at(i, t);
  for (auto& m : mean) m /= set.n;
  return mean;
}

std::vector<std::vector<double>> scenario_covariance(const ScenarioSet& set) {
  const auto mean = scenario_mean(set);
  std::vector<std::vector<double>> cov(set.horizon, std::vector<double>(set.horizon, 0.0));
  for (int i = 0; i < set.n; ++i)
    for (int s = 0; s < set.horizon; ++s)
      for (int t = 0; t < set.horizon; ++t)
        cov[s][t] += (set.at(i, s) - mean[s]) * (set.at(i, t) - mean[t]);
  const double denom = set.n > 1 ? set.n - 1 : 1;
  for (auto& row : cov)
    for (auto& v : row) v /= denom;
  return cov;
}

void save_scenarios(const ScenarioSet& set, const std::string& path,
                    const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write scenario file: " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  for (int t = 0; t < set.horizon; ++t) out << (t ? "," : "") << "t" << (t + 1);
  out << "\n";
  char buf[32];
  for (int i = 0; i < set.n; ++i) {
    for (int t = 0; t < set.horizon; ++t) {
      std::snprintf(buf, sizeof buf, "%.2f", set.at(i, t));
      out << (t ? "," : "") << buf;
    }
    out << "\n";
  }
  json meta = {{"seed", set.seed}, {"regime", set.regime}, {"n", set.n}};
  if (!comment.empty()) meta["comment"] = comment;
  std::ofstream mout(path + ".meta.json");
  if (!mout) throw ValidationError("cannot write scenario metadata: " + path + ".meta.json");
  mout << meta.dump(2) << "\n";
}

ScenarioSet load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  ScenarioSet set;
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> values;
    bool is_header = header;
    while (std::getline(row, cell, ',')) {
      if (is_header) {
        if (cell.empty() || cell[0] != 't')
          throw ValidationError("scenario CSV header must be t1,...,tT");
        continue;
      }
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ValidationError("scenario CSV line " + std::to_string(line_no) +
                              " has a non-numeric cell: " + cell);
      }
    }
    if (is_header) {
      std::stringstream recount(line);
      int cols = 0;
      while (std::getline(recount, cell, ',')) ++cols;
      set.horizon = cols;
      header = false;
      continue;
    }
    if (static_cast<int>(values.size()) != set.horizon)
      throw ValidationError("scenario CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(values.size()) + " columns, expected " +
                            std::to_string(set.horizon));
    for (double v : values) {
      if (!(v >= 0.0)) throw ValidationError("scenario CSV demand is negative or NaN");
      set.demand.push_back(quantize2(v));
    }
    ++set.n;
  }
  if (set.horizon == 0 || set.n == 0)
    throw ValidationError("scenario CSV holds no scenarios: " + path);

  std::ifstream min(path + ".meta.json");
  if (min) {
    try {
      json meta = json::parse(min);
      set.seed = meta.value("seed", std::uint64_t{0});
      set.regime = meta.value("regime", std::string("unknown"));
      if (meta.contains("n") && meta["n"].get<int>() != set.n)
        throw ValidationError("scenario metadata n does not match CSV row count");
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed scenario metadata: ") + e.what());
    }
  } else {
    set.regime = "unknown";
  }
  return set;
}

}  // namespace ccucp
