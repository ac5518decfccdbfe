#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccucp/instance.hpp"

namespace ccucp {

// Demand realizations, row-major n x horizon. Values are clamped at zero and
// quantized to 2 decimals at sampling time, so the in-memory set and its CSV
// round-trip are bit-identical.
struct ScenarioSet {
  int n = 0;
  int horizon = 0;
  std::vector<double> demand;
  std::uint64_t seed = 0;
  std::string regime = "custom";

  double at(int i, int t) const { return demand[static_cast<std::size_t>(i) * horizon + t]; }
};

// Lower-triangular factor L with L L^T = corr; throws ValidationError when the
// matrix is not positive semidefinite. Semidefinite (singular) inputs yield a
// factor with zero columns, which is exactly what sampling needs.
std::vector<std::vector<double>> cholesky_lower(const std::vector<std::vector<double>>& corr);

// Scenario i is drawn from substream i of the seed: D_i = mu + sigma ∘ (L z_i).
// Adding scenarios never changes earlier ones, regardless of n.
ScenarioSet sample_scenarios(const UcpInstance& inst, int n, std::uint64_t seed,
                             const std::string& regime_label = "custom");

// Sample mean per period and sample covariance (horizon x horizon).
std::vector<double> scenario_mean(const ScenarioSet& set);
std::vector<std::vector<double>> scenario_covariance(const ScenarioSet& set);

// CSV with header t1,...,tT and 2-decimal rows, plus a JSON metadata sidecar
// (<path>.meta.json) carrying seed, regime and n. A nonempty comment is
// written first as "# <comment>" and copied into the sidecar.
void save_scenarios(const ScenarioSet& set, const std::string& path,
                    const std::string& comment = "");
ScenarioSet load_scenarios(const std::string& path);

}  // namespace ccucp
