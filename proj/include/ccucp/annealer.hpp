#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccucp/instance.hpp"
#include "ccucp/qubo.hpp"
#include "ccucp/sampler.hpp"
#include "ccucp/scenario_model.hpp"

namespace ccucp {

struct AnnealConfig {
  int reads = 100;
  int sweeps = 1000;
  // Inverse-temperature schedule endpoints; values <= 0 select an automatic
  // range from the model's coefficient magnitudes.
  double beta_start = -1.0;
  double beta_end = -1.0;
  std::uint64_t seed = 1;
  int threads = 1;
  // Probability that a bit starts at 1; 0.5 is the uniform-random start.
  double init_density = 0.5;
  // Keep the lowest-energy state visited during the read rather than the
  // final state of the sweep schedule.
  bool track_best = false;
};

struct AnnealSample {
  std::vector<std::uint8_t> bits;
  double energy = 0.0;
  int read_index = 0;
};

struct SampleSet {
  std::vector<AnnealSample> samples;  // ordered by read_index

  // Lowest energy; ties resolved toward the smallest read_index.
  const AnnealSample& best() const;
};

// Automatic schedule: hot end accepts moves against the largest per-variable
// field bound with probability 1/2, cold end suppresses the smallest nonzero
// coefficient by a factor of 100.
std::pair<double, double> default_beta_range(const QuboModel& model);

// Independent restarts of single-flip Metropolis annealing under a geometric
// inverse-temperature schedule; each sweep proposes every variable once in a
// freshly shuffled order. Each read draws from its own substream of
// config.seed, so results are identical for any thread count. Sample energies
// are recomputed exactly from the model at the end of each read.
SampleSet anneal(const QuboModel& model, const AnnealConfig& config);

struct FeasibleBest {
  int read_index = 0;
  double objective = 0.0;
  Solution solution;
};

// Decodes every sample against the model's layout and returns the feasible one
// with the lowest objective, if any. The model must carry its structure.
std::optional<FeasibleBest> best_feasible(const SampleSet& set, const QuboModel& model,
                                          const UcpInstance& inst,
                                          const ScenarioSet* scenarios = nullptr,
                                          double p_level = 0.0);

}  // namespace ccucp
