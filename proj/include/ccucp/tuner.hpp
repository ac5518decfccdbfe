#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccucp/annealer.hpp"
#include "ccucp/encoding.hpp"
#include "ccucp/instance.hpp"
#include "ccucp/qubo.hpp"
#include "ccucp/sampler.hpp"

namespace ccucp {

struct TunerConfig {
  int iterations = 50;
  double step_amplitude = 0.5;  // largest relative increase per iteration
  double steepness = 14.0;      // sigmoid slope around the midpoint
  double midpoint = 0.3;        // zero-penalty ratio where the step is half its amplitude
  PenaltyWeights initial = PenaltyWeights::ones();
  AnnealConfig anneal;  // per-iteration sampling; its seed field is ignored
  std::uint64_t seed = 1;
};

enum class TunerStop {
  AllGroupsFeasible,      // every group's zero-penalty ratio reached the threshold
  MaxIterations,          // iteration budget exhausted first
  ThresholdUnattainable,  // too few reads for the threshold to be reachable at all
};

const char* tuner_stop_name(TunerStop reason);

struct TunerTraceRow {
  int iteration = 0;
  std::map<std::string, double> lambdas;  // weights in force during this iteration
  std::map<std::string, double> ratios;   // per-group zero-penalty sample ratios
  double joint_ratio = 0.0;               // samples with every group at zero
  double best_energy = 0.0;
};

struct TunerResult {
  PenaltyWeights weights;  // weights after the last applied update
  std::vector<TunerTraceRow> trace;
  TunerStop reason = TunerStop::MaxIterations;
  int iterations_run = 0;
};

// A group counts as reliably satisfied once its ratio reaches
// (groups - 1) / groups + 1 / reads; above 1 it can never be met.
double feasibility_threshold(int groups, int reads);

// Relative weight increase A / (1 + exp(steepness * (ratio - midpoint))):
// near-maximal for groups that are almost never satisfied, vanishing for
// groups already close to always satisfied.
double sigmoid_step(double ratio, double amplitude, double steepness, double midpoint);

// Iteratively re-anneals the compiled model and inflates the weight of each
// penalty group by a sigmoid of its zero-penalty sample ratio, stopping as
// soon as every group clears the feasibility threshold (checked before the
// update is applied). Each iteration anneals under substream
// derive_seed(config.seed, iteration).
TunerResult tune_weights(const UcpInstance& inst, const Layout& layout,
                         const ScenarioSet* scenarios, double p_level,
                         const TunerConfig& config);

// One CSV row per iteration: lambdas, ratios, joint ratio, best energy.
// A nonempty comment is written first as "# <comment>".
void write_trace_csv(const TunerResult& result, const std::string& path,
                     const std::string& comment = "");

}  // namespace ccucp
