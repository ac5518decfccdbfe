#include "ccucp/tuner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ccucp/errors.hpp"
#include "ccucp/rng.hpp"

namespace ccucp {

namespace {

std::vector<std::string> group_names(const Layout& layout) {
  std::vector<std::string> names = {"logic1", "logic2", "demand",
                                    "coupling", "capacity", "ramp"};
  if (layout.N > 0) names.push_back("reliability");
  return names;
}

double* weight_field(PenaltyWeights& w, const std::string& name) {
  if (name == "logic1") return &w.logic1;
  if (name == "logic2") return &w.logic2;
  if (name == "demand") return &w.demand;
  if (name == "coupling") return &w.coupling;
  if (name == "capacity") return &w.capacity;
  if (name == "ramp") return &w.ramp;
  if (name == "reliability") return &w.reliability;
  throw ValidationError("unknown penalty group: " + name);
}

}  // namespace

const char* tuner_stop_name(TunerStop reason) {
  switch (reason) {
    case TunerStop::AllGroupsFeasible: return "all_groups_feasible";
    case TunerStop::MaxIterations: return "max_iterations";
    case TunerStop::ThresholdUnattainable: return "threshold_unattainable";
  }
  return "unknown";
}

double feasibility_threshold(int groups, int reads) {
  if (groups <= 0 || reads <= 0) throw ValidationError("threshold needs positive groups and reads");
  return static_cast<double>(groups - 1) / static_cast<double>(groups) +
         1.0 / static_cast<double>(reads);
}

double sigmoid_step(double ratio, double amplitude, double steepness, double midpoint) {
  return amplitude / (1.0 + std::exp(steepness * (ratio - midpoint)));
}

TunerResult tune_weights(const UcpInstance& inst, const Layout& layout,
                         const ScenarioSet* scenarios, double p_level,
                         const TunerConfig& config) {
  if (config.iterations <= 0) throw ValidationError("iterations must be positive");
  if (config.step_amplitude <= 0.0) throw ValidationError("step amplitude must be positive");
  if (layout.N > 0 && scenarios == nullptr)
    throw ValidationError("layout expects scenarios but none were given");

  const std::vector<std::string> names = group_names(layout);
  const double threshold =
      feasibility_threshold(static_cast<int>(names.size()), config.anneal.reads);

  TunerResult result;
  result.weights = config.initial;
  if (threshold > 1.0) {
    // With reads < groups even a perfect group cannot clear the bar.
    result.reason = TunerStop::ThresholdUnattainable;
    return result;
  }

  for (int iter = 0; iter < config.iterations; ++iter) {
    const QuboModel model = compile_qubo(inst, layout, result.weights, scenarios, p_level);
    AnnealConfig ac = config.anneal;
    ac.seed = derive_seed(config.seed, static_cast<std::uint64_t>(iter));
    const SampleSet set = anneal(model, ac);

    std::map<std::string, int> zero_counts;
    for (const auto& name : names) zero_counts[name] = 0;
    int joint = 0;
    double best_energy = std::numeric_limits<double>::infinity();
    for (const auto& sample : set.samples) {
      const auto breakdown = model.penalty_breakdown(sample.bits);
      bool all_zero = true;
      for (const auto& name : names) {
        // Group totals are integer residual sums scaled by the weight, so a
        // satisfied group is exactly zero.
        if (breakdown.at(name) == 0.0) {
          ++zero_counts[name];
        } else {
          all_zero = false;
        }
      }
      if (all_zero) ++joint;
      best_energy = std::min(best_energy, sample.energy);
    }

    TunerTraceRow row;
    row.iteration = iter;
    row.joint_ratio = static_cast<double>(joint) / static_cast<double>(set.samples.size());
    row.best_energy = best_energy;
    bool all_above = true;
    for (const auto& name : names) {
      const double ratio =
          static_cast<double>(zero_counts[name]) / static_cast<double>(set.samples.size());
      row.ratios[name] = ratio;
      row.lambdas[name] = *weight_field(result.weights, name);
      if (ratio < threshold) all_above = false;
    }
    result.trace.push_back(row);
    result.iterations_run = iter + 1;

    if (all_above) {
      result.reason = TunerStop::AllGroupsFeasible;
      return result;
    }
    for (const auto& name : names) {
      double* w = weight_field(result.weights, name);
      *w *= 1.0 + sigmoid_step(row.ratios[name], config.step_amplitude, config.steepness,
                               config.midpoint);
    }
  }
  result.reason = TunerStop::MaxIterations;
  return result;
}

void write_trace_csv(const TunerResult& result, const std::string& path,
                     const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write trace file: " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  std::vector<std::string> names;
  if (!result.trace.empty())
    for (const auto& [name, v] : result.trace.front().ratios) {
      (void)v;
      names.push_back(name);
    }
  out << "iteration";
  for (const auto& name : names) out << ",lambda_" << name;
  for (const auto& name : names) out << ",ratio_" << name;
  out << ",joint_ratio,best_energy\n";
  char buf[64];
  for (const auto& row : result.trace) {
    out << row.iteration;
    for (const auto& name : names) {
      std::snprintf(buf, sizeof(buf), "%.10g", row.lambdas.at(name));
      out << ',' << buf;
    }
    for (const auto& name : names) {
      std::snprintf(buf, sizeof(buf), "%.10g", row.ratios.at(name));
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.10g", row.joint_ratio);
    out << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.10g", row.best_energy);
    out << ',' << buf << "\n";
  }
  if (!out.good()) throw ValidationError("failed writing trace file: " + path);
}

}  // namespace ccucp
