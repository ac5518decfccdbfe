#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ccucp/encoding.hpp"
#include "ccucp/instance.hpp"
#include "ccucp/sampler.hpp"

namespace ccucp {

// One multiplier per penalty group; reliability is unused for fixed demand.
struct PenaltyWeights {
  double logic1 = 1.0;
  double logic2 = 1.0;
  double demand = 1.0;
  double coupling = 1.0;
  double capacity = 1.0;
  double ramp = 1.0;
  double reliability = 1.0;

  static PenaltyWeights ones() { return {}; }
  // Result of a long adaptive tuning run on the built-in deterministic system;
  // useful as a strong starting point.
  static PenaltyWeights tuned_reference();

  std::string to_json() const;
  static PenaltyWeights from_json(const std::string& text);
};

// Upper-triangular sparse QUBO: energy(x) = offset + sum_i linear_i x_i +
// sum_{i<j} quadratic_ij x_i x_j. Coefficients are dollars, so on a feasible
// bitstring the energy is the schedule cost. Models compiled from an instance
// also carry the integer penalty structure for exact feasibility bookkeeping;
// imported text models have energies only.
struct QuboModel {
  int num_vars = 0;
  std::map<int, double> linear;
  std::map<std::pair<int, int>, double> quadratic;
  double offset = 0.0;

  bool has_structure = false;
  Layout layout;
  PenaltyStructure structure;
  PenaltyWeights weights;

  double energy(const std::vector<std::uint8_t>& bits) const;

  // Constraint-violation energy per group (lambda times an integer violation
  // measure), keys logic1, logic2, demand, coupling, capacity, ramp and, when
  // scenarios are present, reliability. Slack-backed inequalities are measured
  // against their best representable slack, not the slack bits actually set,
  // so a group is exactly 0.0 precisely when the decoded schedule satisfies
  // that constraint group. Violations are integers, so the zero test never
  // depends on float rounding. Note energy() still charges misaligned slack
  // registers; the two agree on feasible, canonically encoded bitstrings.
  std::map<std::string, double> penalty_breakdown(const std::vector<std::uint8_t>& bits) const;

  std::size_t num_couplings() const { return quadratic.size(); }
};

QuboModel compile_qubo(const UcpInstance& inst, const Layout& layout,
                       const PenaltyWeights& weights, const ScenarioSet* scenarios = nullptr,
                       double p_level = 0.0);

// Text format: comment lines starting with '#', a header
//   qubo <num_vars> <num_linear> <num_quadratic> <offset>
// then "<i> <coeff>" lines and "<i> <j> <coeff>" lines (i < j), 12 significant
// digits. Import accepts either index order and merges reversed duplicates,
// but rejects exact duplicate keys.
void export_qubo(const QuboModel& model, const std::string& path,
                 const std::string& header_comment = "");
QuboModel import_qubo(const std::string& path);

}  // namespace ccucp
