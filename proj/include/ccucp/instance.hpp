#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ccucp/errors.hpp"
#include "ccucp/money.hpp"

namespace ccucp {

// Power quantities (limits, ramps) are integral MW; costs are fixed-point Money.
struct GeneratorParams {
  int p_min = 0;
  int p_max = 0;
  int r_up = 0;    // max increase per period, MW
  int r_down = 0;  // max decrease per period, MW
  Money c_startup = 0;
  Money c_shutdown = 0;
  Money c_fixed = 0;  // per committed period
  Money b = 0;        // $/MW marginal cost
};

// State just before the first period: commitment flags and output levels.
struct InitialState {
  std::vector<int> u0;
  std::vector<double> p0;
};

struct FixedDemand {
  std::vector<double> d;  // one value per period
};

struct GaussianDemand {
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<std::vector<double>> corr;  // T x T correlation, across periods
};

using DemandSpec = std::variant<FixedDemand, GaussianDemand>;

struct UcpInstance {
  std::vector<GeneratorParams> generators;
  int horizon = 0;
  InitialState initial;
  DemandSpec demand;

  int num_generators() const { return static_cast<int>(generators.size()); }
  bool is_stochastic() const { return std::holds_alternative<GaussianDemand>(demand); }
  const FixedDemand& fixed_demand() const { return std::get<FixedDemand>(demand); }
  const GaussianDemand& gaussian_demand() const { return std::get<GaussianDemand>(demand); }
};

// Returns human-readable violations; empty means the instance is usable.
std::vector<std::string> validate(const UcpInstance& inst);

// Pairwise correlation presets across the three periods of the built-in system:
// "none", "moderate", "strong".
std::vector<std::vector<double>> correlation_matrix(const std::string& regime);

// Three-generator, three-period system with fixed demand (160, 500, 400) MW.
UcpInstance builtin_deterministic_instance();

// Same system with Gaussian demand, mu=(225,630,400), sigma=(25,40,28).
UcpInstance builtin_stochastic_instance(const std::string& regime = "moderate");

UcpInstance instance_from_json(const std::string& text);
std::string instance_to_json(const UcpInstance& inst);
UcpInstance load_instance(const std::string& path);  // parse + validate, throws ValidationError
void save_instance(const UcpInstance& inst, const std::string& path);

}  // namespace ccucp
