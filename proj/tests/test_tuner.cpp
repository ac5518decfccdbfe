#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "ccucp/encoding.hpp"
#include "ccucp/instance.hpp"
#include "ccucp/money.hpp"
#include "ccucp/qubo.hpp"
#include "ccucp/tuner.hpp"
#include "helpers.hpp"

using namespace ccucp;

namespace {

std::map<std::string, double> weights_as_map(const PenaltyWeights& w, bool with_reliability) {
  std::map<std::string, double> m{{"logic1", w.logic1},   {"logic2", w.logic2},
                                  {"demand", w.demand},   {"coupling", w.coupling},
                                  {"capacity", w.capacity}, {"ramp", w.ramp}};
  if (with_reliability) m["reliability"] = w.reliability;
  return m;
}

// A single generator over one period that any committed schedule satisfies
// easily; used where the tuner should declare success immediately.
UcpInstance trivial_instance() {
  UcpInstance inst;
  GeneratorParams gen;
  gen.p_min = 0;
  gen.p_max = 3;
  gen.r_up = 3;
  gen.r_down = 3;
  gen.c_startup = money_from_double(1.0);
  gen.c_shutdown = money_from_double(1.0);
  gen.c_fixed = money_from_double(1.0);
  gen.b = money_from_double(1.0);
  inst.generators = {gen};
  inst.horizon = 1;
  inst.initial.u0 = {0};
  inst.initial.p0 = {0.0};
  inst.demand = FixedDemand{{0.0}};
  return inst;
}

}  // namespace

TEST_SUITE("tuner") {

TEST_CASE("feasibility threshold formula") {
  CHECK(feasibility_threshold(6, 100) == doctest::Approx(5.0 / 6.0 + 0.01));
  CHECK(feasibility_threshold(1, 20) == doctest::Approx(0.05));
  CHECK(feasibility_threshold(7, 1000) == doctest::Approx(6.0 / 7.0 + 0.001));
  // One read can never satisfy a multi-group threshold.
  CHECK(feasibility_threshold(6, 1) > 1.0);
}

TEST_CASE("sigmoid step sizes") {
  const double amplitude = 0.5, steepness = 14.0, midpoint = 0.3;
  // At the midpoint the step is half the amplitude.
  CHECK(sigmoid_step(midpoint, amplitude, steepness, midpoint) ==
        doctest::Approx(amplitude / 2.0));
  // Ratios near one barely move the weight.
  CHECK(sigmoid_step(1.0, amplitude, steepness, midpoint) ==
        doctest::Approx(amplitude / (1.0 + std::exp(steepness * 0.7))).epsilon(1e-12));
  CHECK(sigmoid_step(1.0, amplitude, steepness, midpoint) < 5e-5);
  // Ratios near zero push almost the full amplitude.
  CHECK(sigmoid_step(0.0, amplitude, steepness, midpoint) ==
        doctest::Approx(amplitude / (1.0 + std::exp(-steepness * 0.3))).epsilon(1e-12));
  CHECK(sigmoid_step(0.0, amplitude, steepness, midpoint) > 0.49);
  // Strictly decreasing in the ratio.
  double prev = sigmoid_step(0.0, amplitude, steepness, midpoint);
  for (double r = 0.05; r <= 1.0 + 1e-12; r += 0.05) {
    const double cur = sigmoid_step(r, amplitude, steepness, midpoint);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("weight inflation on the desk-scale system") {
  const UcpInstance inst = builtin_deterministic_instance();
  const Layout layout = make_layout(inst);
  TunerConfig cfg;
  cfg.iterations = 6;
  cfg.anneal.reads = 30;
  cfg.anneal.sweeps = 40;
  cfg.seed = 11;

  const TunerResult result = tune_weights(inst, layout, nullptr, 0.0, cfg);

  SUBCASE("stops at the iteration budget with one trace row per iteration") {
    CHECK(result.reason == TunerStop::MaxIterations);
    CHECK(std::string(tuner_stop_name(result.reason)) == "max_iterations");
    CHECK(result.iterations_run == 6);
    CHECK(result.trace.size() == 6);
    for (int k = 0; k < 6; ++k) CHECK(result.trace[k].iteration == k);
  }

  SUBCASE("each weight grows monotonically within the per-step cap") {
    const auto initial = weights_as_map(cfg.initial, false);
    auto prev = initial;
    for (const auto& row : result.trace) {
      for (const auto& [name, lambda] : row.lambdas) {
        CAPTURE(name);
        REQUIRE(prev.count(name) == 1);
        CHECK(lambda >= prev.at(name));
        CHECK(lambda <= prev.at(name) * (1.0 + cfg.step_amplitude) + 1e-12);
      }
      prev = row.lambdas;
    }
    // The returned weights carry the final applied update.
    const auto last = weights_as_map(result.weights, false);
    for (const auto& [name, lambda] : last) {
      CHECK(lambda >= prev.at(name));
      CHECK(lambda <= initial.at(name) * std::pow(1.0 + cfg.step_amplitude, 6) + 1e-9);
    }
  }

  SUBCASE("trace rows carry the weights in force, not the updated ones") {
    const auto initial = weights_as_map(cfg.initial, false);
    CHECK(result.trace.front().lambdas == initial);
  }

  SUBCASE("ratios are sample fractions") {
    for (const auto& row : result.trace) {
      for (const auto& [name, ratio] : row.ratios) {
        CHECK(ratio >= 0.0);
        CHECK(ratio <= 1.0);
      }
      CHECK(row.joint_ratio >= 0.0);
      // The joint ratio can never beat any single group's ratio.
      for (const auto& [name, ratio] : row.ratios) CHECK(row.joint_ratio <= ratio + 1e-12);
    }
  }

  SUBCASE("a rerun reproduces the trace bitwise") {
    const TunerResult again = tune_weights(inst, layout, nullptr, 0.0, cfg);
    REQUIRE(again.trace.size() == result.trace.size());
    for (std::size_t k = 0; k < result.trace.size(); ++k) {
      CHECK(again.trace[k].lambdas == result.trace[k].lambdas);
      CHECK(again.trace[k].ratios == result.trace[k].ratios);
      CHECK(again.trace[k].joint_ratio == result.trace[k].joint_ratio);
      CHECK(again.trace[k].best_energy == result.trace[k].best_energy);
    }
  }

  SUBCASE("thread count does not change the trace") {
    TunerConfig par = cfg;
    par.anneal.threads = 4;
    const TunerResult again = tune_weights(inst, layout, nullptr, 0.0, par);
    REQUIRE(again.trace.size() == result.trace.size());
    for (std::size_t k = 0; k < result.trace.size(); ++k)
      CHECK(again.trace[k].ratios == result.trace[k].ratios);
  }
}

TEST_CASE("single-iteration run applies exactly one bounded update") {
  const UcpInstance inst = builtin_deterministic_instance();
  const Layout layout = make_layout(inst);
  TunerConfig cfg;
  cfg.iterations = 1;
  cfg.anneal.reads = 25;
  cfg.anneal.sweeps = 30;
  cfg.seed = 4;
  const TunerResult result = tune_weights(inst, layout, nullptr, 0.0, cfg);
  CHECK(result.trace.size() == 1);
  CHECK(result.iterations_run == 1);
  // Short schedules on this model leave every group violated sometimes, so
  // every weight moves strictly upward, but never past the cap.
  const auto last = weights_as_map(result.weights, false);
  for (const auto& [name, lambda] : last) {
    CAPTURE(name);
    CHECK(lambda > 1.0);
    CHECK(lambda < 1.0 + cfg.step_amplitude + 1e-12);
  }
}

TEST_CASE("an unreachable threshold aborts before annealing") {
  const UcpInstance inst = builtin_deterministic_instance();
  const Layout layout = make_layout(inst);
  TunerConfig cfg;
  cfg.iterations = 10;
  cfg.anneal.reads = 1;  // threshold (groups-1)/groups + 1/1 > 1
  cfg.anneal.sweeps = 10;
  const TunerResult result = tune_weights(inst, layout, nullptr, 0.0, cfg);
  CHECK(result.reason == TunerStop::ThresholdUnattainable);
  CHECK(std::string(tuner_stop_name(result.reason)) == "threshold_unattainable");
  CHECK(result.iterations_run == 0);
  CHECK(result.trace.empty());
  const auto w = weights_as_map(result.weights, false);
  for (const auto& [name, lambda] : w) CHECK(lambda == 1.0);
}

TEST_CASE("already-feasible systems stop without touching the weights") {
  // Huge initial weights on a trivially satisfiable system: nearly every read
  // decodes feasible, so the stop condition fires on the first check and the
  // weights come back exactly as configured.
  const UcpInstance inst = trivial_instance();
  REQUIRE(validate(inst).empty());
  const Layout layout = make_layout(inst);
  TunerConfig cfg;
  cfg.iterations = 10;
  cfg.initial.logic1 = cfg.initial.logic2 = cfg.initial.demand = cfg.initial.coupling =
      cfg.initial.capacity = cfg.initial.ramp = 1e6;
  cfg.anneal.reads = 40;
  cfg.anneal.sweeps = 300;
  cfg.seed = 8;
  const TunerResult result = tune_weights(inst, layout, nullptr, 0.0, cfg);
  CHECK(result.reason == TunerStop::AllGroupsFeasible);
  CHECK(std::string(tuner_stop_name(result.reason)) == "all_groups_feasible");
  CHECK(result.iterations_run == 1);
  CHECK(result.trace.size() == 1);
  const auto w = weights_as_map(result.weights, false);
  for (const auto& [name, lambda] : w) CHECK(lambda == 1e6);
}

TEST_CASE("trace CSV layout") {
  const UcpInstance inst = builtin_deterministic_instance();
  const Layout layout = make_layout(inst);
  TunerConfig cfg;
  cfg.iterations = 3;
  cfg.anneal.reads = 20;
  cfg.anneal.sweeps = 25;
  cfg.seed = 2;
  const TunerResult result = tune_weights(inst, layout, nullptr, 0.0, cfg);

  testutil::TempDir dir;
  const std::string path = dir.file("trace.csv");
  write_trace_csv(result, path, "short tuning run");
  const std::string text = testutil::read_text(path);
  CHECK(text.rfind("# short tuning run\n", 0) == 0);

  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  REQUIRE(lines.size() == 2 + result.trace.size());  // comment + header + rows
  const std::string header = lines[1];
  CHECK(header ==
        "iteration,lambda_capacity,lambda_coupling,lambda_demand,lambda_logic1,"
        "lambda_logic2,lambda_ramp,ratio_capacity,ratio_coupling,ratio_demand,"
        "ratio_logic1,ratio_logic2,ratio_ramp,joint_ratio,best_energy");
  // Each data row has as many fields as the header and starts with its index.
  const auto count_fields = [](const std::string& line) {
    std::size_t n = 1;
    for (char ch : line)
      if (ch == ',') ++n;
    return n;
  };
  const std::size_t expect = count_fields(header);
  for (std::size_t k = 2; k < lines.size(); ++k) {
    CHECK(count_fields(lines[k]) == expect);
    CHECK(lines[k].rfind(std::to_string(k - 2) + ",", 0) == 0);
  }

  SUBCASE("no comment line when the comment is empty") {
    const std::string bare_path = dir.file("bare.csv");
    write_trace_csv(result, bare_path);
    const std::string bare = testutil::read_text(bare_path);
    CHECK(bare.rfind("iteration,", 0) == 0);
  }
}

}  // TEST_SUITE
