#include "ccucp/annealer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ccucp/encoding.hpp"
#include "ccucp/errors.hpp"
#include "ccucp/rng.hpp"

namespace ccucp {

namespace {

// Compressed adjacency of the quadratic terms plus dense linear fields.
struct Couplings {
  int n = 0;
  std::vector<double> h;
  std::vector<int> start;  // n + 1 offsets into idx/val
  std::vector<int> idx;
  std::vector<double> val;
};

Couplings build_couplings(const QuboModel& model) {
  Couplings c;
  c.n = model.num_vars;
  c.h.assign(c.n, 0.0);
  for (const auto& [i, v] : model.linear) c.h[i] = v;
  std::vector<int> degree(c.n, 0);
  for (const auto& [key, v] : model.quadratic) {
    (void)v;
    ++degree[key.first];
    ++degree[key.second];
  }
  c.start.assign(c.n + 1, 0);
  for (int i = 0; i < c.n; ++i) c.start[i + 1] = c.start[i] + degree[i];
  c.idx.resize(c.start[c.n]);
  c.val.resize(c.start[c.n]);
  std::vector<int> cursor(c.start.begin(), c.start.end() - 1);
  for (const auto& [key, v] : model.quadratic) {
    c.idx[cursor[key.first]] = key.second;
    c.val[cursor[key.first]++] = v;
    c.idx[cursor[key.second]] = key.first;
    c.val[cursor[key.second]++] = v;
  }
  return c;
}

// One independent read: random start, Metropolis sweeps over a geometric
// beta ladder, exact energy recompute on the returned state.
AnnealSample run_read(const QuboModel& model, const Couplings& c, const AnnealConfig& cfg,
                      double beta_start, double beta_end, int read_index) {
  Rng rng(cfg.seed, static_cast<std::uint64_t>(read_index));
  const int n = c.n;
  std::vector<std::uint8_t> x(n, 0);
  for (int i = 0; i < n; ++i)
    x[i] = static_cast<std::uint8_t>(rng.next_unit() < cfg.init_density ? 1 : 0);

  // field[i] = h_i + sum_j J_ij x_j, so flipping i changes the energy by
  // (1 - 2 x_i) * field[i].
  std::vector<double> field(c.h);
  for (int i = 0; i < n; ++i) {
    if (!x[i]) continue;
    for (int k = c.start[i]; k < c.start[i + 1]; ++k) field[c.idx[k]] += c.val[k];
  }

  double cur_energy = model.energy(x);
  double best_energy = cur_energy;
  std::vector<std::uint8_t> best_bits = x;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  const double ratio = (cfg.sweeps > 1) ? std::pow(beta_end / beta_start,
                                                   1.0 / static_cast<double>(cfg.sweeps - 1))
                                        : 1.0;
  double beta = beta_start;
  for (int sweep = 0; sweep < cfg.sweeps; ++sweep, beta *= ratio) {
    rng.shuffle(order);  // fresh proposal order each sweep avoids index bias
    for (int pos = 0; pos < n; ++pos) {
      const int i = order[pos];
      const double delta = (1 - 2 * static_cast<int>(x[i])) * field[i];
      if (delta > 0.0) {
        const double scaled = beta * delta;
        if (scaled > 44.0) continue;  // exp(-44) is far below any next_unit draw
        if (rng.next_unit() >= std::exp(-scaled)) continue;
      }
      const double sign = x[i] ? -1.0 : 1.0;
      x[i] ^= 1u;
      cur_energy += delta;
      for (int k = c.start[i]; k < c.start[i + 1]; ++k) field[c.idx[k]] += sign * c.val[k];
      if (cfg.track_best && cur_energy < best_energy) {
        best_energy = cur_energy;
        best_bits = x;
      }
    }
  }

  AnnealSample sample;
  sample.read_index = read_index;
  sample.bits = cfg.track_best ? std::move(best_bits) : std::move(x);
  sample.energy = model.energy(sample.bits);
  return sample;
}

}  // namespace

const AnnealSample& SampleSet::best() const {
  if (samples.empty()) throw ValidationError("no samples");
  const AnnealSample* b = &samples.front();
  for (const auto& s : samples)
    if (s.energy < b->energy) b = &s;
  return *b;
}

std::pair<double, double> default_beta_range(const QuboModel& model) {
  // Hot end: ln(2) over the largest single-flip energy bound |h_i| + sum|J_ij|,
  // so even the stiffest variable starts accepting uphill moves half the time.
  // Cold end: ln(100) over the smallest nonzero coefficient, freezing the
  // finest energy scale down to a 1% acceptance rate.
  std::vector<double> bound(model.num_vars, 0.0);
  double min_scale = std::numeric_limits<double>::infinity();
  for (const auto& [i, v] : model.linear) {
    bound[i] += std::abs(v);
    if (v != 0.0) min_scale = std::min(min_scale, std::abs(v));
  }
  for (const auto& [key, v] : model.quadratic) {
    bound[key.first] += std::abs(v);
    bound[key.second] += std::abs(v);
    if (v != 0.0) min_scale = std::min(min_scale, std::abs(v));
  }
  const double max_bound =
      bound.empty() ? 0.0 : *std::max_element(bound.begin(), bound.end());
  if (max_bound <= 0.0 || !std::isfinite(min_scale)) return {0.1, 10.0};
  const double hot = std::log(2.0) / max_bound;
  const double cold = std::log(100.0) / min_scale;
  return {hot, std::max(cold, hot * 2.0)};
}

SampleSet anneal(const QuboModel& model, const AnnealConfig& config) {
  if (model.num_vars <= 0) throw ValidationError("cannot anneal an empty model");
  if (config.reads <= 0) throw ValidationError("reads must be positive");
  if (config.sweeps <= 0) throw ValidationError("sweeps must be positive");
  double beta_start = config.beta_start;
  double beta_end = config.beta_end;
  if (beta_start <= 0.0 || beta_end <= 0.0) {
    const auto [hot, cold] = default_beta_range(model);
    if (beta_start <= 0.0) beta_start = hot;
    if (beta_end <= 0.0) beta_end = cold;
  }
  if (beta_end < beta_start) throw ValidationError("beta schedule must not cool upward");

  const Couplings c = build_couplings(model);
  SampleSet set;
  set.samples.resize(config.reads);

  int threads = config.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;
  threads = std::min(threads, config.reads);

  auto worker = [&](int first, int stride) {
    for (int r = first; r < config.reads; r += stride)
      set.samples[r] = run_read(model, c, config, beta_start, beta_end, r);
  };
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& th : pool) th.join();
  }
  return set;
}

std::optional<FeasibleBest> best_feasible(const SampleSet& set, const QuboModel& model,
                                          const UcpInstance& inst, const ScenarioSet* scenarios,
                                          double p_level) {
  if (!model.has_structure)
    throw ValidationError("model carries no layout; cannot decode samples");
  std::optional<FeasibleBest> best;
  for (const auto& s : set.samples) {
    Solution sol = decode_solution(inst, model.layout, s.bits);
    const FeasibilityReport report = check_feasible(inst, sol, scenarios, p_level);
    if (!report.feasible) continue;
    if (!best || sol.objective < best->objective) {
      best = FeasibleBest{s.read_index, sol.objective, std::move(sol)};
    }
  }
  return best;
}

}  // namespace ccucp
