#pragma once

// Shared fixtures for the test suites: scratch directories, file helpers and a
// generator of small random systems used by the oracle-equivalence tests.

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccucp/instance.hpp"
#include "ccucp/money.hpp"
#include "ccucp/rng.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ccucp_test_" + tag + "_" + std::to_string(++counter) + "_" +
             std::to_string(static_cast<std::uint64_t>(::getpid())));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

// Small random system with gaussian demand, sized for exhaustive solvers
// (G <= 3, T <= 3). Demands are scaled against the ramp-limited deliverable
// power so most instances admit a feasible schedule; validity is guaranteed.
inline ccucp::UcpInstance random_small_instance(ccucp::Rng& rng) {
  using namespace ccucp;
  UcpInstance inst;
  const int G = 1 + static_cast<int>(rng.next_below(3));
  const int T = 1 + static_cast<int>(rng.next_below(3));
  inst.horizon = T;
  for (int g = 0; g < G; ++g) {
    GeneratorParams gen;
    gen.p_min = static_cast<int>(rng.next_below(41));
    gen.p_max = gen.p_min + 10 + static_cast<int>(rng.next_below(141));
    gen.r_up = 30 + static_cast<int>(rng.next_below(121));
    gen.r_down = 30 + static_cast<int>(rng.next_below(121));
    gen.c_startup = money_from_double(static_cast<double>(rng.next_below(2500)) / 100.0);
    gen.c_shutdown = money_from_double(static_cast<double>(rng.next_below(500)) / 100.0);
    gen.c_fixed = money_from_double(static_cast<double>(rng.next_below(1200)) / 100.0);
    gen.b = money_from_double(0.05 + static_cast<double>(rng.next_below(195)) / 100.0);
    inst.generators.push_back(gen);
  }
  inst.initial.u0.resize(G);
  inst.initial.p0.resize(G);
  for (int g = 0; g < G; ++g) {
    inst.initial.u0[g] = static_cast<int>(rng.next_below(2));
    if (inst.initial.u0[g] == 1) {
      const auto& gen = inst.generators[g];
      inst.initial.p0[g] = static_cast<double>(
          gen.p_min + static_cast<int>(rng.next_below(
                          static_cast<std::uint64_t>(gen.p_max - gen.p_min + 1))));
    } else {
      inst.initial.p0[g] = 0.0;
    }
  }
  // Ramp-limited deliverable cap per period, used to keep demand in range.
  std::vector<double> deliverable(T, 0.0);
  for (int g = 0; g < G; ++g) {
    const auto& gen = inst.generators[g];
    double level = inst.initial.u0[g] ? inst.initial.p0[g] : 0.0;
    for (int t = 0; t < T; ++t) {
      level = std::min(static_cast<double>(gen.p_max), level + gen.r_up);
      deliverable[t] += level;
    }
  }
  GaussianDemand dem;
  dem.mu.resize(T);
  dem.sigma.resize(T);
  for (int t = 0; t < T; ++t) {
    const double frac = 0.25 + 0.45 * rng.next_unit();
    dem.mu[t] = frac * deliverable[t];
    dem.sigma[t] = 1.0 + 0.04 * dem.mu[t] * rng.next_unit();
  }
  static const char* regimes[] = {"none", "moderate", "strong"};
  const auto full = correlation_matrix(regimes[rng.next_below(3)]);
  dem.corr.assign(T, std::vector<double>(T, 0.0));
  for (int a = 0; a < T; ++a)
    for (int b = 0; b < T; ++b) dem.corr[a][b] = full[a][b];
  inst.demand = dem;
  return inst;
}

}  // namespace testutil
