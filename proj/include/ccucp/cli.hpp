#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ccucp {

inline constexpr const char* kToolVersion = "ccucp 0.1.0";

std::uint64_t fnv1a64(const std::string& data);

// Deterministic record of one command invocation. The hash covers the tool
// version, command name, flag echo and input-content hashes. Wall time is
// reported on stdout only, never in output files, so re-running the same
// command reproduces every output byte-identically. Flags that cannot change
// results (e.g. --threads) are left out of the echo for the same reason.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // echo, insertion order
  std::map<std::string, std::string> input_hashes;          // path -> 16-hex content hash

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, const char* value);
  void add(const std::string& key, std::int64_t value);
  void add(const std::string& key, std::uint64_t value);
  void add(const std::string& key, int value);
  void add(const std::string& key, double value);
  void add(const std::string& key, bool value);
  void add_input(const std::string& path);

  std::uint64_t hash() const;
  std::string hash_hex() const;
  std::string comment() const;  // "manifest: <hex>" for CSV/text headers
  std::string to_json() const;
};

// Parses argv and dispatches one subcommand. Exit codes: 0 success, 2 invalid
// input, 3 infeasible model, 4 resource/limit exceeded, 1 unexpected failure.
int run_cli(int argc, const char* const* argv);

}  // namespace ccucp
