#pragma once

// Command implementations behind the `amppere` tool. Every command reads and
// writes files under RunConfig::dir and throws on failure.

#include "amppere/pipeline/transport.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace amppere {

struct RunConfig {
  std::string backend = "clear";
  std::string profile = "generic";
  std::string isect = "auto";
  std::string tJaccard = "1/2";
  double tBlock = 0.5;
  int numPerm = 128;
  double fpWeight = 0.5;
  double fnWeight = 0.5;
  double rho = 0.05;
  int pack = 1;
  std::uint64_t seed = 42;
  int jobs = 1;
  int latencyUs = 0;
  int jitterUs = 0;
  int size = 100;
  double split = 0.2;
  std::vector<std::string> thresholds{"0.2", "0.5", "0.8"};
  std::vector<std::string> strategies{"all"};
  std::vector<std::string> backends{"clear", "sim", "mpc"};
  std::filesystem::path dir = "run";

  /// Effective values, written next to every command's outputs.
  KeyValues toKeyValues() const;
};

/// dir/d1.jsonl, dir/d2.jsonl, dir/gold.csv
void cmdGenerate(const RunConfig& config, std::ostream& log);
/// dir/transport/p1, dir/transport/p2
void cmdBlock(const RunConfig& config, std::ostream& log);
/// dir/matches.csv, dir/ledger.csv, dir/stages.csv, dir/rounds.csv (mpc)
void cmdLink(const RunConfig& config, std::ostream& log);
/// dir/bench.csv over thresholds x backends x strategies
void cmdBench(const RunConfig& config, std::ostream& log);
/// dir/metrics.csv for the current matches, dir/sweep.csv for the oracle sweep
void cmdEval(const RunConfig& config, std::ostream& log);

}  // namespace amppere
