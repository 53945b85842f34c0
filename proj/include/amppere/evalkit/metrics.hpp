#pragma once

// Blocking and matching quality: pairs completeness, reduction ratio, F,
// precision and recall.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>

namespace amppere {

using RecordPair = std::pair<std::string, std::string>;
using PairSet = std::set<RecordPair>;

struct GoldStandard {
  PairSet pairs;

  bool contains(const RecordPair& p) const { return pairs.count(p) > 0; }
  std::size_t size() const { return pairs.size(); }
};

struct MetricsReport {
  double threshold = 0.0;
  double pairsCompleteness = 1.0;
  double reductionRatio = 0.0;
  double fScore = 0.0;
  double precision = 1.0;
  double recall = 1.0;
  std::size_t totalPairs = 0;
  std::size_t candidatePairs = 0;
  std::size_t truePairs = 0;
  std::size_t blockedTruePairs = 0;
  std::size_t matchedPairs = 0;
  std::size_t matchedTruePairs = 0;

  static std::string csvHeader();
  std::string csvRow() const;
};

/// Ratios with an empty denominator are reported as 1.
MetricsReport computeMetrics(const GoldStandard& gold, const PairSet& blocked, const PairSet& matched,
                             std::size_t totalPairs);

void writePairs(std::ostream& out, const PairSet& pairs);
void writePairs(const std::filesystem::path& path, const PairSet& pairs);
PairSet readPairs(std::istream& in);
PairSet readPairs(const std::filesystem::path& path);

}  // namespace amppere
