#pragma once

// Cleartext blocking + Jaccard entity resolution, the reference every private
// run is compared against.

#include "amppere/blocking/blocks.hpp"
#include "amppere/evalkit/generator.hpp"
#include "amppere/evalkit/metrics.hpp"
#include "amppere/intersect/intersect.hpp"

#include <vector>

namespace amppere {

struct OracleResult {
  PairSet candidates;
  PairSet matches;
};

/// Same strict rule as the private decision: den * inter > num * (s1 + s2 - inter).
bool jaccardAbove(std::size_t inter, std::size_t s1, std::size_t s2, const JaccardParams& params);

/// Distinct shared containers of two encoded records.
std::size_t containerOverlap(const EncodedRecord& a, const EncodedRecord& b);

/// Candidates are cross pairs sharing at least one blocking key; matches are
/// candidates whose container Jaccard exceeds the threshold.
OracleResult resolveCleartext(const PreparedDataset& first, const PreparedDataset& second,
                              const JaccardParams& params);

struct SweepRow {
  BandPlan plan;
  MetricsReport metrics;
};

/// For each threshold t: blocking plan optimalBandRange(t) and Jaccard
/// threshold t rounded to six decimals.
std::vector<SweepRow> expectedPerformanceSweep(const Dataset& data, const std::vector<double>& thresholds,
                                               const BlockingConfig& base = {});

std::vector<double> defaultSweepThresholds();

}  // namespace amppere
