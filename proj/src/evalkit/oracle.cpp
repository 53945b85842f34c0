#include "amppere/evalkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace amppere {

bool jaccardAbove(std::size_t inter, std::size_t s1, std::size_t s2, const JaccardParams& params) {
  const auto i = static_cast<std::int64_t>(inter);
  const auto u = static_cast<std::int64_t>(s1 + s2) - i;
  return params.denominator * i > params.numerator * u;
}

std::size_t containerOverlap(const EncodedRecord& a, const EncodedRecord& b) {
  const std::unordered_set<std::int64_t> left(a.containers.begin(), a.containers.end());
  std::size_t n = 0;
  for (auto c : b.containers) n += left.count(c);
  return n;
}

OracleResult resolveCleartext(const PreparedDataset& first, const PreparedDataset& second,
                              const JaccardParams& params) {
  const InvertedIndex right = buildIndex(second);
  OracleResult out;
  for (const auto& r1 : first.records) {
    std::vector<std::int64_t> partners;
    for (const auto& key : r1.keys) {
      const auto hit = right.find(key);
      if (hit != right.end()) partners.insert(partners.end(), hit->second.begin(), hit->second.end());
    }
    std::sort(partners.begin(), partners.end());
    partners.erase(std::unique(partners.begin(), partners.end()), partners.end());
    for (auto j : partners) {
      const auto& r2 = second.records[static_cast<std::size_t>(j)];
      out.candidates.emplace(r1.id, r2.id);
      const auto inter = containerOverlap(r1.encoded, r2.encoded);
      if (jaccardAbove(inter, r1.encoded.containers.size(), r2.encoded.containers.size(), params)) {
        out.matches.emplace(r1.id, r2.id);
      }
    }
  }
  return out;
}

std::vector<double> defaultSweepThresholds() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

std::vector<SweepRow> expectedPerformanceSweep(const Dataset& data, const std::vector<double>& thresholds,
                                               const BlockingConfig& base) {
  std::vector<SweepRow> rows;
  for (double t : thresholds) {
    BlockingConfig config = base;
    config.plan = optimalBandRange(t, base.plan.permutations, base.plan.fpWeight, base.plan.fnWeight);
    const auto first = prepareDataset(data.first, config);
    const auto second = prepareDataset(data.second, config);
    const auto params = JaccardParams::rational(std::llround(t * 1e6), 1000000);
    const auto result = resolveCleartext(first, second, params);
    SweepRow row{config.plan, computeMetrics(data.gold, result.candidates, result.matches, data.totalPairs())};
    row.metrics.threshold = t;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace amppere
