#include "amppere/evalkit/metrics.hpp"

#include "amppere/machine/errors.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace amppere {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::size_t overlap(const PairSet& pairs, const GoldStandard& gold) {
  std::size_t n = 0;
  for (const auto& p : pairs) n += gold.contains(p);
  return n;
}

}  // namespace

std::string MetricsReport::csvHeader() {
  return "threshold,pc,rr,f,precision,recall,total_pairs,candidate_pairs,true_pairs,blocked_true,matched,"
         "matched_true";
}

std::string MetricsReport::csvRow() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%zu,%zu,%zu,%zu,%zu,%zu", threshold,
                pairsCompleteness, reductionRatio, fScore, precision, recall, totalPairs, candidatePairs,
                truePairs, blockedTruePairs, matchedPairs, matchedTruePairs);
  return buf;
}

MetricsReport computeMetrics(const GoldStandard& gold, const PairSet& blocked, const PairSet& matched,
                             std::size_t totalPairs) {
  if (blocked.size() > totalPairs) throw Error("more candidate pairs than comparisons");
  MetricsReport m;
  m.totalPairs = totalPairs;
  m.candidatePairs = blocked.size();
  m.truePairs = gold.size();
  m.blockedTruePairs = overlap(blocked, gold);
  m.matchedPairs = matched.size();
  m.matchedTruePairs = overlap(matched, gold);

  m.pairsCompleteness = ratio(m.blockedTruePairs, m.truePairs);
  m.reductionRatio = totalPairs == 0 ? 0.0 : 1.0 - ratio(m.candidatePairs, totalPairs);
  const double sum = m.pairsCompleteness + m.reductionRatio;
  m.fScore = sum == 0.0 ? 0.0 : 2.0 * m.pairsCompleteness * m.reductionRatio / sum;
  m.precision = ratio(m.matchedTruePairs, m.matchedPairs);
  m.recall = ratio(m.matchedTruePairs, m.truePairs);
  return m;
}

void writePairs(std::ostream& out, const PairSet& pairs) {
  for (const auto& [a, b] : pairs) out << a << ',' << b << '\n';
}

void writePairs(const std::filesystem::path& path, const PairSet& pairs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  writePairs(out, pairs);
}

PairSet readPairs(std::istream& in) {
  PairSet pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw Error("malformed pair line: " + line);
    }
    pairs.emplace(line.substr(0, comma), line.substr(comma + 1));
  }
  return pairs;
}

PairSet readPairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return readPairs(in);
}

}  // namespace amppere
