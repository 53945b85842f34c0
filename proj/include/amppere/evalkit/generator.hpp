#pragma once

// Synthetic census-style corpora with corrupted duplicates and lineage.

#include "amppere/blocking/records.hpp"
#include "amppere/evalkit/metrics.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace amppere {

enum class Corruption { kTypo, kOcr, kPhonetic };

std::string corruptionName(Corruption c);

struct CorruptionProfile {
  int maxDuplicatesPerOriginal = 5;
  int maxModificationsPerField = 5;
  int maxModificationsPerRecord = 5;
  double zipfExponent = 1.0;
  std::vector<Corruption> kinds{Corruption::kTypo, Corruption::kOcr, Corruption::kPhonetic};
};

struct GeneratorConfig {
  std::uint64_t seed = 42;
  int size = 100;
  double firstShare = 0.2;
  CorruptionProfile profile;
};

/// The first split holds corrupted duplicates, the second holds distinct
/// originals; every true pair therefore crosses the split.
struct Dataset {
  std::vector<Record> first;
  std::vector<Record> second;
  GoldStandard gold;
  /// duplicate id -> number of modifications applied
  std::map<std::string, int> modifications;

  std::size_t totalPairs() const { return first.size() * second.size(); }
};

Dataset generateDataset(const GeneratorConfig& config = {});

/// Applies one corruption of the given kind in place. Returns false when the
/// kind has no applicable site in `value` (left unchanged).
class Corruptor {
 public:
  explicit Corruptor(std::uint64_t seed) : state_(seed) {}

  bool apply(Corruption kind, std::string& value);
  std::uint64_t next();
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  bool typo(std::string& value);
  bool ocr(std::string& value);
  bool phonetic(std::string& value);

  std::uint64_t state_;
};

}  // namespace amppere
