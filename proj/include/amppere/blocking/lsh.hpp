#pragma once

// MinHash signatures, band/range optimization and LSH blocking keys.

#include "amppere/blocking/tokens.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace amppere {

inline constexpr int kDefaultPermutations = 128;
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

struct MinHashSignature {
  std::vector<std::uint64_t> values;
  std::uint64_t seed = 0;

  friend bool operator==(const MinHashSignature&, const MinHashSignature&) = default;
};

/// Seeded universal hashes h(x) = (a * mix(x) + b) mod (2^61 - 1).
class MinHasher {
 public:
  explicit MinHasher(std::uint64_t seed, int permutations = kDefaultPermutations);

  MinHashSignature sign(const std::vector<std::uint16_t>& tokens) const;
  MinHashSignature sign(const TokenSet& tokens) const { return sign(tokens.tokens); }

  int permutations() const { return static_cast<int>(coefficients_.size()); }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> coefficients_;
};

/// Fraction of agreeing slots.
double estimateSimilarity(const MinHashSignature& a, const MinHashSignature& b);

/// Element-wise minimum (the signature of the union of the underlying sets).
MinHashSignature unionSignature(const MinHashSignature& a, const MinHashSignature& b);

struct BandPlan {
  int bands = 1;
  int rows = 1;
  int permutations = kDefaultPermutations;
  double fpWeight = 0.5;
  double fnWeight = 0.5;
  double objective = 0.0;
};

/// Probability that a pair of similarity s shares at least one band.
double collisionProbability(double s, int bands, int rows);

/// fpW * int_0^t P(s) ds + fnW * int_t^1 (1 - P(s)) ds, trapezoid rule with
/// step 0.001.
double bandObjective(double threshold, int bands, int rows, double fpWeight, double fnWeight);

/// Exhaustive search over b*r <= permutations; ties keep the smaller b, then
/// the smaller r.
BandPlan optimalBandRange(double threshold, int permutations = kDefaultPermutations,
                          double fpWeight = 0.5, double fnWeight = 0.5);

/// One key per band: "<band index hex>-<FNV-1a of the band's slots, hex>".
std::vector<std::string> lshKeys(const MinHashSignature& sig, const BandPlan& plan);

}  // namespace amppere
