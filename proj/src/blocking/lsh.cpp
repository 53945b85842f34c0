#include "amppere/blocking/lsh.hpp"

#include "amppere/machine/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace amppere {
namespace {

constexpr double kIntegrationStep = 0.001;

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mulAddMod(std::uint64_t a, std::uint64_t x, std::uint64_t b) {
  __extension__ using Wide = unsigned __int128;
  const Wide v = static_cast<Wide>(a) * x + b;
  return static_cast<std::uint64_t>(v % kMersenne61);
}

template <typename F>
double trapezoid(F f, double lo, double hi) {
  if (hi <= lo) return 0.0;
  const auto steps = static_cast<int>(std::ceil((hi - lo) / kIntegrationStep - 1e-9));
  const double h = (hi - lo) / steps;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < steps; ++i) sum += f(lo + i * h);
  return sum * h;
}

std::uint64_t fnv1a(const std::uint64_t* words, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (words[i] >> (8 * byte)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

MinHasher::MinHasher(std::uint64_t seed, int permutations) : seed_(seed) {
  if (permutations < 1) throw Error("MinHash needs at least one permutation");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> a(1, kMersenne61 - 1);
  std::uniform_int_distribution<std::uint64_t> b(0, kMersenne61 - 1);
  coefficients_.reserve(static_cast<std::size_t>(permutations));
  for (int i = 0; i < permutations; ++i) {
    const std::uint64_t ai = a(rng);
    coefficients_.emplace_back(ai, b(rng));
  }
}

MinHashSignature MinHasher::sign(const std::vector<std::uint16_t>& tokens) const {
  MinHashSignature sig{std::vector<std::uint64_t>(coefficients_.size(), kMersenne61), seed_};
  for (std::uint16_t t : tokens) {
    const std::uint64_t x = mix(t) % kMersenne61;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
      sig.values[i] = std::min(sig.values[i], mulAddMod(coefficients_[i].first, x, coefficients_[i].second));
    }
  }
  return sig;
}

double estimateSimilarity(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.values.size() != b.values.size() || a.values.empty()) {
    throw Error("signatures of different lengths");
  }
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) same += a.values[i] == b.values[i];
  return static_cast<double>(same) / static_cast<double>(a.values.size());
}

MinHashSignature unionSignature(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.values.size() != b.values.size() || a.seed != b.seed) throw Error("incompatible signatures");
  MinHashSignature out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::min(a.values[i], b.values[i]);
  return out;
}

double collisionProbability(double s, int bands, int rows) {
  return 1.0 - std::pow(1.0 - std::pow(s, rows), bands);
}

double bandObjective(double threshold, int bands, int rows, double fpWeight, double fnWeight) {
  const double fp = trapezoid([&](double s) { return collisionProbability(s, bands, rows); }, 0.0, threshold);
  const double fn = trapezoid([&](double s) { return 1.0 - collisionProbability(s, bands, rows); }, threshold, 1.0);
  return fpWeight * fp + fnWeight * fn;
}

BandPlan optimalBandRange(double threshold, int permutations, double fpWeight, double fnWeight) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw Error("blocking threshold must lie in (0, 1)");
  if (permutations < 1) throw Error("need at least one permutation");
  BandPlan best{1, 1, permutations, fpWeight, fnWeight, std::numeric_limits<double>::infinity()};
  for (int b = 1; b <= permutations; ++b) {
    for (int r = 1; b * r <= permutations; ++r) {
      const double value = bandObjective(threshold, b, r, fpWeight, fnWeight);
      if (value < best.objective) {
        best.bands = b;
        best.rows = r;
        best.objective = value;
      }
    }
  }
  return best;
}

std::vector<std::string> lshKeys(const MinHashSignature& sig, const BandPlan& plan) {
  if (plan.bands < 1 || plan.rows < 1) throw Error("band plan needs b, r >= 1");
  const auto needed = static_cast<std::size_t>(plan.bands) * static_cast<std::size_t>(plan.rows);
  if (needed > sig.values.size()) throw Error("band plan exceeds signature length");
  std::vector<std::string> keys;
  keys.reserve(static_cast<std::size_t>(plan.bands));
  char buf[48];
  for (int band = 0; band < plan.bands; ++band) {
    const auto offset = static_cast<std::size_t>(band) * static_cast<std::size_t>(plan.rows);
    const std::uint64_t h = fnv1a(sig.values.data() + offset, static_cast<std::size_t>(plan.rows));
    std::snprintf(buf, sizeof buf, "%02x-%016llx", band, static_cast<unsigned long long>(h));
    keys.emplace_back(buf);
  }
  return keys;
}

}  // namespace amppere
