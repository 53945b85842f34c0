#pragma once

// Private set-intersection cardinality over encoded token vectors, and the
// thresholded Jaccard decision built on it.

#include "amppere/machine/ops.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace amppere {

enum class IntersectStrategy : std::uint8_t {
  kPairwise,         // pj
  kRotation,         // vr
  kExtension,        // ve
  kSort,             // so
  kJoin,             // mj
  kAuto,             // cheapest supported, by dry run
};

std::string_view strategyName(IntersectStrategy s);
/// Accepts pj, vr, ve, so, mj, auto.
IntersectStrategy parseStrategy(std::string_view s);

inline constexpr IntersectStrategy kConcreteStrategies[] = {
    IntersectStrategy::kPairwise, IntersectStrategy::kRotation, IntersectStrategy::kExtension,
    IntersectStrategy::kSort, IntersectStrategy::kJoin};

/// Whether `caps` has what the strategy needs. Pairwise needs an equality
/// gate or the division route for the arithmetic workaround; rotation,
/// extension, sort and join need the like-named capability.
bool supports(const Capabilities& caps, IntersectStrategy s);

/// Largest value an encoded token can take (ASCII bigrams packed four to a
/// 64-bit container); the padding sentinel lies above it.
inline constexpr std::int64_t kTokenMax = 0x7f7f7f7f7f7f7f7fLL;

/// Observes named intermediate vectors (test and fixture hook).
using IntersectProbe = std::function<void(std::string_view step, const PrivateVector& value)>;

struct IntersectOptions {
  /// On a context that allows inspection, verify uniqueness and sentinel
  /// freedom of the inputs and raise PreconditionViolation otherwise.
  bool checkPreconditions = false;
  IntersectProbe probe;
};

/// Number of zero slots: eeq against 0, then a dot product with all-ones.
PrivateScalar zeroCount(const PrivateVector& diff);

PrivateScalar isectPJ(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts = {});
PrivateScalar isectVR(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts = {});
PrivateScalar isectVE(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts = {});
PrivateScalar isectSO(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts = {});
PrivateScalar isectMJ(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts = {});

/// Dispatches on a concrete strategy; kAuto resolves through a selector.
PrivateScalar intersectSize(IntersectStrategy s, const PrivateVector& v1, const PrivateVector& v2,
                            const IntersectOptions& opts = {});

/// Picks the supported strategy with the lowest weighted ledger total for
/// the given input lengths, by running each one on a counting context with
/// the same capabilities and weights. Results are cached per length pair.
class StrategySelector {
 public:
  IntersectStrategy choose(const Backend& ctx, Index m, Index n);

  /// Weighted cost of one strategy on inputs of lengths m and n.
  static double dryRunCost(const Backend& ctx, IntersectStrategy s, Index m, Index n);

 private:
  std::mutex mu_;
  std::map<std::tuple<std::uint64_t, Index, Index>, IntersectStrategy> cache_;
};

/// Jaccard threshold t = numerator / denominator, with the tolerance used on
/// approximate backends.
struct JaccardParams {
  std::int64_t numerator = 1;
  std::int64_t denominator = 2;
  double epsilon = 1e-6;

  double threshold() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

  /// Parses "P/Q" or a decimal such as "0.35"; requires 0 < t < 1.
  static JaccardParams parse(std::string_view text, double epsilon = 1e-6);
  static JaccardParams rational(std::int64_t numerator, std::int64_t denominator, double epsilon = 1e-6);

  std::string str() const;
};

/// inter / (s1 + s2 - inter) > t. Exact contexts use the division-free form
/// den*inter > num*(s1 + s2 - inter); approximate ones add epsilon and use
/// the masked reciprocal.
PrivateBool jaccardDecision(const PrivateScalar& inter, Index s1, Index s2, const JaccardParams& params);

PrivateBool jaccardMatch(const PrivateVector& r1, const PrivateVector& r2, const JaccardParams& params,
                         IntersectStrategy strategy, const IntersectOptions& opts = {},
                         StrategySelector* selector = nullptr);

}  // namespace amppere
