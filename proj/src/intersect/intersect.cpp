#include "amppere/intersect/intersect.hpp"

#include "amppere/backends/plain.hpp"
#include "amppere/machine/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace amppere {
namespace {

void probe(const IntersectOptions& opts, std::string_view step, const PrivateVector& v) {
  if (opts.probe) opts.probe(step, v);
}

// Oracle-mode input check; silently skipped on contexts that hide contents.
void checkInputs(const IntersectOptions& opts, const PrivateVector& v, const char* which) {
  if (!opts.checkPreconditions) return;
  const auto plain = v.context().inspect(v.value());
  if (!plain) return;
  std::set<double> seen;
  std::visit(
      [&](const auto& m) {
        for (Index i = 0; i < m.size(); ++i) {
          const auto x = m.data()[i];
          if (static_cast<double>(x) >= static_cast<double>(kSentinel)) {
            throw PreconditionViolation(std::string(which) + " contains the padding sentinel");
          }
          if (!seen.insert(static_cast<double>(x)).second) {
            throw PreconditionViolation(std::string(which) + " has duplicate entries");
          }
        }
      },
      *plain);
}

PrivateScalar zero(Backend& ctx) { return encScalar(ctx, std::int64_t{0}); }

// Pads with the public sentinel up to `length`.
PrivateVector padTo(const PrivateVector& v, Index length) {
  if (v.size() >= length) return v;
  return concat(v, encFilled(v.context(), length - v.size(), kSentinel));
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

}  // namespace

std::string_view strategyName(IntersectStrategy s) {
  switch (s) {
    case IntersectStrategy::kPairwise: return "pj";
    case IntersectStrategy::kRotation: return "vr";
    case IntersectStrategy::kExtension: return "ve";
    case IntersectStrategy::kSort: return "so";
    case IntersectStrategy::kJoin: return "mj";
    case IntersectStrategy::kAuto: return "auto";
  }
  return "?";
}

IntersectStrategy parseStrategy(std::string_view s) {
  for (auto candidate : {IntersectStrategy::kPairwise, IntersectStrategy::kRotation,
                         IntersectStrategy::kExtension, IntersectStrategy::kSort,
                         IntersectStrategy::kJoin, IntersectStrategy::kAuto}) {
    if (strategyName(candidate) == s) return candidate;
  }
  throw Error("unknown intersection strategy '" + std::string(s) + "'");
}

bool supports(const Capabilities& caps, IntersectStrategy s) {
  switch (s) {
    case IntersectStrategy::kPairwise: return caps.nativeEq || caps.division;
    case IntersectStrategy::kRotation: return caps.rotation && (caps.nativeEq || caps.division);
    case IntersectStrategy::kExtension: return caps.repeatElements && (caps.nativeEq || caps.division);
    case IntersectStrategy::kSort: return caps.sort && (caps.nativeEq || caps.division);
    case IntersectStrategy::kJoin: return caps.join;
    case IntersectStrategy::kAuto: return true;
  }
  return false;
}

namespace {

void requireSupported(const Backend& ctx, IntersectStrategy s) {
  if (!supports(ctx.capabilities(), s)) {
    throw CapabilityUnsupported("strategy " + std::string(strategyName(s)) + " is not supported by " +
                                ctx.name() + " (" + ctx.capabilities().str() + ")");
  }
}

}  // namespace

PrivateScalar zeroCount(const PrivateVector& diff) {
  Backend& ctx = diff.context();
  const Index n = diff.size();
  const PrivateVector bits = eeq(diff, broadcast(zero(ctx), n));
  return dot(bits, encFilled(ctx, n, 1));
}

PrivateScalar isectPJ(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts) {
  Backend& ctx = v1.context();
  requireSupported(ctx, IntersectStrategy::kPairwise);
  checkInputs(opts, v1, "v1");
  checkInputs(opts, v2, "v2");
  std::vector<PrivateVector> rhs;
  for (Index j = 0; j < v2.size(); ++j) rhs.emplace_back(at(v2, j).value());
  PrivateScalar acc = zero(ctx);
  for (Index i = 0; i < v1.size(); ++i) {
    const PrivateVector lhs(at(v1, i).value());
    for (const auto& r : rhs) acc = acc + PrivateScalar(eeq(lhs, r).value());
  }
  return acc;
}

PrivateScalar isectVR(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts) {
  Backend& ctx = v1.context();
  requireSupported(ctx, IntersectStrategy::kRotation);
  checkInputs(opts, v1, "v1");
  checkInputs(opts, v2, "v2");
  const Index length = std::max(v1.size(), v2.size());
  const PrivateVector a = padTo(v1, length);
  const PrivateVector b = padTo(v2, length);
  PrivateScalar acc = zero(ctx);
  for (Index k = 0; k < length; ++k) {
    const PrivateVector diff = a - rshift(b, k);
    probe(opts, "diff", diff);
    acc = acc + zeroCount(diff);
  }
  return acc;
}

PrivateScalar isectVE(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts) {
  Backend& ctx = v1.context();
  requireSupported(ctx, IntersectStrategy::kExtension);
  checkInputs(opts, v1, "v1");
  checkInputs(opts, v2, "v2");
  const PrivateVector a = repeat(v1, v2.size());
  const PrivateVector b = repeatElements(v2, v1.size());
  probe(opts, "v1'", a);
  probe(opts, "v2'", b);
  const PrivateVector diff = a - b;
  probe(opts, "diff", diff);
  return zeroCount(diff);
}

PrivateScalar isectSO(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts) {
  Backend& ctx = v1.context();
  requireSupported(ctx, IntersectStrategy::kSort);
  checkInputs(opts, v1, "v1");
  checkInputs(opts, v2, "v2");
  const PrivateVector merged = sort(concat(v1, v2));
  probe(opts, "sorted", merged);
  const Index total = merged.size();
  const Index pairs = total > 0 ? total - 1 : 0;
  const PrivateVector diff = slice(merged, 0, pairs) - slice(merged, total > 0 ? 1 : 0, pairs);
  probe(opts, "diff", diff);
  return zeroCount(diff);
}

PrivateScalar isectMJ(const PrivateVector& v1, const PrivateVector& v2, const IntersectOptions& opts) {
  Backend& ctx = v1.context();
  requireSupported(ctx, IntersectStrategy::kJoin);
  checkInputs(opts, v1, "v1");
  checkInputs(opts, v2, "v2");
  return PrivateScalar(ctx.joinCount(v1.value(), v2.value()));
}

PrivateScalar intersectSize(IntersectStrategy s, const PrivateVector& v1, const PrivateVector& v2,
                            const IntersectOptions& opts) {
  switch (s) {
    case IntersectStrategy::kPairwise: return isectPJ(v1, v2, opts);
    case IntersectStrategy::kRotation: return isectVR(v1, v2, opts);
    case IntersectStrategy::kExtension: return isectVE(v1, v2, opts);
    case IntersectStrategy::kSort: return isectSO(v1, v2, opts);
    case IntersectStrategy::kJoin: return isectMJ(v1, v2, opts);
    case IntersectStrategy::kAuto: {
      StrategySelector selector;
      return intersectSize(selector.choose(v1.context(), v1.size(), v2.size()), v1, v2, opts);
    }
  }
  throw Error("unreachable strategy");
}

// --- Strategy selection --------------------------------------------------------

double StrategySelector::dryRunCost(const Backend& ctx, IntersectStrategy s, Index m, Index n) {
  BackendOptions options = ctx.options();
  options.recordTrace = false;
  std::unique_ptr<Backend> counter;
  if (ctx.domain() == Domain::kApprox) {
    counter = std::make_unique<ApproxPlainBackend>("dry-run", ctx.capabilities(), options, true);
    auto rng = std::make_shared<std::mt19937_64>(options.seed);
    counter->setReciprocalHelper(ReciprocalHelper{rng, counter->grant(Role::kP3)});
  } else {
    counter = std::make_unique<ExactPlainBackend>("dry-run", ctx.capabilities(), options, true);
  }
  IntVector a(m), b(n);
  for (Index i = 0; i < m; ++i) a(i) = 1 + 2 * i;
  for (Index i = 0; i < n; ++i) b(i) = 1 + 3 * i;
  const auto pa = encVector(*counter, a);
  const auto pb = encVector(*counter, b);
  counter->resetAccounting();
  (void)intersectSize(s, pa, pb);
  return counter->ledger().weightedTotal(options.weights);
}

IntersectStrategy StrategySelector::choose(const Backend& ctx, Index m, Index n) {
  const auto key = std::make_tuple(ctx.family(), m, n);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::optional<IntersectStrategy> best;
  double bestCost = std::numeric_limits<double>::infinity();
  for (auto s : kConcreteStrategies) {
    if (!supports(ctx.capabilities(), s)) continue;
    const double cost = dryRunCost(ctx, s, m, n);
    if (cost < bestCost) {
      bestCost = cost;
      best = s;
    }
  }
  if (!best) throw CapabilityUnsupported("no intersection strategy is supported by " + ctx.name());
  std::lock_guard lock(mu_);
  cache_[key] = *best;
  return *best;
}

// --- Jaccard decision ----------------------------------------------------------

JaccardParams JaccardParams::rational(std::int64_t numerator, std::int64_t denominator, double epsilon) {
  if (denominator <= 0 || numerator <= 0 || numerator >= denominator) {
    throw Error("Jaccard threshold must satisfy 0 < t < 1, got " + std::to_string(numerator) + "/" +
                std::to_string(denominator));
  }
  if (epsilon < 0) throw Error("Jaccard epsilon must be non-negative");
  const std::int64_t g = gcd64(numerator, denominator);
  return JaccardParams{numerator / g, denominator / g, epsilon};
}

JaccardParams JaccardParams::parse(std::string_view text, double epsilon) {
  auto parseInt = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error("bad threshold '" + std::string(text) + "'");
    return v;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return rational(parseInt(text.substr(0, slash)), parseInt(text.substr(slash + 1)), epsilon);
  }
  // Decimal: digits after the point become the denominator's power of ten.
  const auto dot = text.find('.');
  std::string digits(text.substr(0, dot));
  std::int64_t denominator = 1;
  if (dot != std::string_view::npos) {
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 15) throw Error("threshold '" + std::string(text) + "' has too many digits");
    digits += frac;
    for (std::size_t i = 0; i < frac.size(); ++i) denominator *= 10;
  }
  if (digits.empty()) throw Error("bad threshold '" + std::string(text) + "'");
  return rational(parseInt(digits), denominator, epsilon);
}

std::string JaccardParams::str() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

PrivateBool jaccardDecision(const PrivateScalar& inter, Index s1, Index s2, const JaccardParams& params) {
  Backend& ctx = inter.context();
  const auto sizes = static_cast<std::int64_t>(s1 + s2);
  if (ctx.domain() == Domain::kExact) {
    // (den + num) * inter - num * (s1 + s2) > 0
    const PrivateScalar lhs = inter * encScalar(ctx, params.denominator + params.numerator) -
                              encScalar(ctx, params.numerator * sizes);
    return greater(lhs, zero(ctx));
  }
  const auto& helper = ctx.reciprocalHelper();
  if (!helper) throw PreconditionViolation("approximate Jaccard needs a reciprocal helper on " + ctx.name());
  const PrivateScalar unionSize = encScalar(ctx, static_cast<double>(sizes)) - inter;
  const PrivateScalar similarity = inter * maskedReciprocal(unionSize, *helper);
  return greater(similarity + encScalar(ctx, params.epsilon), encScalar(ctx, params.threshold()));
}

PrivateBool jaccardMatch(const PrivateVector& r1, const PrivateVector& r2, const JaccardParams& params,
                         IntersectStrategy strategy, const IntersectOptions& opts,
                         StrategySelector* selector) {
  Backend& ctx = r1.context();
  if (strategy == IntersectStrategy::kAuto) {
    StrategySelector local;
    strategy = (selector ? *selector : local).choose(ctx, r1.size(), r2.size());
  }
  const Index s1 = size(r1);
  const Index s2 = size(r2);
  return jaccardDecision(intersectSize(strategy, r1, r2, opts), s1, s2, params);
}

}  // namespace amppere
