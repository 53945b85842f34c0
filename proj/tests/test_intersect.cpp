#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amppere/intersect/intersect.hpp"
#include "amppere/machine/errors.hpp"
#include "support.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace amppere;
using namespace amppere::testing;

namespace {

std::int64_t bruteForce(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::set<std::int64_t> sa(a.begin(), a.end());
  std::int64_t n = 0;
  for (auto x : b) n += sa.count(x);
  return n;
}

// Unique random tokens from a small range so overlaps are common.
std::vector<std::int64_t> uniqueTokens(std::mt19937_64& rng, std::size_t n, std::int64_t range) {
  std::set<std::int64_t> s;
  std::uniform_int_distribution<std::int64_t> d(0x2020, 0x2020 + range);
  while (s.size() < n) s.insert(d(rng));
  std::vector<std::int64_t> out(s.begin(), s.end());
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

IntVector fromStd(const std::vector<std::int64_t>& v) {
  return Eigen::Map<const IntVector>(v.data(), static_cast<Index>(v.size()));
}

std::vector<NamedContext> allContexts() {
  auto out = exactContexts();
  out.push_back({"sim:simd", BackendKind::kObliviousSim, Profile::kSimd});
  return out;
}

}  // namespace

TEST_CASE("zero count") {
  for (const auto& c : allContexts()) {
    CAPTURE(c.label);
    auto ctx = make(c);
    const auto p1 = ctx->grant(Role::kP1);
    CHECK(decInt(zeroCount(encVector(*ctx, ivec({-1, 0, -3}))), p1) == 1);
    CHECK(decInt(zeroCount(encVector(*ctx, ivec({0, 0, 0}))), p1) == 3);
  }
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  const auto p1 = ctx->grant(Role::kP1);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    IntVector v(1 + trial % 20);
    for (Index i = 0; i < v.size(); ++i) v(i) = static_cast<std::int64_t>(rng() % 3) - 1;
    REQUIRE(decInt(zeroCount(encVector(*ctx, v)), p1) == (v.array() == 0).count());
  }
}

TEST_CASE("worked examples") {
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  const auto p1 = ctx->grant(Role::kP1);
  const auto v1 = encVector(*ctx, ivec({1, 2, 4}));
  const auto v2 = encVector(*ctx, ivec({2, 3}));

  std::map<std::string, std::vector<std::int64_t>> seen;
  IntersectOptions opts;
  opts.probe = [&](std::string_view step, const PrivateVector& v) {
    if (!seen.count(std::string(step))) seen[std::string(step)] = toStd(decInt(v, p1));
  };

  CHECK(decInt(isectVE(v1, v2, opts), p1) == 1);
  CHECK(seen["v1'"] == std::vector<std::int64_t>{1, 2, 4, 1, 2, 4});
  CHECK(seen["v2'"] == std::vector<std::int64_t>{2, 2, 2, 3, 3, 3});
  CHECK(seen["diff"] == std::vector<std::int64_t>{-1, 0, 2, -2, -1, 1});

  seen.clear();
  CHECK(decInt(isectSO(v1, v2, opts), p1) == 1);
  CHECK(seen["sorted"] == std::vector<std::int64_t>{1, 2, 2, 3, 4});
  CHECK(seen["diff"] == std::vector<std::int64_t>{-1, 0, -1, -1});

  seen.clear();
  (void)isectVR(encVector(*ctx, ivec({1, 2})), encVector(*ctx, ivec({2, 2, 3})), opts);
  const auto& first = seen["diff"];
  REQUIRE(first.size() == 3);
  CHECK(first[0] == -1);
  CHECK(first[1] == 0);
  // the padded slot holds sentinel - 3
  CHECK(first[2] == kSentinel - 3);

  CHECK(decInt(isectPJ(encVector(*ctx, ivec({7})), encVector(*ctx, ivec({7}))), p1) == 1);
  CHECK(decInt(isectPJ(v1, v2), p1) == 1);
  CHECK(decInt(isectVR(encVector(*ctx, ivec({1, 2})), encVector(*ctx, ivec({3, 4, 5}))), p1) == 0);
  CHECK(decInt(isectVE(encVector(*ctx, ivec({5})), encVector(*ctx, ivec({5}))), p1) == 1);
  CHECK(decInt(isectSO(encVector(*ctx, IntVector(0)), encVector(*ctx, IntVector(0))), p1) == 0);
  CHECK(decInt(isectMJ(v1, v2), p1) == 1);
  const auto five = encVector(*ctx, ivec({9, 8, 7, 6, 5}));
  CHECK(decInt(isectMJ(five, encVector(*ctx, ivec({5, 6, 7, 8, 9}))), p1) == 5);
}

TEST_CASE("cost ledger of pairwise and rotation") {
  for (Index m = 1; m <= 6; ++m) {
    for (Index n = 1; n <= 6; ++n) {
      auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
      IntVector a = IntVector::LinSpaced(m, 1, m);
      IntVector b = IntVector::LinSpaced(n, 2, n + 1);
      const auto pa = encVector(*ctx, a), pb = encVector(*ctx, b);
      ctx->resetAccounting();
      (void)isectPJ(pa, pb);
      CHECK(ctx->ledger().count(Primitive::kEq) == static_cast<std::uint64_t>(m * n));
      ctx->resetAccounting();
      (void)isectVR(pa, pb);
      const auto padded = static_cast<std::uint64_t>(std::max(m, n));
      CHECK(ctx->ledger().count(Primitive::kRShift) == padded);
      // a length-1 difference is recorded as a scalar Sub
      CHECK(ctx->ledger().count(Primitive::kESub) + ctx->ledger().count(Primitive::kSub) == padded);
    }
  }
}

TEST_CASE("all supported strategies agree with the brute-force oracle") {
  std::mt19937_64 rng(2024);
  for (const auto& c : allContexts()) {
    CAPTURE(c.label);
    auto ctx = make(c);
    const auto p1 = ctx->grant(Role::kP1);
    const int trials = c.kind == BackendKind::kMpc ? 40 : (c.profile == Profile::kSimd ? 60 : 300);
    for (int t = 0; t < trials; ++t) {
      const auto m = 1 + static_cast<std::size_t>(rng() % 32);
      const auto n = 1 + static_cast<std::size_t>(rng() % 32);
      const auto a = uniqueTokens(rng, m, 60);
      const auto b = uniqueTokens(rng, n, 60);
      const auto expected = bruteForce(a, b);
      const auto pa = encVector(*ctx, fromStd(a)), pb = encVector(*ctx, fromStd(b));
      for (auto s : kConcreteStrategies) {
        if (!supports(ctx->capabilities(), s)) continue;
        // pairwise is quadratic in scalar calls; sample it on the slow contexts
        if (s == IntersectStrategy::kPairwise && c.kind == BackendKind::kMpc && t % 8 != 0) continue;
        CAPTURE(strategyName(s));
        REQUIRE(decInt(intersectSize(s, pa, pb), p1) == expected);
      }
    }
  }
}

TEST_CASE("symmetry") {
  std::mt19937_64 rng(77);
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  const auto p1 = ctx->grant(Role::kP1);
  for (int t = 0; t < 50; ++t) {
    const auto a = uniqueTokens(rng, 1 + rng() % 12, 30);
    const auto b = uniqueTokens(rng, 1 + rng() % 12, 30);
    const auto pa = encVector(*ctx, fromStd(a)), pb = encVector(*ctx, fromStd(b));
    for (auto s : kConcreteStrategies) {
      REQUIRE(decInt(intersectSize(s, pa, pb), p1) == decInt(intersectSize(s, pb, pa), p1));
    }
  }
}

TEST_CASE("capability checks") {
  auto simd = makeBackend(BackendKind::kObliviousSim, Profile::kSimd);
  const auto v = encVector(*simd, ivec({1, 2}));
  CHECK_THROWS_AS(isectSO(v, v), CapabilityUnsupported);
  CHECK_THROWS_AS(isectMJ(v, v), CapabilityUnsupported);
  CHECK(supports(profileCapabilities(Profile::kSharemind), IntersectStrategy::kJoin));
  CHECK_FALSE(supports(profileCapabilities(Profile::kSharemind), IntersectStrategy::kRotation));
  auto mpc = makeBackend(BackendKind::kMpc, Profile::kGeneric);
  const auto mv = encVector(*mpc, ivec({1, 2}));
  CHECK_THROWS_AS(isectMJ(mv, mv), CapabilityUnsupported);
  CHECK(parseStrategy("ve") == IntersectStrategy::kExtension);
  CHECK_THROWS_AS(parseStrategy("xx"), Error);
}

TEST_CASE("duplicates and sentinels are caught by the oracle in checking mode") {
  auto clear = makeBackend(BackendKind::kClear, Profile::kGeneric);
  IntersectOptions checking;
  checking.checkPreconditions = true;
  const auto dup = encVector(*clear, ivec({2, 2, 3}));
  const auto ok = encVector(*clear, ivec({1, 2}));
  CHECK_THROWS_AS(isectVR(ok, dup, checking), PreconditionViolation);
  CHECK_THROWS_AS(isectVE(encVector(*clear, ivec({kSentinel})), ok, checking), PreconditionViolation);
  CHECK_NOTHROW(isectVR(ok, dup));
  auto sim = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  CHECK_NOTHROW(isectVR(encVector(*sim, ivec({1, 2})), encVector(*sim, ivec({2, 2, 3})), checking));
}

TEST_CASE("automatic selection picks the cheapest supported strategy") {
  StrategySelector selector;
  for (auto profile : {Profile::kGeneric, Profile::kSimd, Profile::kSharemind}) {
    auto ctx = makeBackend(BackendKind::kObliviousSim, profile);
    const auto chosen = selector.choose(*ctx, 6, 9);
    CHECK(supports(ctx->capabilities(), chosen));
    const double cost = StrategySelector::dryRunCost(*ctx, chosen, 6, 9);
    for (auto s : kConcreteStrategies) {
      if (supports(ctx->capabilities(), s)) CHECK(cost <= StrategySelector::dryRunCost(*ctx, s, 6, 9));
    }
    const auto p1 = ctx->grant(Role::kP1);
    CHECK(decInt(intersectSize(IntersectStrategy::kAuto, encVector(*ctx, ivec({1, 2, 4})),
                               encVector(*ctx, ivec({2, 3}))),
                 p1) == 1);
  }
}

TEST_CASE("pairwise costs more than rotation and extension from four tokens up") {
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  for (Index m = 4; m <= 24; m += 4) {
    for (Index n = 4; n <= 24; n += 5) {
      const double pj = StrategySelector::dryRunCost(*ctx, IntersectStrategy::kPairwise, m, n);
      CHECK(pj > StrategySelector::dryRunCost(*ctx, IntersectStrategy::kRotation, m, n));
      CHECK(pj > StrategySelector::dryRunCost(*ctx, IntersectStrategy::kExtension, m, n));
    }
  }
}

TEST_CASE("Jaccard decision") {
  for (const auto& c : allContexts()) {
    CAPTURE(c.label);
    auto ctx = make(c);
    const auto p1 = ctx->grant(Role::kP1);
    const auto one = encScalar(*ctx, std::int64_t{1});
    CHECK(decInt(jaccardDecision(one, 3, 2, JaccardParams::parse("0.3")), p1) == 0);
    CHECK(decInt(jaccardDecision(one, 3, 2, JaccardParams::parse("1/5")), p1) == 1);
    const auto r = encVector(*ctx, ivec({11, 12, 13, 14}));
    for (const char* t : {"0.01", "1/2", "0.99"}) {
      const auto s = supports(ctx->capabilities(), IntersectStrategy::kRotation) ? IntersectStrategy::kRotation
                                                                                 : IntersectStrategy::kExtension;
      CHECK(decInt(jaccardMatch(r, r, JaccardParams::parse(t), s), p1) == 1);
    }
  }
}

TEST_CASE("division-free test equals the real-valued test") {
  for (std::int64_t k = 1; k < 100; ++k) {
    const auto params = JaccardParams::rational(k, 100);
    for (std::int64_t s1 = 0; s1 <= 64; ++s1) {
      for (std::int64_t s2 = 0; s2 <= 64; ++s2) {
        for (std::int64_t inter = 0; inter <= std::min(s1, s2); ++inter) {
          const std::int64_t uni = s1 + s2 - inter;
          if (uni == 0) continue;
          const bool real = static_cast<double>(inter) / static_cast<double>(uni) > static_cast<double>(k) / 100.0;
          const bool integer = params.denominator * inter > params.numerator * uni;
          REQUIRE(real == integer);
        }
      }
    }
  }
}

TEST_CASE("threshold parsing") {
  CHECK(JaccardParams::parse("0.5").str() == "1/2");
  CHECK(JaccardParams::parse("2/10").str() == "1/5");
  CHECK(JaccardParams::parse(".8").str() == "4/5");
  CHECK_THROWS_AS(JaccardParams::parse("1.5"), Error);
  CHECK_THROWS_AS(JaccardParams::parse("0"), Error);
  CHECK_THROWS_AS(JaccardParams::parse("abc"), Error);
}

TEST_CASE("lowering the threshold never removes a match") {
  std::mt19937_64 rng(5);
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  const auto p1 = ctx->grant(Role::kP1);
  for (int t = 0; t < 40; ++t) {
    const auto a = uniqueTokens(rng, 2 + rng() % 10, 20);
    const auto b = uniqueTokens(rng, 2 + rng() % 10, 20);
    const auto pa = encVector(*ctx, fromStd(a)), pb = encVector(*ctx, fromStd(b));
    std::int64_t previous = 1;
    for (std::int64_t k = 1; k < 20; ++k) {
      const auto m = decInt(jaccardMatch(pa, pb, JaccardParams::rational(k, 20), IntersectStrategy::kExtension), p1);
      REQUIRE(m <= previous);
      previous = m;
    }
  }
}

TEST_CASE("Jaccard via rotation on the mpc backend equals the clear backend") {
  std::mt19937_64 rng(31);
  auto mpc = makeBackend(BackendKind::kMpc, Profile::kGeneric);
  auto clear = makeBackend(BackendKind::kClear, Profile::kGeneric);
  const auto pm = mpc->grant(Role::kP1), pc = clear->grant(Role::kP1);
  for (int t = 0; t < 20; ++t) {
    const auto a = uniqueTokens(rng, 2 + rng() % 10, 20);
    const auto b = uniqueTokens(rng, 2 + rng() % 10, 20);
    const auto params = JaccardParams::rational(1 + static_cast<std::int64_t>(rng() % 9), 10);
    const auto x = decInt(jaccardMatch(encVector(*mpc, fromStd(a)), encVector(*mpc, fromStd(b)), params,
                                       IntersectStrategy::kRotation),
                          pm);
    const auto y = decInt(jaccardMatch(encVector(*clear, fromStd(a)), encVector(*clear, fromStd(b)), params,
                                       IntersectStrategy::kRotation),
                          pc);
    REQUIRE(x == y);
  }
}
