#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "amppere/backends/oblivious.hpp"
#include "amppere/evalkit/oracle.hpp"
#include "amppere/pipeline/pipeline.hpp"
#include "amppere/pipeline/transport.hpp"
#include "support.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>

using namespace amppere;
using namespace amppere::testing;

namespace {

BlockMap blocks(Backend& ctx, std::initializer_list<std::pair<std::string, std::vector<std::int64_t>>> entries) {
  BlockMap out;
  for (const auto& [key, ids] : entries) out.emplace(key, encVector(ctx, std::span<const std::int64_t>(ids)));
  return out;
}

PipelineConfig configFor(double t, IntersectStrategy s = IntersectStrategy::kAuto, double rho = 0.05) {
  PipelineConfig c;
  c.blocking.plan = optimalBandRange(t);
  c.filter.jaccard = JaccardParams::rational(std::llround(t * 10), 10);
  c.filter.strategy = s;
  c.obfuscation.rho = rho;
  return c;
}

const Dataset& corpus() {
  static const Dataset d = generateDataset();
  return d;
}

PairSet oracle(const PipelineConfig& c) {
  return resolveCleartext(prepareDataset(corpus().first, c.blocking), prepareDataset(corpus().second, c.blocking),
                          c.filter.jaccard)
      .matches;
}

std::size_t trueCells(const PrivateMatrix& m) {
  const auto auth = m.context().grant(Role::kP1);
  return static_cast<std::size_t>((decInt(m, auth).array() != 0).count());
}

}  // namespace

TEST_CASE("merge and dedup") {
  for (const auto& c : exactContexts()) {
    CAPTURE(c.label);
    auto ctx = make(c);
    const auto p1 = ctx->grant(Role::kP1);

    const auto once = mergeAndDedup(blocks(*ctx, {{"k1", {0}}, {"k2", {0}}}), blocks(*ctx, {{"k1", {3}}, {"k2", {3}}}),
                                    {2, 5}, *ctx);
    IntMatrix expected = IntMatrix::Zero(2, 5);
    expected(0, 3) = 1;
    CHECK(decInt(once, p1) == expected);

    const auto none = mergeAndDedup(blocks(*ctx, {{"a", {0}}}), blocks(*ctx, {{"b", {1}}}), {2, 2}, *ctx);
    CHECK(decInt(none, p1) == IntMatrix(IntMatrix::Zero(2, 2)));

    const auto fan = mergeAndDedup(blocks(*ctx, {{"k", {0, 1}}}), blocks(*ctx, {{"k", {2}}}), {2, 3}, *ctx);
    expected = IntMatrix::Zero(2, 3);
    expected(0, 2) = expected(1, 2) = 1;
    CHECK(decInt(fan, p1) == expected);
  }
  auto ctx = makeBackend(BackendKind::kClear, Profile::kGeneric);
  CHECK_THROWS_AS(mergeAndDedup(blocks(*ctx, {{"", {0}}}), {}, {1, 1}, *ctx), Error);
  // an empty block is skipped
  BlockMap empty;
  empty.emplace("k", encFilled(*ctx, Index{0}, 0));
  CHECK(trueCells(mergeAndDedup(empty, blocks(*ctx, {{"k", {0}}}), {1, 1}, *ctx)) == 0);
}

TEST_CASE("obfuscation") {
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  IntMatrix plain = IntMatrix::Zero(20, 80);
  for (Index i = 0; i < 20; ++i) plain(i, (i * 7) % 80) = 1;
  const auto cand = encMatrix(*ctx, plain);

  CHECK((obfuscate(cand, {0.0}).cast<std::int64_t>().matrix() == plain));
  CHECK(obfuscate(cand, {1.0}).all());
  CHECK_THROWS_AS(obfuscate(cand, {1.5}), Error);

  const double falseCells = 1600 - 20;
  const double mean = 0.05 * falseCells;
  const double sigma = std::sqrt(falseCells * 0.05 * 0.95);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto mask = obfuscate(cand, {0.05, NoiseSource::kOwner, seed});
    // noise only adds
    REQUIRE((mask || plain.array() == 0).all());
    const double added = static_cast<double>(mask.count()) - 20;
    CHECK(std::abs(added - mean) <= 3 * sigma);
  }

  // P3's decryption happens under a revoked, scoped authority and is logged
  const auto& last = ctx->disclosures().back();
  CHECK(last.role == Role::kP3);
  CHECK(last.label == "obfu_pairs");
}

TEST_CASE("filter and finalize") {
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  const auto p1 = ctx->grant(Role::kP1);
  std::vector<PrivateVector> left{encVector(*ctx, ivec({1, 2, 3})), encVector(*ctx, ivec({7, 8}))};
  std::vector<PrivateVector> right{encVector(*ctx, ivec({1, 2, 3})), encVector(*ctx, ivec({9})),
                                   encVector(*ctx, ivec({7, 8, 1}))};
  FilterOptions opts;
  opts.jaccard = JaccardParams::rational(1, 2);

  std::size_t evaluations = 99;
  const auto none = filterAndResolve(left, right, PublicMask::Constant(2, 3, false), opts, &evaluations);
  CHECK(evaluations == 0);
  CHECK(trueCells(none) == 0);

  const auto all = filterAndResolve(left, right, PublicMask::Constant(2, 3, true), opts, &evaluations);
  CHECK(evaluations == 6);
  IntMatrix expected = IntMatrix::Zero(2, 3);
  expected(0, 0) = 1;  // identical
  expected(1, 2) = 1;  // 2/3 > 1/2
  CHECK(decInt(all, p1) == expected);

  // a noise-only cell with dissimilar records stays false
  PublicMask noisy = PublicMask::Constant(2, 3, false);
  noisy(0, 1) = true;
  CHECK(trueCells(filterAndResolve(left, right, noisy, opts)) == 0);
  CHECK_THROWS_AS(filterAndResolve(left, right, PublicMask::Constant(3, 3, true), opts), ShapeMismatch);

  const auto zero = encFilled(*ctx, Shape{2, 3}, 0);
  CHECK(trueCells(finalize(all, zero, zero)) == 0);
  CHECK(decInt(finalize(all, zero, all), p1) == expected);
  IntMatrix candOnly = IntMatrix::Zero(2, 3);
  candOnly(1, 2) = 1;
  IntMatrix kept = IntMatrix::Zero(2, 3);
  kept(1, 2) = 1;
  CHECK(decInt(finalize(all, zero, encMatrix(*ctx, candOnly)), p1) == kept);
}

TEST_CASE("non-blocking baseline evaluates every pair") {
  auto ctx = makeBackend(BackendKind::kClear, Profile::kGeneric);
  const auto cfg = configFor(0.5);
  const auto up1 = uploadDataset(prepareDataset(corpus().first, cfg.blocking), *ctx);
  const auto up2 = uploadDataset(prepareDataset(corpus().second, cfg.blocking), *ctx);
  std::size_t evaluations = 0;
  filterAndResolve(up1.records, up2.records, PublicMask::Constant(20, 80, true), cfg.filter, &evaluations);
  CHECK(evaluations == 1600);
}

TEST_CASE("oracle equivalence across strategies") {
  for (double t : {0.2, 0.3, 0.5, 0.6, 0.8}) {
    const auto expected = oracle(configFor(t));
    for (const auto& c : exactContexts(false)) {
      auto probe = make(c);
      for (auto s : kConcreteStrategies) {
        if (!supports(probe->capabilities(), s)) continue;
        CAPTURE(t);
        CAPTURE(c.label);
        CAPTURE(strategyName(s));
        auto ctx = make(c);
        const auto result = runPPER(corpus().first, corpus().second, configFor(t, s), *ctx);
        CHECK(result.matches == expected);
      }
    }
  }
}

TEST_CASE("oracle equivalence on mpc") {
  for (double t : {0.5, 0.8}) {
    auto ctx = makeBackend(BackendKind::kMpc, Profile::kGeneric);
    const auto cfg = configFor(t);
    CHECK(runPPER(corpus().first, corpus().second, cfg, *ctx).matches == oracle(cfg));
  }
}

TEST_CASE("obfuscation neutrality and candidate bound") {
  const auto cfg0 = configFor(0.5, IntersectStrategy::kRotation, 0.0);
  const auto base = oracle(cfg0);
  const auto blocked = resolveCleartext(prepareDataset(corpus().first, cfg0.blocking),
                                        prepareDataset(corpus().second, cfg0.blocking), cfg0.filter.jaccard)
                           .candidates.size();
  for (double rho : {0.0, 0.05, 0.5}) {
    CAPTURE(rho);
    auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
    const auto result = runPPER(corpus().first, corpus().second, configFor(0.5, IntersectStrategy::kRotation, rho),
                                *ctx);
    CHECK(result.matches == base);
    CHECK(result.obfuscatedPairs >= blocked);
    CHECK(result.obfuscatedPairs <= 1600);
    CHECK(result.evaluations == result.obfuscatedPairs);
    if (rho == 0.0) CHECK(result.obfuscatedPairs == blocked);
  }
}

TEST_CASE("edge runs") {
  auto ctx = makeBackend(BackendKind::kClear, Profile::kGeneric);
  CHECK(runPPER({}, corpus().second, configFor(0.5), *ctx).matches.empty());

  auto strict = configFor(0.5);
  strict.filter.jaccard = JaccardParams::rational(99, 100);
  auto c1 = makeBackend(BackendKind::kClear, Profile::kGeneric);
  auto c2 = makeBackend(BackendKind::kClear, Profile::kGeneric);
  const auto high = runPPER(corpus().first, corpus().second, strict, *c1).matches;
  const auto mid = runPPER(corpus().first, corpus().second, configFor(0.5), *c2).matches;
  for (const auto& p : high) CHECK(mid.count(p));

  auto simd = makeBackend(BackendKind::kObliviousSim, Profile::kSimd);
  CHECK_THROWS_AS(runPPER(corpus().first, corpus().second, configFor(0.5), *simd), DomainError);

  auto bad = corpus().first;
  bad[0].fields[0].second = "Jos\xc3\xa9";
  auto c3 = makeBackend(BackendKind::kClear, Profile::kGeneric);
  try {
    runPPER(bad, corpus().second, configFor(0.5), *c3);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "encode");
  }

  auto noJoin = configFor(0.5, IntersectStrategy::kJoin);
  auto c4 = makeBackend(BackendKind::kObliviousSim, Profile::kSimd);
  auto c5 = makeBackend(BackendKind::kObliviousSim, Profile::kSharemind);
  CHECK_NOTHROW(runPPER(corpus().first, corpus().second, noJoin, *c5));
  auto c6 = makeBackend(BackendKind::kMpc, Profile::kGeneric);
  try {
    runPPER(corpus().first, corpus().second, noJoin, *c6);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "filter");
  }
}

TEST_CASE("stage report and ledger") {
  auto ctx = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  const auto r = runPPER(corpus().first, corpus().second, configFor(0.5), *ctx);
  REQUIRE(r.stages.size() == pipelineStages().size());
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < r.stages.size(); ++i) {
    CHECK(r.stages[i].stage == pipelineStages()[i]);
    sum += r.stages[i].operations;
  }
  CHECK(sum == r.ledger.total());
  CHECK(r.ledger.count("merge", Primitive::kEq) > 0);
  CHECK(r.ledger.count("obfuscate", Primitive::kDec) == 1);
  CHECK(r.ledger.count("finalize", Primitive::kDec) == 1);
}

TEST_CASE("parallel filtering matches sequential") {
  auto seq = configFor(0.3, IntersectStrategy::kExtension);
  auto par = seq;
  par.filter.jobs = 3;
  auto c1 = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  auto c2 = makeBackend(BackendKind::kObliviousSim, Profile::kGeneric);
  const auto a = runPPER(corpus().first, corpus().second, seq, *c1);
  const auto b = runPPER(corpus().first, corpus().second, par, *c2);
  CHECK(a.matches == b.matches);
  CHECK(a.ledger == b.ledger);
  // mpc cannot be cloned and falls back to one job
  auto c3 = makeBackend(BackendKind::kMpc, Profile::kGeneric);
  CHECK(runPPER(corpus().first, corpus().second, par, *c3).matches == a.matches);
}

TEST_CASE("host view stays within the leakage budget") {
  const auto cfg = configFor(0.5);
  const auto d1 = prepareDataset(corpus().first, cfg.blocking);
  const auto d2 = prepareDataset(corpus().second, cfg.blocking);
  for (const auto& c : exactContexts()) {
    CAPTURE(c.label);
    auto ctx = make(c);
    const auto r = runPPER(d1, d2, cfg, *ctx);
    CHECK(scanHostView(r.hostView, d1, d2).empty());
    CHECK(r.hostView.count("dataset_size") == 2);
    CHECK(r.hostView.count("record_size") == 2);
    CHECK(r.hostView.count("obfu_pairs") == 1);
    CHECK(r.hostView.count("blocking_key") == r.hostView.count("block_size"));
  }

  auto leaky = cfg;
  leaky.obfuscation.source = NoiseSource::kHost;
  auto ctx = makeBackend(BackendKind::kClear, Profile::kGeneric);
  CHECK_FALSE(scanHostView(runPPER(d1, d2, leaky, *ctx).hostView, d1, d2).empty());

  ObservationLog planted;
  planted.note("record_size", "P1", {d1.records[0].encoded.containers[0]});
  planted.note("blocking_key", "k-" + d2.records[3].id);
  CHECK(scanHostView(planted, d1, d2).size() == 2);
}

TEST_CASE("twin runs produce identical traces") {
  const auto cfg = configFor(0.5);
  const auto d1 = prepareDataset(corpus().first, cfg.blocking);
  const auto d2 = prepareDataset(corpus().second, cfg.blocking);
  // same sizes, keys and blocks; every container replaced so no pair matches
  auto scrambled = d2;
  std::int64_t fresh = 0x7000000000000000;
  for (auto& r : scrambled.records) {
    for (auto& c : r.encoded.containers) c = fresh++;
  }
  for (auto s : {IntersectStrategy::kPairwise, IntersectStrategy::kRotation, IntersectStrategy::kExtension,
                 IntersectStrategy::kSort}) {
    CAPTURE(strategyName(s));
    auto run = cfg;
    run.filter.strategy = s;
    std::array<std::size_t, 2> matches{};
    CHECK_NOTHROW(assertOblivious([] { return makeBackend(BackendKind::kObliviousSim, Profile::kGeneric); },
                                  [&](Backend& ctx, int variant) {
                                    matches[variant] = runPPER(d1, variant ? scrambled : d2, run, ctx).matches.size();
                                  }));
    CHECK(matches[0] == 20);
    CHECK(matches[1] == 0);
  }
}

TEST_CASE("transport round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "amppere_transport_test";
  std::filesystem::remove_all(dir);
  const auto cfg = configFor(0.5);
  const auto d1 = prepareDataset(corpus().first, cfg.blocking);
  writeTransport(dir / "p1", "P1", d1, cfg.blocking, {{"t_block", "0.5"}}, 11);
  const auto back = readTransport(dir / "p1");
  CHECK(back.manifest.at("party") == "P1");
  CHECK(back.manifest.at("t_block") == "0.5");
  REQUIRE(back.data.records.size() == d1.records.size());
  for (std::size_t i = 0; i < d1.records.size(); ++i) {
    CHECK(back.data.records[i].id == d1.records[i].id);
    CHECK(back.data.records[i].encoded.containers == d1.records[i].encoded.containers);
  }
  CHECK(buildIndex(back.data) == buildIndex(d1));

  CHECK(readKeyValues(dir / "p1" / "manifest").at("records") == "20");

  // a single share file reveals no container value
  std::set<std::uint64_t> containers;
  for (const auto& r : d1.records) containers.insert(r.encoded.containers.begin(), r.encoded.containers.end());
  std::ifstream in(dir / "p1" / "shares.1");
  std::string line;
  std::size_t checked = 0;
  while (std::getline(in, line)) {
    for (auto v : nlohmann::json::parse(line).at("values").get<std::vector<std::uint64_t>>()) {
      CHECK_FALSE(containers.count(v));
      ++checked;
    }
  }
  CHECK(checked > 0);
  std::filesystem::remove_all(dir);
}
