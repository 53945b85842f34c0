#include "amppere/cli/commands.hpp"

#include "amppere/backends/factory.hpp"
#include "amppere/evalkit/oracle.hpp"
#include "amppere/mpc/backend.hpp"
#include "amppere/pipeline/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace amppere {
namespace {

namespace fs = std::filesystem;

std::string fixed(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string joinList(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : ",") + item;
  return out;
}

std::ofstream create(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

BlockingConfig blockingFor(const RunConfig& c, double threshold) {
  BlockingConfig b;
  b.plan = optimalBandRange(threshold, c.numPerm, c.fpWeight, c.fnWeight);
  b.seed = c.seed;
  b.packing = c.pack;
  return b;
}

std::unique_ptr<Backend> contextFor(const RunConfig& c, BackendKind kind, Profile profile) {
  BackendOptions options;
  options.seed = c.seed;
  mpc::LatencyModel latency;
  latency.fixed = std::chrono::microseconds(c.latencyUs);
  latency.jitter = std::chrono::microseconds(c.jitterUs);
  latency.seed = c.seed;
  return makeBackend(kind, profile, options, latency);
}

PipelineConfig pipelineFor(const RunConfig& c, BlockingConfig blocking, JaccardParams jaccard,
                           IntersectStrategy strategy) {
  PipelineConfig p;
  p.blocking = std::move(blocking);
  p.filter.jaccard = jaccard;
  p.filter.strategy = strategy;
  p.filter.jobs = c.jobs;
  p.obfuscation.rho = c.rho;
  p.obfuscation.seed = c.seed + 3;
  return p;
}

struct Corpus {
  std::vector<Record> first;
  std::vector<Record> second;
  GoldStandard gold;
};

Corpus readCorpus(const fs::path& dir) {
  Corpus c{readRecords(dir / "d1.jsonl"), readRecords(dir / "d2.jsonl"), {}};
  if (fs::exists(dir / "gold.csv")) c.gold.pairs = readPairs(dir / "gold.csv");
  return c;
}

void writeConfig(const RunConfig& c, const std::string& command) {
  writeKeyValues(c.dir / (command + ".cfg"), c.toKeyValues());
}

// Blocking parameters from the two manifests; both owners must have agreed.
BlockingConfig agreedBlocking(const KeyValues& a, const KeyValues& b) {
  for (const char* key : {"packing", "minhash_seed", "num_perm", "bands", "rows", "fields"}) {
    if (a.at(key) != b.at(key)) throw Error(std::string("owners disagree on ") + key);
  }
  BlockingConfig config;
  config.packing = std::stoi(a.at("packing"));
  config.seed = std::stoull(a.at("minhash_seed"));
  config.plan.permutations = std::stoi(a.at("num_perm"));
  config.plan.bands = std::stoi(a.at("bands"));
  config.plan.rows = std::stoi(a.at("rows"));
  config.fields.clear();
  std::stringstream fields(a.at("fields"));
  for (std::string f; std::getline(fields, f, ',');) config.fields.push_back(f);
  return config;
}

std::string stageCsv(const PipelineResult& r) {
  std::string out = "stage,operations\n";
  for (const auto& s : r.stages) out += s.stage + "," + std::to_string(s.operations) + "\n";
  return out;
}

void logStages(std::ostream& log, const PipelineResult& r) {
  for (const auto& s : r.stages) {
    log << "  " << s.stage << ": " << s.operations << " ops, " << fixed(s.seconds * 1e3, 1) << " ms\n";
  }
}

}  // namespace

KeyValues RunConfig::toKeyValues() const {
  return {{"backend", backend},
          {"profile", profile},
          {"isect", isect},
          {"t-jaccard", tJaccard},
          {"t-block", fixed(tBlock)},
          {"num-perm", std::to_string(numPerm)},
          {"fp-weight", fixed(fpWeight)},
          {"fn-weight", fixed(fnWeight)},
          {"rho", fixed(rho, 4)},
          {"pack", std::to_string(pack)},
          {"seed", std::to_string(seed)},
          {"jobs", std::to_string(jobs)},
          {"latency-us", std::to_string(latencyUs)},
          {"jitter-us", std::to_string(jitterUs)},
          {"size", std::to_string(size)},
          {"split", fixed(split)},
          {"thresholds", joinList(thresholds)},
          {"strategies", joinList(strategies)},
          {"backends", joinList(backends)}};
}

void cmdGenerate(const RunConfig& c, std::ostream& log) {
  fs::create_directories(c.dir);
  GeneratorConfig g;
  g.seed = c.seed;
  g.size = c.size;
  g.firstShare = c.split;
  const Dataset d = generateDataset(g);
  writeRecords(c.dir / "d1.jsonl", d.first);
  writeRecords(c.dir / "d2.jsonl", d.second);
  writePairs(c.dir / "gold.csv", d.gold.pairs);
  writeConfig(c, "generate");
  log << "generated " << d.first.size() << " + " << d.second.size() << " records, " << d.gold.size()
      << " true pairs in " << c.dir.string() << "\n";
}

void cmdBlock(const RunConfig& c, std::ostream& log) {
  const Corpus corpus = readCorpus(c.dir);
  const BlockingConfig blocking = blockingFor(c, c.tBlock);
  const KeyValues extra{{"t_block", fixed(c.tBlock)}};
  std::uint64_t shareSeed = c.seed + 1;
  for (const auto& [party, records] : {std::pair{"P1", &corpus.first}, std::pair{"P2", &corpus.second}}) {
    const auto data = prepareDataset(*records, blocking);
    const fs::path out = c.dir / "transport" / (party == std::string("P1") ? "p1" : "p2");
    writeTransport(out, party, data, blocking, extra, shareSeed++);
    log << party << ": " << data.records.size() << " records, " << buildIndex(data).size() << " blocks -> "
        << out.string() << "\n";
  }
  writeConfig(c, "block");
  log << "band plan b=" << blocking.plan.bands << " r=" << blocking.plan.rows << "\n";
}

void cmdLink(const RunConfig& c, std::ostream& log) {
  const auto p1 = readTransport(c.dir / "transport" / "p1");
  const auto p2 = readTransport(c.dir / "transport" / "p2");
  const BlockingConfig blocking = agreedBlocking(p1.manifest, p2.manifest);

  auto ctx = contextFor(c, parseBackendKind(c.backend), parseProfile(c.profile));
  const auto config = pipelineFor(c, blocking, JaccardParams::parse(c.tJaccard), parseStrategy(c.isect));
  const auto result = runPPER(p1.data, p2.data, config, *ctx);

  writePairs(c.dir / "matches.csv", result.matches);
  create(c.dir / "ledger.csv") << "stage,primitive,count\n" << result.ledger.csv();
  create(c.dir / "stages.csv") << stageCsv(result);
  const fs::path rounds = c.dir / "rounds.csv";
  if (const auto* m = dynamic_cast<const mpc::MpcBackend*>(ctx.get())) {
    create(rounds) << "scope,name,rounds,messages,bytes\n" << m->roundStats().csv();
  } else {
    fs::remove(rounds);
  }
  writeConfig(c, "link");
  log << "linked on " << ctx->name() << ": " << result.matches.size() << " matches, " << result.evaluations
      << " Jaccard evaluations over " << result.obfuscatedPairs << " obfuscated candidates\n";
  logStages(log, result);
}

void cmdBench(const RunConfig& c, std::ostream& log) {
  const Corpus corpus = readCorpus(c.dir);
  std::vector<std::string> rows;
  for (const auto& tText : c.thresholds) {
    const double t = std::stod(tText);
    const auto blocking = blockingFor(c, t);
    const auto jaccard = JaccardParams::parse(tText);
    const auto d1 = prepareDataset(corpus.first, blocking);
    const auto d2 = prepareDataset(corpus.second, blocking);
    const auto candidates = resolveCleartext(d1, d2, jaccard).candidates.size();
    log << "t=" << tText << ": " << candidates << " candidate pairs (b=" << blocking.plan.bands
        << ", r=" << blocking.plan.rows << ")\n";

    for (const auto& entry : c.backends) {
      const auto colon = entry.find(':');
      const BackendKind kind = parseBackendKind(entry.substr(0, colon));
      const Profile profile = parseProfile(colon == std::string::npos ? c.profile : entry.substr(colon + 1));
      const auto caps = contextFor(c, kind, profile)->capabilities();
      std::vector<IntersectStrategy> strategies;
      if (c.strategies == std::vector<std::string>{"all"}) {
        for (auto s : kConcreteStrategies) {
          if (supports(caps, s)) strategies.push_back(s);
        }
      } else {
        for (const auto& name : c.strategies) {
          const auto s = parseStrategy(name);
          if (s == IntersectStrategy::kAuto || supports(caps, s)) {
            strategies.push_back(s);
          } else {
            log << "  " << entry << " " << name << ": not supported, skipped\n";
          }
        }
      }
      for (auto s : strategies) {
        auto ctx = contextFor(c, kind, profile);
        const auto start = std::chrono::steady_clock::now();
        const auto r = runPPER(d1, d2, pipelineFor(c, blocking, jaccard, s), *ctx);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::uint64_t filterOps = 0;
        for (const auto& st : r.stages) {
          if (st.stage == "filter") filterOps = st.operations;
        }
        std::string rounds = "";
        if (const auto* m = dynamic_cast<const mpc::MpcBackend*>(ctx.get())) {
          rounds = std::to_string(m->roundStats().online.rounds);
        }
        const double perPair = r.evaluations ? static_cast<double>(filterOps) / r.evaluations : 0.0;
        rows.push_back(tText + "," + std::string(backendKindName(kind)) + "," + std::string(profileName(profile)) +
                       "," + std::string(strategyName(s)) + "," + std::to_string(candidates) + "," +
                       std::to_string(r.obfuscatedPairs) + "," + std::to_string(r.matches.size()) + "," +
                       std::to_string(r.ledger.total()) + "," + fixed(perPair, 2) + "," + rounds);
        log << "  " << backendKindName(kind) << ":" << profileName(profile) << " " << strategyName(s) << " "
            << r.ledger.total() << " ops, " << fixed(seconds * 1e3, 1) << " ms\n";
      }
    }
  }
  auto out = create(c.dir / "bench.csv");
  out << "t,backend,profile,strategy,candidates,obfuscated,matches,operations,filter_ops_per_pair,rounds\n";
  for (const auto& row : rows) out << row << '\n';
  writeConfig(c, "bench");
}

void cmdEval(const RunConfig& c, std::ostream& log) {
  const Corpus corpus = readCorpus(c.dir);
  if (corpus.gold.pairs.empty()) throw Error("no gold standard in " + c.dir.string());
  const auto blocking = blockingFor(c, c.tBlock);
  const auto jaccard = JaccardParams::parse(c.tJaccard);
  const auto oracle =
      resolveCleartext(prepareDataset(corpus.first, blocking), prepareDataset(corpus.second, blocking), jaccard);
  const fs::path matchFile = c.dir / "matches.csv";
  const bool linked = fs::exists(matchFile);
  const PairSet matches = linked ? readPairs(matchFile) : oracle.matches;

  Dataset data{corpus.first, corpus.second, corpus.gold, {}};
  auto report = computeMetrics(corpus.gold, oracle.candidates, matches, data.totalPairs());
  report.threshold = c.tBlock;
  create(c.dir / "metrics.csv") << MetricsReport::csvHeader() << '\n' << report.csvRow() << '\n';

  auto sweep = create(c.dir / "sweep.csv");
  sweep << "bands,rows," << MetricsReport::csvHeader() << '\n';
  for (const auto& row : expectedPerformanceSweep(data, defaultSweepThresholds(), blocking)) {
    sweep << row.plan.bands << ',' << row.plan.rows << ',' << row.metrics.csvRow() << '\n';
  }
  writeConfig(c, "eval");
  log << (linked ? "matches.csv" : "oracle matches") << ": PC=" << fixed(report.pairsCompleteness)
      << " RR=" << fixed(report.reductionRatio, 5) << " precision=" << fixed(report.precision)
      << " recall=" << fixed(report.recall) << "\n";
  if (linked && matches != oracle.matches) log << "warning: matches.csv differs from the cleartext oracle\n";
}

}  // namespace amppere
