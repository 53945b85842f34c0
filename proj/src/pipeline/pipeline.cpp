#include "amppere/pipeline/pipeline.hpp"

#include "amppere/machine/ops.hpp"

#include <chrono>
#include <exception>
#include <random>
#include <set>
#include <thread>
#include <unordered_set>

namespace amppere {
namespace {

const std::set<std::string>& allowedHostKinds() {
  static const std::set<std::string> kinds{"dataset_size", "record_size", "blocking_key", "block_size",
                                           "obfu_pairs"};
  return kinds;
}

void requireExact(const Backend& ctx) {
  if (ctx.domain() != Domain::kExact) {
    throw DomainError("the pipeline needs an exact-domain backend; " + ctx.name() + " is approximate");
  }
}

std::vector<std::int64_t> flatten(const IntMatrix& m) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

struct Cell {
  Index row;
  Index col;
};

// Decisions for cells[k], k = job, job + jobs, ..., on a clone of the parent.
void resolveSlice(Backend& clone, const std::vector<PrivateVector>& first, const std::vector<PrivateVector>& second,
                  const std::vector<Cell>& cells, const FilterOptions& options, std::size_t job,
                  std::vector<Value>& decisions) {
  std::map<Index, PrivateVector> left;
  std::map<Index, PrivateVector> right;
  auto local = [&](std::map<Index, PrivateVector>& cache, const std::vector<PrivateVector>& src, Index i) {
    auto it = cache.find(i);
    if (it == cache.end()) {
      it = cache.emplace(i, PrivateVector(clone.adopt(src[static_cast<std::size_t>(i)].value()))).first;
    }
    return it->second;
  };
  StrategySelector selector;
  const auto jobs = static_cast<std::size_t>(options.jobs);
  for (std::size_t k = job; k < cells.size(); k += jobs) {
    const auto r1 = local(left, first, cells[k].row);
    const auto r2 = local(right, second, cells[k].col);
    decisions[k] = jaccardMatch(r1, r2, options.jaccard, options.strategy, {}, &selector).value();
  }
}

}  // namespace

void ObservationLog::note(std::string kind, std::string label, std::vector<std::int64_t> values) {
  items.push_back({std::move(kind), std::move(label), std::move(values)});
}

std::size_t ObservationLog::count(const std::string& kind) const {
  std::size_t n = 0;
  for (const auto& item : items) n += item.kind == kind;
  return n;
}

PartyUpload uploadDataset(const PreparedDataset& data, Backend& ctx) {
  PartyUpload up;
  up.records.reserve(data.records.size());
  for (const auto& r : data.records) {
    up.records.push_back(encVector(ctx, std::span<const std::int64_t>(r.encoded.containers)));
  }
  up.blocks = buildBlocks(data, ctx);
  return up;
}

PrivateMatrix mergeAndDedup(const BlockMap& first, const BlockMap& second, Shape shape, Backend& ctx) {
  requireExact(ctx);
  PrivateMatrix candidates = encFilled(ctx, shape, 0);
  const PrivateScalar yes = encScalar(ctx, std::int64_t{1});
  for (const auto& [key, ids1] : first) {
    if (key.empty()) throw Error("malformed blocking key (empty)");
    const auto hit = second.find(key);
    if (hit == second.end()) continue;
    const PrivateVector& ids2 = hit->second;
    if (ids1.size() == 0 || ids2.size() == 0) continue;

    std::vector<PrivateScalar> cols;
    cols.reserve(static_cast<std::size_t>(ids2.size()));
    for (Index j = 0; j < ids2.size(); ++j) cols.push_back(vectorLookup(ids2, encScalar(ctx, std::int64_t{j})));
    for (Index i = 0; i < ids1.size(); ++i) {
      const PrivateScalar row = vectorLookup(ids1, encScalar(ctx, std::int64_t{i}));
      for (const auto& col : cols) candidates = matrixUpdate(candidates, row, col, yes);
    }
  }
  return candidates;
}

PublicMask obfuscate(const PrivateMatrix& candidates, const ObfuscationPolicy& policy, ObservationLog* log) {
  if (!(policy.rho >= 0.0 && policy.rho <= 1.0)) throw Error("noise rate must lie in [0, 1]");
  Backend& ctx = candidates.context();
  const Shape shape = candidates.shape();

  std::mt19937_64 rng(policy.seed);
  IntMatrix noise(shape.rows, shape.cols);
  for (Index i = 0; i < shape.rows; ++i) {
    for (Index j = 0; j < shape.cols; ++j) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      noise(i, j) = u < policy.rho ? 1 : 0;
    }
  }
  if (log && policy.source == NoiseSource::kHost) log->note("noise", "host", flatten(noise));

  // cand OR noise
  const PrivateMatrix n = encMatrix(ctx, noise);
  const PrivateMatrix noisy = esub(eadd(candidates, n), emul(candidates, n));

  const ScopedAuthority host(ctx, Role::kP3);
  const IntMatrix plain = decode<std::int64_t>(noisy.value(), host.get(), "obfu_pairs");
  if (log) log->note("obfu_pairs", shape.str(), flatten(plain));
  return plain.array() != 0;
}

PrivateMatrix filterAndResolve(const std::vector<PrivateVector>& first, const std::vector<PrivateVector>& second,
                               const PublicMask& mask, const FilterOptions& options, std::size_t* evaluations) {
  if (first.empty() || second.empty()) throw Error("filtering needs two non-empty datasets");
  if (mask.rows() != static_cast<Index>(first.size()) || mask.cols() != static_cast<Index>(second.size())) {
    throw ShapeMismatch("obfuscated candidate mask does not match the dataset sizes");
  }
  Backend& ctx = first.front().context();
  requireExact(ctx);

  std::vector<Cell> cells;
  for (Index i = 0; i < mask.rows(); ++i) {
    for (Index j = 0; j < mask.cols(); ++j) {
      if (mask(i, j)) cells.push_back({i, j});
    }
  }
  if (evaluations) *evaluations = cells.size();

  PrivateMatrix results = encFilled(ctx, Shape{mask.rows(), mask.cols()}, 0);
  std::vector<Value> decisions(cells.size());

  std::vector<std::unique_ptr<Backend>> clones;
  if (options.jobs > 1 && cells.size() > 1) {
    for (int j = 0; j < options.jobs; ++j) {
      auto c = ctx.clone();
      if (!c) {
        clones.clear();
        break;
      }
      c->setStage(ctx.stage());
      c->setTraceRecording(false);
      clones.push_back(std::move(c));
    }
  }

  if (clones.empty()) {
    StrategySelector selector;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      decisions[k] = jaccardMatch(first[static_cast<std::size_t>(cells[k].row)],
                                  second[static_cast<std::size_t>(cells[k].col)], options.jaccard,
                                  options.strategy, {}, &selector)
                         .value();
    }
  } else {
    std::vector<std::exception_ptr> errors(clones.size());
    std::vector<std::thread> workers;
    for (std::size_t job = 0; job < clones.size(); ++job) {
      workers.emplace_back([&, job] {
        try {
          resolveSlice(*clones[job], first, second, cells, options, job, decisions);
        } catch (...) {
          errors[job] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    for (auto& d : decisions) d = ctx.adopt(d);
    for (const auto& c : clones) ctx.absorb(*c);
  }

  for (std::size_t k = 0; k < cells.size(); ++k) {
    results = place(results, cells[k].row, cells[k].col, PrivateScalar(decisions[k]));
  }
  return results;
}

PrivateMatrix finalize(const PrivateMatrix& results, const PrivateMatrix& dummies, const PrivateMatrix& candidates) {
  return chooseMat(candidates, results, dummies);
}

PipelineResult runPPER(const std::vector<Record>& first, const std::vector<Record>& second,
                       const PipelineConfig& config, Backend& ctx) {
  requireExact(ctx);
  const auto start = std::chrono::steady_clock::now();
  PreparedDataset d1;
  PreparedDataset d2;
  try {
    d1 = prepareDataset(first, config.blocking);
    d2 = prepareDataset(second, config.blocking);
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError("encode", e.what());
  }
  const double encodeSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto result = runPPER(d1, d2, config, ctx);
  result.stages.front().seconds = encodeSeconds;
  return result;
}

PipelineResult runPPER(const PreparedDataset& first, const PreparedDataset& second, const PipelineConfig& config,
                       Backend& ctx) {
  requireExact(ctx);
  PipelineResult out;
  auto stage = [&](const std::string& name, auto&& body) {
    const StageScope scope(ctx, name);
    const auto before = ctx.ledger().total();
    const auto start = std::chrono::steady_clock::now();
    try {
      body();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(name, e.what());
    }
    out.stages.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(),
                          ctx.ledger().total() - before});
  };

  const Shape shape{static_cast<Index>(first.records.size()), static_cast<Index>(second.records.size())};
  PartyUpload up1;
  PartyUpload up2;

  stage("encode", [] {});
  stage("upload", [&] {
    up1 = uploadDataset(first, ctx);
    up2 = uploadDataset(second, ctx);
    for (const auto* up : {&up1, &up2}) {
      const std::string party = up == &up1 ? "P1" : "P2";
      out.hostView.note("dataset_size", party, {static_cast<std::int64_t>(up->records.size())});
      std::vector<std::int64_t> sizes;
      for (const auto& r : up->records) sizes.push_back(r.size());
      out.hostView.note("record_size", party, std::move(sizes));
      for (const auto& [key, ids] : up->blocks) {
        out.hostView.note("blocking_key", key);
        out.hostView.note("block_size", key, {ids.size()});
      }
    }
  });

  if (shape.rows == 0 || shape.cols == 0) {
    out.ledger = ctx.ledger();
    return out;
  }

  PrivateMatrix candidates;
  PublicMask mask;
  PrivateMatrix results;
  stage("merge", [&] { candidates = mergeAndDedup(up1.blocks, up2.blocks, shape, ctx); });
  stage("obfuscate", [&] {
    mask = obfuscate(candidates, config.obfuscation, &out.hostView);
    out.obfuscatedPairs = static_cast<std::size_t>(mask.count());
  });
  stage("filter", [&] {
    results = filterAndResolve(up1.records, up2.records, mask, config.filter, &out.evaluations);
  });
  stage("finalize", [&] {
    const PrivateMatrix matches = finalize(results, encFilled(ctx, shape, 0), candidates);
    const ScopedAuthority owner(ctx, Role::kP1);
    const IntMatrix plain = decode<std::int64_t>(matches.value(), owner.get(), "matches");
    for (Index i = 0; i < plain.rows(); ++i) {
      for (Index j = 0; j < plain.cols(); ++j) {
        if (plain(i, j) != 0) {
          out.matches.emplace(first.records[static_cast<std::size_t>(i)].id,
                              second.records[static_cast<std::size_t>(j)].id);
        }
      }
    }
  });

  for (const auto& d : ctx.disclosures()) {
    if (d.role == Role::kP3 && d.label != "obfu_pairs") out.hostView.note("disclosure", d.label);
  }
  out.ledger = ctx.ledger();
  return out;
}

std::vector<std::string> scanHostView(const ObservationLog& view, const PreparedDataset& first,
                                      const PreparedDataset& second) {
  std::unordered_set<std::int64_t> containers;
  std::vector<std::string> ids;
  for (const auto* data : {&first, &second}) {
    for (const auto& r : data->records) {
      containers.insert(r.encoded.containers.begin(), r.encoded.containers.end());
      ids.push_back(r.id);
    }
  }
  std::vector<std::string> violations;
  for (const auto& item : view.items) {
    if (!allowedHostKinds().count(item.kind)) {
      violations.push_back("unexpected item '" + item.kind + "' (" + item.label + ")");
      continue;
    }
    for (const auto& id : ids) {
      if (!id.empty() && item.label.find(id) != std::string::npos) {
        violations.push_back(item.kind + " label carries record id " + id);
      }
    }
    for (auto v : item.values) {
      if (containers.count(v)) {
        violations.push_back(item.kind + " carries a token container value " + std::to_string(v));
        break;
      }
      if (item.kind == "obfu_pairs" && v != 0 && v != 1) {
        violations.push_back("obfu_pairs holds a non-boolean value");
        break;
      }
    }
  }
  return violations;
}

}  // namespace amppere
