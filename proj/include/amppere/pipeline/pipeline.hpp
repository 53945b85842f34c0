#pragma once

// Two data owners (P1, P2) upload encrypted records and blocks; the host (P3)
// merges blocks into a private candidate matrix, decrypts an obfuscated copy,
// evaluates Jaccard on the obfuscated candidates and removes the noise again.

#include "amppere/blocking/blocks.hpp"
#include "amppere/evalkit/metrics.hpp"
#include "amppere/intersect/intersect.hpp"
#include "amppere/machine/backend.hpp"
#include "amppere/machine/errors.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace amppere {

using PublicMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

enum class NoiseSource {
  kOwner,  // pre-generated and encrypted by a data owner; P3 never sees it
  kHost,   // drawn by P3 itself
};

struct ObfuscationPolicy {
  double rho = 0.05;
  NoiseSource source = NoiseSource::kOwner;
  std::uint64_t seed = 7;
};

/// Everything the host is shown, in order. Kinds: dataset_size,
/// record_size, blocking_key, block_size, obfu_pairs, noise (host noise only).
struct ObservationLog {
  struct Item {
    std::string kind;
    std::string label;
    std::vector<std::int64_t> values;
  };

  std::vector<Item> items;

  void note(std::string kind, std::string label, std::vector<std::int64_t> values = {});
  std::size_t count(const std::string& kind) const;
};

/// One owner's upload: encrypted containers per record and the block map.
struct PartyUpload {
  std::vector<PrivateVector> records;
  BlockMap blocks;
};

PartyUpload uploadDataset(const PreparedDataset& data, Backend& ctx);

/// Cells (i, j) for every key present in both maps and every id pair under
/// it, set through vectorLookup + matrixUpdate. Keys of `first` are visited
/// in sorted order.
PrivateMatrix mergeAndDedup(const BlockMap& first, const BlockMap& second, Shape shape, Backend& ctx);

/// Adds Bernoulli(rho) noise to false cells and decrypts the result for P3
/// under a scoped authority.
PublicMask obfuscate(const PrivateMatrix& candidates, const ObfuscationPolicy& policy,
                     ObservationLog* log = nullptr);

struct FilterOptions {
  JaccardParams jaccard;
  IntersectStrategy strategy = IntersectStrategy::kAuto;
  int jobs = 1;
};

/// Jaccard decisions placed at every cell set in `mask`; all other cells stay
/// Enc(false). `evaluations` receives the number of decisions computed.
PrivateMatrix filterAndResolve(const std::vector<PrivateVector>& first, const std::vector<PrivateVector>& second,
                               const PublicMask& mask, const FilterOptions& options,
                               std::size_t* evaluations = nullptr);

/// chooseMat(candidates, results, dummies): true exactly where candidates and
/// results are both true when dummies is all-false.
PrivateMatrix finalize(const PrivateMatrix& results, const PrivateMatrix& dummies, const PrivateMatrix& candidates);

struct PipelineConfig {
  BlockingConfig blocking;
  FilterOptions filter;
  ObfuscationPolicy obfuscation;
};

struct StageReport {
  std::string stage;
  double seconds = 0.0;
  std::uint64_t operations = 0;
};

struct PipelineResult {
  PairSet matches;
  std::vector<StageReport> stages;
  OpCostLedger ledger;
  ObservationLog hostView;
  std::size_t obfuscatedPairs = 0;
  std::size_t evaluations = 0;
};

inline const std::vector<std::string>& pipelineStages() {
  static const std::vector<std::string> stages{"encode", "upload", "merge", "obfuscate", "filter", "finalize"};
  return stages;
}

/// Full run. Requires an exact-domain context; the output is decrypted for
/// the data owners and mapped back to external ids.
PipelineResult runPPER(const std::vector<Record>& first, const std::vector<Record>& second,
                       const PipelineConfig& config, Backend& ctx);

/// Same, starting from already prepared (tokenized, blocked) datasets.
PipelineResult runPPER(const PreparedDataset& first, const PreparedDataset& second, const PipelineConfig& config,
                       Backend& ctx);

/// Violations of the host's leakage budget in `view`: unknown item kinds,
/// record ids, or any value equal to a record container. Empty when clean.
std::vector<std::string> scanHostView(const ObservationLog& view, const PreparedDataset& first,
                                      const PreparedDataset& second);

}  // namespace amppere
