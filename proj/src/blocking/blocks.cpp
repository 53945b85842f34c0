#include "amppere/blocking/blocks.hpp"

#include "amppere/machine/ops.hpp"

namespace amppere {

PreparedRecord prepareRecord(const Record& record, const MinHasher& hasher, const BlockingConfig& config) {
  PreparedRecord out;
  out.id = record.id;
  out.tokens = tokenizeBigram(recordText(record, config.fields), record.id);
  out.encoded = packTokens(out.tokens, config.packing);
  out.signature = hasher.sign(out.tokens);
  out.keys = lshKeys(out.signature, config.plan);
  return out;
}

PreparedDataset prepareDataset(const std::vector<Record>& records, const BlockingConfig& config) {
  const MinHasher hasher(config.seed, config.plan.permutations);
  PreparedDataset data;
  data.records.reserve(records.size());
  for (const auto& r : records) data.records.push_back(prepareRecord(r, hasher, config));
  return data;
}

InvertedIndex buildIndex(const PreparedDataset& data) {
  InvertedIndex index;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    for (const auto& key : data.records[i].keys) {
      // keys carry the band index, so a record never repeats within one key
      index[key].push_back(static_cast<std::int64_t>(i));
    }
  }
  return index;
}

BlockMap encryptIndex(const InvertedIndex& index, Backend& ctx) {
  BlockMap blocks;
  for (const auto& [key, ids] : index) {
    blocks.emplace(key, encVector(ctx, std::span<const std::int64_t>(ids)));
  }
  return blocks;
}

BlockMap buildBlocks(const PreparedDataset& data, Backend& ctx) {
  return encryptIndex(buildIndex(data), ctx);
}

BlockMap buildBlocks(const std::vector<Record>& records, const BlockingConfig& config, Backend& ctx) {
  return buildBlocks(prepareDataset(records, config), ctx);
}

}  // namespace amppere
