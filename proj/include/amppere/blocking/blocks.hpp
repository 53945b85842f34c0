#pragma once

// Data-owner side preparation: tokens, packed containers, signatures, keys,
// and the encrypted block map.

#include "amppere/blocking/lsh.hpp"
#include "amppere/blocking/records.hpp"
#include "amppere/blocking/tokens.hpp"
#include "amppere/machine/backend.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace amppere {

struct BlockingConfig {
  BandPlan plan;
  std::uint64_t seed = 42;
  int packing = 1;
  FieldList fields = defaultFields();
};

struct PreparedRecord {
  std::string id;
  TokenSet tokens;
  EncodedRecord encoded;
  MinHashSignature signature;
  std::vector<std::string> keys;
};

/// One owner's dataset after blocking. Position in `records` is the local
/// record id that travels inside block vectors.
struct PreparedDataset {
  std::vector<PreparedRecord> records;
};

PreparedRecord prepareRecord(const Record& record, const MinHasher& hasher, const BlockingConfig& config);
PreparedDataset prepareDataset(const std::vector<Record>& records, const BlockingConfig& config);

/// Cleartext inverted index: key -> ascending local record ids.
using InvertedIndex = std::map<std::string, std::vector<std::int64_t>>;

InvertedIndex buildIndex(const PreparedDataset& data);

/// Key -> encrypted vector of local record ids. Keys are public.
using BlockMap = std::map<std::string, PrivateVector>;

BlockMap encryptIndex(const InvertedIndex& index, Backend& ctx);
BlockMap buildBlocks(const PreparedDataset& data, Backend& ctx);
BlockMap buildBlocks(const std::vector<Record>& records, const BlockingConfig& config, Backend& ctx);

}  // namespace amppere
