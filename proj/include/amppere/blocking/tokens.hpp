#pragma once

// Record text to token sets and packed 64-bit containers.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace amppere {

/// Distinct bigram codes (first * 256 + second, 8-bit characters), sorted.
struct TokenSet {
  std::string id;
  std::vector<std::uint16_t> tokens;
};

/// Tokens packed `packing` per 64-bit container, big-endian, zero-padded.
struct EncodedRecord {
  std::string id;
  std::vector<std::int64_t> containers;
  int packing = 1;
};

/// Lowercases, collapses whitespace runs to one space and trims. Bytes
/// outside 7-bit ASCII raise EncodingError.
std::string normalizeText(std::string_view text);

/// Overlapping bigrams of already normalized text. Text shorter than two
/// characters is right-padded with spaces, so it yields exactly one token.
TokenSet tokenizeBigram(std::string_view text, std::string id = {});

std::uint16_t bigramCode(char first, char second);

/// k in {1, 4}. Tokens are taken in ascending order.
EncodedRecord packTokens(const TokenSet& tokens, int packing);

}  // namespace amppere
