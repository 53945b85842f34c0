#include "amppere/blocking/tokens.hpp"

#include "amppere/machine/errors.hpp"

#include <algorithm>
#include <cctype>

namespace amppere {

std::string normalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pendingSpace = false;
  for (char ch : text) {
    const auto byte = static_cast<unsigned char>(ch);
    if (byte >= 0x80) throw EncodingError("non-ASCII byte in record text");
    if (std::isspace(byte)) {
      pendingSpace = !out.empty();
      continue;
    }
    if (pendingSpace) out.push_back(' ');
    pendingSpace = false;
    out.push_back(static_cast<char>(std::tolower(byte)));
  }
  return out;
}

std::uint16_t bigramCode(char first, char second) {
  const auto a = static_cast<unsigned char>(first);
  const auto b = static_cast<unsigned char>(second);
  if (a >= 0x80 || b >= 0x80) throw EncodingError("bigram outside 7-bit ASCII");
  return static_cast<std::uint16_t>(a * 256 + b);
}

TokenSet tokenizeBigram(std::string_view text, std::string id) {
  std::string padded(text);
  while (padded.size() < 2) padded.push_back(' ');
  TokenSet set{std::move(id), {}};
  for (std::size_t i = 0; i + 1 < padded.size(); ++i) {
    set.tokens.push_back(bigramCode(padded[i], padded[i + 1]));
  }
  std::sort(set.tokens.begin(), set.tokens.end());
  set.tokens.erase(std::unique(set.tokens.begin(), set.tokens.end()), set.tokens.end());
  return set;
}

EncodedRecord packTokens(const TokenSet& tokens, int packing) {
  if (packing != 1 && packing != 4) throw Error("packing factor must be 1 or 4");
  std::vector<std::uint16_t> sorted = tokens.tokens;
  std::sort(sorted.begin(), sorted.end());
  EncodedRecord out{tokens.id, {}, packing};
  const auto k = static_cast<std::size_t>(packing);
  for (std::size_t i = 0; i < sorted.size(); i += k) {
    std::uint64_t container = 0;
    for (std::size_t j = 0; j < k; ++j) {
      container <<= 16;
      if (i + j < sorted.size()) container |= sorted[i + j];
    }
    out.containers.push_back(static_cast<std::int64_t>(container));
  }
  return out;
}

}  // namespace amppere
