#pragma once

// Files a data owner hands over: a directory with
//   manifest      key=value parameters and sizes
//   records.enc   {"index", "containers"} per record (public sizes)
//   blocks.enc    {"key", "size"} per block (public keys and sizes)
//   shares.1..3   additive shares mod 2^64 of every record and block vector
//   idmap         "index,id" lines; kept by the owner, never uploaded

#include "amppere/blocking/blocks.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace amppere {

using KeyValues = std::map<std::string, std::string>;

/// Flat "key=value" text; blank lines and lines starting with '#' skipped.
KeyValues readKeyValues(const std::filesystem::path& path);
void writeKeyValues(const std::filesystem::path& path, const KeyValues& values);

struct TransportBundle {
  KeyValues manifest;
  PreparedDataset data;  // ids, containers and keys; tokens and signatures are not transported
};

void writeTransport(const std::filesystem::path& dir, const std::string& party, const PreparedDataset& data,
                    const BlockingConfig& config, const KeyValues& extra, std::uint64_t shareSeed);

TransportBundle readTransport(const std::filesystem::path& dir);

}  // namespace amppere
