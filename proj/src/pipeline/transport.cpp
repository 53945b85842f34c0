#include "amppere/pipeline/transport.hpp"

#include "amppere/machine/errors.hpp"
#include "amppere/mpc/share.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

namespace amppere {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::ofstream openOut(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::ifstream openIn(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::vector<ordered_json> readJsonLines(const fs::path& path) {
  auto in = openIn(path);
  std::vector<ordered_json> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      docs.push_back(ordered_json::parse(line));
    } catch (const ordered_json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  return docs;
}

std::string joinFields(const FieldList& fields) {
  std::string out;
  for (const auto& f : fields) out += (out.empty() ? "" : ",") + f;
  return out;
}

}  // namespace

KeyValues readKeyValues(const fs::path& path) {
  auto in = openIn(path);
  KeyValues values;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(path.string() + ":" + std::to_string(lineNo) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return values;
}

void writeKeyValues(const fs::path& path, const KeyValues& values) {
  auto out = openOut(path);
  for (const auto& [k, v] : values) out << k << '=' << v << '\n';
}

void writeTransport(const fs::path& dir, const std::string& party, const PreparedDataset& data,
                    const BlockingConfig& config, const KeyValues& extra, std::uint64_t shareSeed) {
  fs::create_directories(dir);
  const InvertedIndex index = buildIndex(data);

  KeyValues manifest = extra;
  manifest["party"] = party;
  manifest["records"] = std::to_string(data.records.size());
  manifest["blocks"] = std::to_string(index.size());
  manifest["packing"] = std::to_string(config.packing);
  manifest["minhash_seed"] = std::to_string(config.seed);
  manifest["num_perm"] = std::to_string(config.plan.permutations);
  manifest["bands"] = std::to_string(config.plan.bands);
  manifest["rows"] = std::to_string(config.plan.rows);
  manifest["fields"] = joinFields(config.fields);
  writeKeyValues(dir / "manifest", manifest);

  auto records = openOut(dir / "records.enc");
  auto blocks = openOut(dir / "blocks.enc");
  auto idmap = openOut(dir / "idmap");
  std::array<std::ofstream, mpc::kParties> shares;
  for (int p = 0; p < mpc::kParties; ++p) shares[p] = openOut(dir / ("shares." + std::to_string(p + 1)));

  std::mt19937_64 rng(shareSeed);
  auto emitShares = [&](const char* kind, const ordered_json& label, const std::vector<std::int64_t>& values) {
    std::array<std::vector<mpc::Word>, mpc::kParties> parts;
    for (auto v : values) {
      const auto s = mpc::shareSecret(static_cast<mpc::Word>(v), rng);
      for (int p = 0; p < mpc::kParties; ++p) parts[p].push_back(s.part[p]);
    }
    for (int p = 0; p < mpc::kParties; ++p) {
      shares[p] << ordered_json{{kind, label}, {"values", parts[p]}}.dump() << '\n';
    }
  };

  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& r = data.records[i];
    records << ordered_json{{"index", i}, {"containers", r.encoded.containers.size()}}.dump() << '\n';
    idmap << i << ',' << r.id << '\n';
    emitShares("record", i, r.encoded.containers);
  }
  for (const auto& [key, ids] : index) {
    blocks << ordered_json{{"key", key}, {"size", ids.size()}}.dump() << '\n';
    emitShares("block", key, ids);
  }
}

TransportBundle readTransport(const fs::path& dir) {
  TransportBundle bundle;
  bundle.manifest = readKeyValues(dir / "manifest");
  const auto sizes = readJsonLines(dir / "records.enc");
  const auto blockDocs = readJsonLines(dir / "blocks.enc");

  auto& records = bundle.data.records;
  records.resize(sizes.size());
  {
    auto in = openIn(dir / "idmap");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      const std::size_t i = std::stoul(line.substr(0, comma));
      if (comma == std::string::npos || i >= records.size()) throw Error("malformed idmap line: " + line);
      records[i].id = line.substr(comma + 1);
    }
  }
  const int packing = std::stoi(bundle.manifest.at("packing"));

  std::map<std::string, std::vector<mpc::Word>> blockSums;
  std::vector<std::vector<mpc::Word>> recordSums(records.size());
  for (int p = 1; p <= mpc::kParties; ++p) {
    for (const auto& doc : readJsonLines(dir / ("shares." + std::to_string(p)))) {
      const auto values = doc.at("values").get<std::vector<mpc::Word>>();
      std::vector<mpc::Word>* sum = nullptr;
      if (doc.contains("record")) {
        const auto i = doc.at("record").get<std::size_t>();
        if (i >= records.size()) throw Error("share for unknown record " + std::to_string(i));
        sum = &recordSums[i];
      } else {
        sum = &blockSums[doc.at("block").get<std::string>()];
      }
      if (sum->empty()) sum->assign(values.size(), 0);
      if (sum->size() != values.size()) throw Error("share vectors of different lengths");
      for (std::size_t k = 0; k < values.size(); ++k) (*sum)[k] += values[k];
    }
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto expected = sizes[i].at("containers").get<std::size_t>();
    if (recordSums[i].size() != expected) throw Error("record " + std::to_string(i) + " size mismatch");
    records[i].encoded.id = records[i].id;
    records[i].encoded.packing = packing;
    for (auto w : recordSums[i]) records[i].encoded.containers.push_back(static_cast<std::int64_t>(w));
  }
  for (const auto& doc : blockDocs) {
    const auto key = doc.at("key").get<std::string>();
    const auto& ids = blockSums[key];
    if (ids.size() != doc.at("size").get<std::size_t>()) throw Error("block " + key + " size mismatch");
    for (auto w : ids) {
      if (w >= records.size()) throw Error("block " + key + " references an unknown record");
      records[w].keys.push_back(key);
    }
  }
  return bundle;
}

}  // namespace amppere
