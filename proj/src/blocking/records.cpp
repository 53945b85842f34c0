#include "amppere/blocking/records.hpp"

#include "amppere/blocking/tokens.hpp"
#include "amppere/machine/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>

namespace amppere {

std::string Record::field(const std::string& name) const {
  for (const auto& [key, value] : fields) {
    if (key == name) return value;
  }
  return {};
}

const FieldList& defaultFields() {
  static const FieldList fields{"given_name", "surname", "street_number", "address",
                                "suburb",     "postcode", "state"};
  return fields;
}

std::string recordText(const Record& record, const FieldList& fields) {
  std::string joined;
  for (const auto& name : fields) {
    const std::string value = record.field(name);
    if (value.empty()) continue;
    if (!joined.empty()) joined.push_back(' ');
    joined += value;
  }
  return normalizeText(joined);
}

std::vector<Record> readRecords(std::istream& in) {
  std::vector<Record> records;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto doc = nlohmann::ordered_json::parse(line);
      Record r;
      const auto& id = doc.at("id");
      r.id = id.is_string() ? id.get<std::string>() : id.dump();
      if (doc.contains("fields")) {
        for (const auto& [key, value] : doc.at("fields").items()) {
          r.fields.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
        }
      }
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error("record line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return records;
}

std::vector<Record> readRecords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return readRecords(in);
}

void writeRecords(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json fields = nlohmann::ordered_json::object();
    for (const auto& [key, value] : r.fields) fields[key] = value;
    nlohmann::ordered_json doc{{"id", r.id}, {"fields", fields}};
    out << doc.dump() << '\n';
  }
}

void writeRecords(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  writeRecords(out, records);
}

}  // namespace amppere
