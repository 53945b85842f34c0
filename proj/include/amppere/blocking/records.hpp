#pragma once

// Line-delimited JSON record files: {"id": "...", "fields": {"name": "value", ...}}.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace amppere {

struct Record {
  std::string id;
  std::vector<std::pair<std::string, std::string>> fields;

  /// Empty when the field is absent.
  std::string field(const std::string& name) const;
};

using FieldList = std::vector<std::string>;

/// Census-style fields concatenated into the token string, in this order.
const FieldList& defaultFields();

/// Normalized concatenation of the listed fields, separated by one space.
/// Missing fields contribute nothing.
std::string recordText(const Record& record, const FieldList& fields = defaultFields());

std::vector<Record> readRecords(std::istream& in);
std::vector<Record> readRecords(const std::filesystem::path& path);
void writeRecords(std::ostream& out, const std::vector<Record>& records);
void writeRecords(const std::filesystem::path& path, const std::vector<Record>& records);

}  // namespace amppere
