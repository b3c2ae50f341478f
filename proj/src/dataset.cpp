#include "tracecls/dataset.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tracecls/errors.hpp"
#include "tracecls/fingerprint.hpp"

namespace tracecls {

using json = nlohmann::ordered_json;

void BinaryDataset::require_labels() const {
  if (rows.empty()) throw EmptyDataset("dataset has no rows");
  for (const auto& row : rows) {
    if (!row.label) throw UnlabeledRow("sample \"" + row.sample_id + "\" has no label");
  }
}

std::pair<std::size_t, std::size_t> BinaryDataset::class_counts() const {
  require_labels();
  std::size_t goodware = 0;
  std::size_t ransomware = 0;
  for (const auto& row : rows) (*row.label ? ransomware : goodware)++;
  return {goodware, ransomware};
}

std::string BinaryDataset::fingerprint() const {
  Fingerprint fp;
  fp.update(vocabulary_fingerprint).sep();
  fp.update(std::to_string(column_count)).sep();
  for (const auto& row : rows) {
    fp.update(row.sample_id).sep();
    fp.update(row.label ? std::to_string(*row.label) : "-").sep();
    fp.update(row.family ? *row.family : "").sep();
    for (ColumnId id : row.present) fp.update(std::to_string(id)).sep();
    fp.sep();
  }
  return fp.hex();
}

std::string BinaryDataset::to_jsonl() const {
  std::string out;
  json header = json::object();
  header["format"] = "dataset/1";
  header["vocabulary_fingerprint"] = vocabulary_fingerprint;
  header["columns"] = column_count;
  header["rows"] = rows.size();
  header["fingerprint"] = fingerprint();
  out += header.dump();
  out += '\n';
  for (const auto& row : rows) {
    json obj = json::object();
    obj["sample_id"] = row.sample_id;
    if (row.label)
      obj["label"] = *row.label;
    else
      obj["label"] = nullptr;
    if (row.family) obj["family"] = *row.family;
    obj["present"] = row.present;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

BinaryDataset BinaryDataset::from_jsonl(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty dataset file");

  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed dataset header: ") + e.what());
  }
  if (!header.is_object() || header.value("format", "") != "dataset/1")
    throw SchemaError("not a dataset/1 document");

  BinaryDataset ds;
  ds.vocabulary_fingerprint = header.value("vocabulary_fingerprint", "");
  ds.column_count = header.value("columns", ColumnId{0});

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    SampleRow row;
    row.sample_id = obj.at("sample_id").get<std::string>();
    if (obj.contains("label") && !obj.at("label").is_null()) {
      const int label = obj.at("label").get<int>();
      if (label != 0 && label != 1)
        throw SchemaError("dataset line " + std::to_string(line_no) + ": label must be 0 or 1");
      row.label = label;
    }
    if (obj.contains("family") && !obj.at("family").is_null())
      row.family = obj.at("family").get<std::string>();
    ColumnId prev = -1;
    for (const auto& item : obj.at("present")) {
      const ColumnId id = item.get<ColumnId>();
      if (id <= prev)
        throw SchemaError("dataset line " + std::to_string(line_no) +
                          ": present ids must be strictly increasing");
      if (id < 0 || id >= ds.column_count)
        throw SchemaError("dataset line " + std::to_string(line_no) + ": column id out of range");
      row.present.push_back(id);
      prev = id;
    }
    ds.rows.push_back(std::move(row));
  }
  if (header.contains("fingerprint") &&
      header.at("fingerprint").get_ref<const std::string&>() != ds.fingerprint())
    throw FingerprintMismatch("dataset fingerprint does not match its rows");
  return ds;
}

void BinaryDataset::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_jsonl();
  if (!out) throw IoError("write failed on " + path.string());
}

BinaryDataset BinaryDataset::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_jsonl(text);
}

}  // namespace tracecls
