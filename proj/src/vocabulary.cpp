#include "tracecls/vocabulary.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "tracecls/errors.hpp"
#include "tracecls/fingerprint.hpp"

namespace tracecls {

using json = nlohmann::ordered_json;

namespace {

struct ClassInfo {
  FeatureClass cls;
  std::string_view prefix;
  std::string_view group;
};

constexpr std::array<ClassInfo, kFeatureClassCount> kClasses = {{
    {FeatureClass::Api, "api", "API Stats"},
    {FeatureClass::RegRead, "reg:read", "Registry Keys Operations"},
    {FeatureClass::RegOpen, "reg:open", "Registry Keys Operations"},
    {FeatureClass::RegWrite, "reg:write", "Registry Keys Operations"},
    {FeatureClass::RegDelete, "reg:delete", "Registry Keys Operations"},
    {FeatureClass::FileRead, "file:read", "Files Operations"},
    {FeatureClass::FileOpen, "file:open", "Files Operations"},
    {FeatureClass::FileWrite, "file:write", "Files Operations"},
    {FeatureClass::FileDelete, "file:delete", "Files Operations"},
    {FeatureClass::ExtRead, "ext:read", "File Extensions"},
    {FeatureClass::ExtOpen, "ext:open", "File Extensions"},
    {FeatureClass::ExtWrite, "ext:write", "File Extensions"},
    {FeatureClass::ExtDelete, "ext:delete", "File Extensions"},
    {FeatureClass::DirEnumerate, "dir:enumerate", "Directory Operations"},
    {FeatureClass::DirCreate, "dir:create", "Directory Operations"},
    {FeatureClass::Drop, "drop", "Dropped Files Extensions"},
    {FeatureClass::Str, "str", "Strings"},
}};

}  // namespace

std::string_view class_prefix(FeatureClass cls) {
  return kClasses[static_cast<std::size_t>(cls)].prefix;
}

std::string_view class_group(FeatureClass cls) {
  return kClasses[static_cast<std::size_t>(cls)].group;
}

FeatureClass class_from_prefix(std::string_view prefix) {
  for (const auto& info : kClasses) {
    if (info.prefix == prefix) return info.cls;
  }
  throw SchemaError("unknown feature class prefix \"" + std::string(prefix) + "\"");
}

FeatureClass class_of_feature_name(std::string_view name) {
  // Tokens may contain ':' themselves (paths with drive letters), so match
  // the longest known "<prefix>:" head instead of splitting on colons.
  const ClassInfo* best = nullptr;
  for (const auto& info : kClasses) {
    if (name.size() > info.prefix.size() && name[info.prefix.size()] == ':' &&
        name.starts_with(info.prefix)) {
      if (!best || info.prefix.size() > best->prefix.size()) best = &info;
    }
  }
  if (!best) throw SchemaError("feature name lacks a known class prefix: " + std::string(name));
  return best->cls;
}

FeatureVocabulary::FeatureVocabulary(std::vector<Entry> sorted_entries,
                                     std::string corpus_fp)
    : entries_(std::move(sorted_entries)), corpus_fingerprint_(std::move(corpus_fp)) {
  index_.reserve(entries_.size());
  Fingerprint fp;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && !(entries_[i - 1].name < entries_[i].name))
      throw InvalidConfig("vocabulary entries must be strictly sorted by name");
    index_.emplace(entries_[i].name, static_cast<ColumnId>(i));
    fp.update(entries_[i].name).sep();
  }
  fingerprint_ = fp.hex();
}

ColumnId FeatureVocabulary::lookup(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? ColumnId{-1} : it->second;
}

std::string FeatureVocabulary::to_json() const {
  json doc = json::object();
  doc["format"] = "vocabulary/1";
  doc["fingerprint"] = fingerprint_;
  doc["corpus_fingerprint"] = corpus_fingerprint_;
  doc["size"] = entries_.size();
  json features = json::array();
  for (const auto& entry : entries_) features.push_back(entry.name);
  doc["features"] = std::move(features);
  return doc.dump(2) + "\n";
}

FeatureVocabulary FeatureVocabulary::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed vocabulary JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "vocabulary/1")
    throw SchemaError("not a vocabulary/1 document");
  std::vector<Entry> entries;
  for (const auto& item : doc.at("features")) {
    const std::string& name = item.get_ref<const std::string&>();
    entries.push_back({name, class_of_feature_name(name)});
  }
  FeatureVocabulary vocab(std::move(entries), doc.value("corpus_fingerprint", ""));
  if (doc.contains("fingerprint") &&
      doc.at("fingerprint").get_ref<const std::string&>() != vocab.fingerprint())
    throw FingerprintMismatch("vocabulary fingerprint does not match its entries");
  return vocab;
}

void FeatureVocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json();
  if (!out) throw IoError("write failed on " + path.string());
}

FeatureVocabulary FeatureVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace tracecls
