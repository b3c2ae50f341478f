#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tracecls {

using ColumnId = std::int32_t;

// One namespaced feature class per (section, operation) pair: seventeen in
// total across the seven report sections.
enum class FeatureClass : int {
  Api = 0,
  RegRead, RegOpen, RegWrite, RegDelete,
  FileRead, FileOpen, FileWrite, FileDelete,
  ExtRead, ExtOpen, ExtWrite, ExtDelete,
  DirEnumerate, DirCreate,
  Drop,
  Str,
};

inline constexpr int kFeatureClassCount = 17;

std::string_view class_prefix(FeatureClass cls);           // e.g. "reg:write"
FeatureClass class_from_prefix(std::string_view prefix);   // inverse, throws SchemaError
FeatureClass class_of_feature_name(std::string_view name); // longest-prefix match

// Coarse report section a class belongs to ("Registry Keys Operations", ...).
std::string_view class_group(FeatureClass cls);

inline std::string feature_name(FeatureClass cls, std::string_view token) {
  std::string name(class_prefix(cls));
  name += ':';
  name += token;
  return name;
}

// Frozen, ordered set of namespaced features defining matrix columns.
// Entries are sorted lexicographically by name; index is the inverse map.
class FeatureVocabulary {
 public:
  struct Entry {
    std::string name;  // "<class prefix>:<token>"
    FeatureClass cls;
  };

  FeatureVocabulary() = default;
  explicit FeatureVocabulary(std::vector<Entry> sorted_entries,
                             std::string corpus_fp = {});

  ColumnId size() const { return static_cast<ColumnId>(entries_.size()); }
  const std::vector<Entry>& entries() const { return entries_; }
  const Entry& entry(ColumnId id) const { return entries_[static_cast<std::size_t>(id)]; }

  // Column id for a feature name, or -1 when unseen at fit time.
  ColumnId lookup(std::string_view name) const;

  const std::string& fingerprint() const { return fingerprint_; }
  const std::string& corpus_fingerprint() const { return corpus_fingerprint_; }

  std::string to_json() const;
  static FeatureVocabulary from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static FeatureVocabulary load(const std::filesystem::path& path);

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string_view, ColumnId> index_;  // views into entries_
  std::string fingerprint_;
  std::string corpus_fingerprint_;
};

}  // namespace tracecls
