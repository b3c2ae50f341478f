#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tracecls/vocabulary.hpp"

namespace tracecls {

// One sample as a sparse binary row: strictly increasing column ids of the
// features the sample exhibits. Label 1 = ransomware, 0 = goodware.
struct SampleRow {
  std::string sample_id;
  std::optional<int> label;
  std::optional<std::string> family;
  std::vector<ColumnId> present;

  bool operator==(const SampleRow&) const = default;
};

struct BinaryDataset {
  std::string vocabulary_fingerprint;
  ColumnId column_count = 0;
  std::vector<SampleRow> rows;

  std::size_t size() const { return rows.size(); }

  // Throws UnlabeledRow if any row lacks a label; EmptyDataset if empty.
  void require_labels() const;
  // Counts of (goodware, ransomware) rows; throws on unlabeled rows.
  std::pair<std::size_t, std::size_t> class_counts() const;

  // Content fingerprint over the vocabulary fingerprint and all rows.
  std::string fingerprint() const;

  // JSON-lines with a header object carrying the fingerprints.
  std::string to_jsonl() const;
  static BinaryDataset from_jsonl(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static BinaryDataset load(const std::filesystem::path& path);

  bool operator==(const BinaryDataset&) const = default;
};

}  // namespace tracecls
