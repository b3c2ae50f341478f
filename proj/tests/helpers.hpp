#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tracecls/dataset.hpp"
#include "tracecls/rng.hpp"

namespace testutil {

inline tracecls::BinaryDataset make_dataset(
    tracecls::ColumnId column_count,
    const std::vector<std::pair<int, std::vector<tracecls::ColumnId>>>& rows) {
  tracecls::BinaryDataset ds;
  ds.vocabulary_fingerprint = "fp-test";
  ds.column_count = column_count;
  int i = 0;
  for (const auto& [label, present] : rows) {
    tracecls::SampleRow row;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%03d", i++);
    row.sample_id = buf;
    row.label = label;
    row.present = present;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

// Random binary dataset with both classes guaranteed present.
inline tracecls::BinaryDataset random_dataset(tracecls::Rng& rng, int n, int d,
                                              double density = 0.4) {
  std::vector<std::pair<int, std::vector<tracecls::ColumnId>>> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<tracecls::ColumnId> present;
    for (int j = 0; j < d; ++j)
      if (rng.bernoulli(density)) present.push_back(j);
    const int label = i < 2 ? i : (rng.bernoulli(0.5) ? 1 : 0);
    rows.emplace_back(label, std::move(present));
  }
  return make_dataset(d, rows);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 1000; ++i) {
      auto candidate = base / (tag + "-" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir for " + tag);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace testutil
