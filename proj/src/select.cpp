#include "tracecls/select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "tracecls/errors.hpp"

namespace tracecls {

double mi_from_counts(std::size_t n11, std::size_t n10, std::size_t n01, std::size_t n00) {
  const double n = static_cast<double>(n11 + n10 + n01 + n00);
  const double px1 = static_cast<double>(n11 + n10) / n;
  const double px0 = static_cast<double>(n01 + n00) / n;
  const double py1 = static_cast<double>(n11 + n01) / n;
  const double py0 = static_cast<double>(n10 + n00) / n;

  double mi = 0.0;
  const auto term = [&](std::size_t nxy, double px, double py) {
    if (nxy == 0) return;  // 0 * ln(0/q) = 0
    const double pxy = static_cast<double>(nxy) / n;
    mi += pxy * std::log(pxy / (px * py));
  };
  term(n11, px1, py1);
  term(n10, px1, py0);
  term(n01, px0, py1);
  term(n00, px0, py0);
  return mi < 0.0 ? 0.0 : mi;  // clamp rounding residue of independent cells
}

namespace {

struct ColumnCounts {
  std::vector<std::size_t> present_ransom;  // per column
  std::vector<std::size_t> present_good;
  std::size_t n_ransom = 0;
  std::size_t n_good = 0;
};

template <typename RowIndexRange>
ColumnCounts count_columns(const BinaryDataset& dataset, const RowIndexRange& indices) {
  ColumnCounts counts;
  counts.present_ransom.assign(static_cast<std::size_t>(dataset.column_count), 0);
  counts.present_good.assign(static_cast<std::size_t>(dataset.column_count), 0);
  for (std::size_t i : indices) {
    const SampleRow& row = dataset.rows[i];
    if (!row.label) throw UnlabeledRow("sample \"" + row.sample_id + "\" has no label");
    auto& per_column = *row.label ? counts.present_ransom : counts.present_good;
    (*row.label ? counts.n_ransom : counts.n_good)++;
    for (ColumnId id : row.present) per_column[static_cast<std::size_t>(id)]++;
  }
  return counts;
}

MiRanking rank_from_counts(const ColumnCounts& counts, ColumnId column_count) {
  MiRanking ranking;
  const std::size_t d = static_cast<std::size_t>(column_count);
  ranking.mi.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t n11 = counts.present_ransom[j];
    const std::size_t n10 = counts.present_good[j];
    ranking.mi[j] = mi_from_counts(n11, n10, counts.n_ransom - n11, counts.n_good - n10);
  }
  ranking.order.resize(d);
  std::iota(ranking.order.begin(), ranking.order.end(), ColumnId{0});
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](ColumnId a, ColumnId b) {
                     const double ma = ranking.mi[static_cast<std::size_t>(a)];
                     const double mb = ranking.mi[static_cast<std::size_t>(b)];
                     if (ma != mb) return ma > mb;
                     return a < b;
                   });
  return ranking;
}

}  // namespace

double mutual_information(const BinaryDataset& dataset, ColumnId column) {
  if (dataset.rows.empty()) throw EmptyDataset("dataset has no rows");
  if (column < 0 || column >= dataset.column_count)
    throw KOutOfRange("column id out of range");
  std::size_t n11 = 0;
  std::size_t n10 = 0;
  std::size_t n_ransom = 0;
  std::size_t n_good = 0;
  for (const SampleRow& row : dataset.rows) {
    if (!row.label) throw UnlabeledRow("sample \"" + row.sample_id + "\" has no label");
    const bool present = std::binary_search(row.present.begin(), row.present.end(), column);
    if (*row.label) {
      ++n_ransom;
      if (present) ++n11;
    } else {
      ++n_good;
      if (present) ++n10;
    }
  }
  return mi_from_counts(n11, n10, n_ransom - n11, n_good - n10);
}

MiRanking rank_features(const BinaryDataset& dataset) {
  if (dataset.rows.empty()) throw EmptyDataset("dataset has no rows");
  std::vector<std::size_t> all(dataset.rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return rank_from_counts(count_columns(dataset, all), dataset.column_count);
}

MiRanking rank_features(const BinaryDataset& dataset, std::span<const std::size_t> row_indices) {
  if (row_indices.empty()) throw EmptyDataset("no rows selected");
  return rank_from_counts(count_columns(dataset, row_indices), dataset.column_count);
}

std::vector<ColumnId> select_top(const MiRanking& ranking, std::size_t k) {
  if (k < 1 || k > ranking.order.size())
    throw KOutOfRange("k = " + std::to_string(k) + " outside 1.." +
                      std::to_string(ranking.order.size()));
  std::vector<ColumnId> selected(ranking.order.begin(),
                                 ranking.order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::string ranking_csv(const MiRanking& ranking, const FeatureVocabulary& vocab) {
  std::string out = "column_id,feature_name,mi_nats\n";
  char buf[64];
  for (ColumnId id : ranking.order) {
    std::snprintf(buf, sizeof(buf), "%.12g", ranking.mi[static_cast<std::size_t>(id)]);
    out += std::to_string(id);
    out += ',';
    // Feature names may contain commas; quote per RFC 4180.
    const std::string& name = vocab.entry(id).name;
    if (name.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char c : name) {
        out += c;
        if (c == '"') out += '"';
      }
      out += '"';
    } else {
      out += name;
    }
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

std::string class_breakdown_csv(std::span<const ColumnId> selected,
                                const FeatureVocabulary& vocab) {
  std::map<std::string_view, std::size_t> per_group;
  for (ColumnId id : selected) per_group[class_group(vocab.entry(id).cls)]++;

  std::vector<std::pair<std::string_view, std::size_t>> groups(per_group.begin(),
                                                               per_group.end());
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::string out = "class,count,percent\n";
  char buf[64];
  for (const auto& [group, count] : groups) {
    std::snprintf(buf, sizeof(buf), "%.2f",
                  100.0 * static_cast<double>(count) / static_cast<double>(selected.size()));
    out += group;
    out += ',';
    out += std::to_string(count);
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace tracecls
