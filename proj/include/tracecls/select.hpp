#pragma once

#include <span>
#include <string>
#include <vector>

#include "tracecls/dataset.hpp"

namespace tracecls {

// MI scores for every column, plus the selection order: mi descending, ties
// broken by ascending column id. Scores are in nats and non-negative.
struct MiRanking {
  std::vector<double> mi;        // indexed by column id
  std::vector<ColumnId> order;   // permutation of 0..D-1
};

// Plug-in mutual information between a binary feature x and the label y:
// sum over the 2x2 contingency table of p(x,y) ln(p(x,y)/(p(x)p(y))), with
// empty cells contributing zero. Throws EmptyDataset / UnlabeledRow.
double mutual_information(const BinaryDataset& dataset, ColumnId column);

// MI from explicit 2x2 counts; n11 = (present, ransomware) and so on.
double mi_from_counts(std::size_t n11, std::size_t n10, std::size_t n01, std::size_t n00);

MiRanking rank_features(const BinaryDataset& dataset);

// Ranking restricted to a subset of rows (used by per-split selection).
MiRanking rank_features(const BinaryDataset& dataset, std::span<const std::size_t> row_indices);

// First k of ranking.order, returned sorted ascending. Throws KOutOfRange.
std::vector<ColumnId> select_top(const MiRanking& ranking, std::size_t k);

// CSV export: "column_id,feature_name,mi_nats" in ranking order.
std::string ranking_csv(const MiRanking& ranking, const FeatureVocabulary& vocab);

// Percentage of the top-k selection falling into each report section,
// largest share first: "class,count,percent".
std::string class_breakdown_csv(std::span<const ColumnId> selected,
                                const FeatureVocabulary& vocab);

}  // namespace tracecls
