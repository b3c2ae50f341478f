#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "tracecls/errors.hpp"
#include "tracecls/select.hpp"

#include "helpers.hpp"

using namespace tracecls;
using testutil::make_dataset;

namespace {

// Straight transcription of the plug-in estimator, kept deliberately naive
// so it cannot share bugs with the library implementation.
double brute_force_mi(const BinaryDataset& ds, ColumnId column) {
  double n[2][2] = {{0, 0}, {0, 0}};
  for (const auto& row : ds.rows) {
    const bool present =
        std::binary_search(row.present.begin(), row.present.end(), column);
    n[present ? 1 : 0][*row.label] += 1.0;
  }
  const double total = ds.rows.size();
  double mi = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double joint = n[x][y] / total;
      if (joint == 0.0) continue;
      const double px = (n[x][0] + n[x][1]) / total;
      const double py = (n[0][y] + n[1][y]) / total;
      mi += joint * std::log(joint / (px * py));
    }
  return mi;
}

}  // namespace

TEST_CASE("mi_from_counts matches the hand-computed oracle") {
  // 10 samples: feature present in 4 of 5 ransomware and 1 of 5 goodware.
  CHECK(mi_from_counts(4, 1, 1, 4) == doctest::Approx(0.19274475702175753).epsilon(1e-14));
  // Independent feature carries no information.
  CHECK(mi_from_counts(2, 2, 2, 2) == 0.0);
  // Perfectly informative feature saturates at ln 2.
  CHECK(mi_from_counts(5, 0, 0, 5) == doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  // Degenerate all-in-one-cell tables are zero, not NaN.
  CHECK(mi_from_counts(7, 0, 0, 0) == 0.0);
  CHECK(mi_from_counts(0, 0, 0, 7) == 0.0);
}

TEST_CASE("mutual_information equals brute force on random datasets") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(48));
    const int d = 1 + static_cast<int>(rng.bounded(10));
    const BinaryDataset ds = testutil::random_dataset(rng, n, d);
    for (ColumnId c = 0; c < d; ++c)
      CHECK(mutual_information(ds, c) ==
            doctest::Approx(brute_force_mi(ds, c)).epsilon(1e-12));
  }
}

TEST_CASE("mi invariances") {
  Rng rng(12);
  const BinaryDataset ds = testutil::random_dataset(rng, 30, 6);

  // Complementing a feature (presence <-> absence) leaves MI unchanged.
  BinaryDataset flipped = ds;
  for (auto& row : flipped.rows) {
    std::vector<ColumnId> complement;
    for (ColumnId c = 0; c < ds.column_count; ++c)
      if (!std::binary_search(row.present.begin(), row.present.end(), c))
        complement.push_back(c);
    row.present = std::move(complement);
  }
  // Swapping the labels leaves MI unchanged too.
  BinaryDataset relabeled = ds;
  for (auto& row : relabeled.rows) row.label = 1 - *row.label;

  for (ColumnId c = 0; c < ds.column_count; ++c) {
    const double base = mutual_information(ds, c);
    CHECK(base >= 0.0);
    CHECK(base <= std::numbers::ln2 + 1e-15);
    CHECK(mutual_information(flipped, c) == doctest::Approx(base).epsilon(1e-12));
    CHECK(mutual_information(relabeled, c) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("rank_features orders by mi then column id") {
  // Column 0: perfect. Column 2: same as column 3 (ties). Column 1: noise.
  const BinaryDataset ds = make_dataset(4, {
                                               {1, {0, 2, 3}},
                                               {1, {0, 1, 2, 3}},
                                               {0, {1}},
                                               {0, {}},
                                           });
  const MiRanking ranking = rank_features(ds);
  REQUIRE(ranking.order.size() == 4);
  CHECK(ranking.order[0] == 0);
  CHECK(ranking.order[1] == 2);  // tie with 3, smaller id first
  CHECK(ranking.order[2] == 3);
  CHECK(ranking.order[3] == 1);
  CHECK(ranking.mi[2] == ranking.mi[3]);
  CHECK(ranking.mi[0] == doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  CHECK(ranking.mi[1] == 0.0);
}

TEST_CASE("select_top returns ascending ids and nested selections") {
  Rng rng(13);
  const BinaryDataset ds = testutil::random_dataset(rng, 60, 25);
  const MiRanking ranking = rank_features(ds);
  const auto top5 = select_top(ranking, 5);
  const auto top12 = select_top(ranking, 12);
  CHECK(std::is_sorted(top5.begin(), top5.end()));
  CHECK(std::is_sorted(top12.begin(), top12.end()));
  CHECK(std::includes(top12.begin(), top12.end(), top5.begin(), top5.end()));
  CHECK(select_top(ranking, 25).size() == 25);
  CHECK_THROWS_AS((void)select_top(ranking, 26), KOutOfRange);
  CHECK_THROWS_AS((void)select_top(ranking, 0), KOutOfRange);
}

TEST_CASE("row-subset ranking sees only those rows") {
  const BinaryDataset ds = make_dataset(2, {
                                               {1, {0}},
                                               {0, {}},
                                               {1, {1}},
                                               {0, {1}},
                                           });
  // On rows {0,1} column 0 is perfect and column 1 constant.
  const std::vector<std::size_t> subset = {0, 1};
  const MiRanking ranking = rank_features(ds, subset);
  CHECK(ranking.mi[0] == doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  CHECK(ranking.mi[1] == 0.0);
}

TEST_CASE("selection rejects bad input") {
  BinaryDataset empty;
  empty.column_count = 3;
  CHECK_THROWS_AS((void)rank_features(empty), EmptyDataset);
  BinaryDataset unlabeled = make_dataset(2, {{1, {0}}, {0, {1}}});
  unlabeled.rows[0].label.reset();
  CHECK_THROWS_AS((void)mutual_information(unlabeled, 0), UnlabeledRow);
}

TEST_CASE("csv exports carry the documented headers") {
  const BinaryDataset ds = make_dataset(2, {{1, {0}}, {0, {1}}});
  MiRanking ranking = rank_features(ds);
  FeatureVocabulary vocab({{"api:a", FeatureClass::Api}, {"drop:b", FeatureClass::Drop}});
  const std::string rank_text = ranking_csv(ranking, vocab);
  CHECK(rank_text.rfind("column_id,feature_name,mi_nats\n", 0) == 0);
  CHECK(std::count(rank_text.begin(), rank_text.end(), '\n') == 3);
  const std::string breakdown = class_breakdown_csv(select_top(ranking, 2), vocab);
  CHECK(breakdown.rfind("class,count,percent\n", 0) == 0);
  CHECK(breakdown.find("API Stats") != std::string::npos);
}
