#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "tracecls/errors.hpp"
#include "tracecls/eval.hpp"
#include "tracecls/featurize.hpp"
#include "tracecls/ingest.hpp"
#include "tracecls/select.hpp"
#include "tracecls/synth.hpp"

#include "helpers.hpp"

using namespace tracecls;

namespace {

SynthConfig small_config() {
  SynthConfig config = default_synth_config();
  config.n_goodware = 120;
  config.families = {{"Redfox", 40}, {"Bluejay", 40}};
  config.n_core_signal = 10;
  config.n_family_signal = 3;
  return config;
}

}  // namespace

TEST_CASE("default corpus shape") {
  const SynthConfig config = default_synth_config();
  CHECK(config.seed == 7);
  CHECK(config.n_goodware == 942);
  REQUIRE(config.families.size() == 11);
  int ransomware = 0;
  for (const auto& f : config.families) ransomware += f.n_samples;
  CHECK(ransomware == 582);
  int vocab = 0;
  for (int n : config.vocab_sizes) vocab += n;
  CHECK(vocab == 5000);
  CHECK(config.n_core_signal == 50);
  CHECK(config.mode == SynthMode::SharedCore);
}

TEST_CASE("generation respects counts, labels, and id uniqueness") {
  const SynthConfig config = small_config();
  const SynthOutput output = generate(config);
  REQUIRE(output.reports.size() == 200);

  std::set<std::string> ids;
  std::map<std::string, int> family_counts;
  int goodware = 0;
  for (const auto& report : output.reports) {
    CHECK(ids.insert(report.sample_id).second);
    CHECK(report.effective());
    REQUIRE(report.label.has_value());
    if (*report.label == Label::Goodware) {
      ++goodware;
      CHECK_FALSE(report.family.has_value());
    } else {
      REQUIRE(report.family.has_value());
      ++family_counts[*report.family];
    }
  }
  CHECK(goodware == 120);
  CHECK(family_counts.at("Redfox") == 40);
  CHECK(family_counts.at("Bluejay") == 40);

  CHECK(output.plantation.core.size() == 10);
  CHECK(output.plantation.family_signal.at("Redfox").size() == 3);
  CHECK(output.plantation.family_signal.at("Bluejay").size() == 3);
  CHECK(output.plantation.mode == SynthMode::SharedCore);
  CHECK(output.plantation.core_partition.empty());
}

TEST_CASE("generation is deterministic in the seed") {
  const SynthConfig config = small_config();
  const SynthOutput a = generate(config);
  const SynthOutput b = generate(config);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) CHECK(a.reports[i] == b.reports[i]);
  CHECK(plantation_to_json(a.plantation) == plantation_to_json(b.plantation));

  SynthConfig reseeded = config;
  reseeded.seed = 8;
  const SynthOutput c = generate(reseeded);
  CHECK(corpus_fingerprint(a.reports) != corpus_fingerprint(c.reports));
}

TEST_CASE("planted core columns dominate the mi ranking") {
  const SynthOutput output = generate(small_config());
  const FeatureVocabulary vocab = fit_vocabulary(output.reports);
  const BinaryDataset ds = transform(output.reports, vocab);
  const MiRanking ranking = rank_features(ds);

  std::set<ColumnId> core;
  for (const auto& name : output.plantation.core) {
    const ColumnId id = vocab.lookup(name);
    REQUIRE(id >= 0);
    core.insert(id);
  }
  std::size_t hits = 0;
  for (std::size_t r = 0; r < 15 && r < ranking.order.size(); ++r)
    if (core.count(ranking.order[r])) ++hits;
  CHECK(hits >= 9);  // nearly all of the 10 planted columns rank at the top
}

TEST_CASE("family signal is family-specific") {
  const SynthOutput output = generate(small_config());
  const FeatureVocabulary vocab = fit_vocabulary(output.reports);
  const BinaryDataset ds = transform(output.reports, vocab);

  for (const auto& [family, names] : output.plantation.family_signal) {
    for (const auto& name : names) {
      const ColumnId id = vocab.lookup(name);
      REQUIRE(id >= 0);
      int in_family = 0, in_family_present = 0;
      int out_family = 0, out_family_present = 0;
      for (const auto& row : ds.rows) {
        const bool present = std::binary_search(row.present.begin(), row.present.end(), id);
        if (row.family && *row.family == family) {
          ++in_family;
          in_family_present += present;
        } else {
          ++out_family;
          out_family_present += present;
        }
      }
      // 0.9 presence inside the family, 0.1 outside; 40 vs 160 rows leave a
      // wide gap between the two empirical rates.
      CHECK(static_cast<double>(in_family_present) / in_family > 0.6);
      CHECK(static_cast<double>(out_family_present) / out_family < 0.4);
    }
  }
}

TEST_CASE("no planted signal leaves nothing to learn") {
  SynthConfig config = small_config();
  config.n_core_signal = 0;
  config.n_family_signal = 0;
  config.background_density = 0.5;
  // keep the vocabulary small so the eval below stays quick
  config.vocab_sizes.fill(0);
  config.vocab_sizes[static_cast<int>(FeatureClass::Api)] = 200;
  config.vocab_sizes[static_cast<int>(FeatureClass::Str)] = 200;

  const SynthOutput output = generate(config);
  CHECK(output.plantation.core.empty());
  for (const auto& [family, names] : output.plantation.family_signal)
    CHECK(names.empty());

  const FeatureVocabulary vocab = fit_vocabulary(output.reports);
  const BinaryDataset ds = transform(output.reports, vocab);

  const MiRanking ranking = rank_features(ds);
  for (double mi : ranking.mi) CHECK(mi < 0.06);  // sampling noise only

  ClassifierConfig clf;
  SplitSpec split;
  split.repetitions = 20;
  split.seed = 7;
  const EvalReport report = repeated_split_eval(ds, clf, split, 50);
  CHECK(report.summary.auc.mean > 0.4);
  CHECK(report.summary.auc.mean < 0.6);
}

TEST_CASE("disjoint mode partitions the core across families") {
  SynthConfig config = small_config();
  config.mode = SynthMode::Disjoint;
  const SynthOutput output = generate(config);
  CHECK(output.plantation.mode == SynthMode::Disjoint);
  REQUIRE(output.plantation.core_partition.size() == 2);
  std::set<std::string> seen;
  for (const auto& [family, names] : output.plantation.core_partition) {
    CHECK_FALSE(names.empty());
    for (const auto& name : names) CHECK(seen.insert(name).second);
  }
  CHECK(seen.size() == output.plantation.core.size());
}

TEST_CASE("correlated core mode keeps the plantation record") {
  SynthConfig config = small_config();
  config.signal_correlation = 0.9;
  const SynthOutput output = generate(config);
  CHECK(output.plantation.signal_correlation == 0.9);
  const Plantation round =
      plantation_from_json(plantation_to_json(output.plantation));
  CHECK(round.signal_correlation == 0.9);
  CHECK(round.core == output.plantation.core);
  CHECK(round.family_signal == output.plantation.family_signal);
  CHECK(round.mode == output.plantation.mode);
}

TEST_CASE("write_corpus emits loadable reports plus ground truth") {
  testutil::TempDir dir("tracecls-synth");
  const SynthOutput output = generate(small_config());
  write_corpus(output, dir.path());

  CHECK(std::filesystem::exists(dir.path() / "plantation.json"));
  const std::string manifest = testutil::slurp(dir.path() / "manifest.csv");
  CHECK(manifest.rfind("sample_id,label,family\n", 0) == 0);
  CHECK(std::count(manifest.begin(), manifest.end(), '\n') == 201);

  const auto loaded = load_corpus(dir.path(), true);
  REQUIRE(loaded.size() == output.reports.size());
  std::vector<BehavioralReport> sorted = output.reports;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(loaded[i] == sorted[i]);

  const Plantation plantation = plantation_from_json(
      nlohmann::json::parse(testutil::slurp(dir.path() / "plantation.json")));
  CHECK(plantation.core == output.plantation.core);
}

TEST_CASE("config validation") {
  SynthConfig config = small_config();
  config.signal_present_ransomware = 1.2;
  CHECK_THROWS_AS((void)generate(config), InvalidConfig);

  config = small_config();
  config.mode = SynthMode::Disjoint;
  config.signal_correlation = 0.5;
  CHECK_THROWS_AS((void)generate(config), InvalidConfig);

  config = small_config();
  config.families[0].n_samples = -1;
  CHECK_THROWS_AS((void)generate(config), InvalidConfig);

  config = small_config();
  config.families[0].name = "bad/name";
  CHECK_THROWS_AS((void)generate(config), InvalidConfig);

  config = small_config();
  config.families = {{"Twin", 5}, {"twin", 5}};
  CHECK_THROWS_AS((void)generate(config), InvalidConfig);

  CHECK(synth_mode_from_string("shared-core") == SynthMode::SharedCore);
  CHECK(synth_mode_from_string("disjoint") == SynthMode::Disjoint);
  CHECK_THROWS_AS((void)synth_mode_from_string("other"), InvalidConfig);
  CHECK(to_string(SynthMode::SharedCore) == "shared-core");
}
