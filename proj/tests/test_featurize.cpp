#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "tracecls/dataset.hpp"
#include "tracecls/errors.hpp"
#include "tracecls/featurize.hpp"
#include "tracecls/ingest.hpp"
#include "tracecls/vocabulary.hpp"

#include "helpers.hpp"

using namespace tracecls;

namespace {

std::vector<BehavioralReport> tiny_corpus() {
  const char* a = R"({
    "schema": "trace/1", "sample_id": "mal-1", "label": "ransomware", "family": "Locker",
    "api_calls": ["CryptEncrypt", "CreateFileW"],
    "file_ops": {"write": ["c:\\note.txt"]},
    "extension_ops": {"write": ["docx"]},
    "dropped_file_types": ["exe"],
    "strings": ["pay now"]})";
  const char* b = R"({
    "schema": "trace/1", "sample_id": "good-1", "label": "goodware",
    "api_calls": ["CreateFileW"],
    "registry_ops": {"read": ["hkcu\\x"]},
    "directory_ops": {"enumerate": ["c:\\users"]}})";
  return {parse_report(a), parse_report(b)};
}

}  // namespace

TEST_CASE("feature names carry class prefixes") {
  CHECK(feature_name(FeatureClass::Api, "createfilew") == "api:createfilew");
  CHECK(feature_name(FeatureClass::RegWrite, "hkcu\\x") == "reg:write:hkcu\\x");
  CHECK(feature_name(FeatureClass::ExtDelete, "docx") == "ext:delete:docx");
  CHECK(feature_name(FeatureClass::DirEnumerate, "c:\\u") == "dir:enumerate:c:\\u");
  CHECK(feature_name(FeatureClass::Drop, "exe") == "drop:exe");
  CHECK(feature_name(FeatureClass::Str, "pay now") == "str:pay now");
  // Tokens may themselves contain ':'; the class must still round-trip.
  const std::string tricky = feature_name(FeatureClass::FileWrite, "c:\\a.txt");
  CHECK(class_of_feature_name(tricky) == FeatureClass::FileWrite);
  CHECK(class_of_feature_name("str:a:b:c") == FeatureClass::Str);
}

TEST_CASE("fit_vocabulary is sorted, deduplicated, and fingerprinted") {
  const auto corpus = tiny_corpus();
  const FeatureVocabulary vocab = fit_vocabulary(corpus);
  REQUIRE(vocab.size() > 0);
  for (ColumnId i = 1; i < vocab.size(); ++i)
    CHECK(vocab.entry(i - 1).name < vocab.entry(i).name);
  // "api:createfilew" appears in both reports but only once in the vocabulary.
  int hits = 0;
  for (ColumnId i = 0; i < vocab.size(); ++i)
    if (vocab.entry(i).name == "api:createfilew") ++hits;
  CHECK(hits == 1);
  CHECK(vocab.lookup("api:createfilew") >= 0);
  CHECK(vocab.lookup("api:nothere") == -1);
  CHECK(vocab.corpus_fingerprint() == corpus_fingerprint(corpus));
  CHECK(vocab.fingerprint().size() == 16);

  CHECK_THROWS_AS((void)fit_vocabulary({}), EmptyCorpus);
}

TEST_CASE("vocabulary JSON round-trip") {
  const FeatureVocabulary vocab = fit_vocabulary(tiny_corpus());
  const FeatureVocabulary again = FeatureVocabulary::from_json(vocab.to_json());
  CHECK(again.size() == vocab.size());
  CHECK(again.fingerprint() == vocab.fingerprint());
  CHECK(again.corpus_fingerprint() == vocab.corpus_fingerprint());
  for (ColumnId i = 0; i < vocab.size(); ++i) {
    CHECK(again.entry(i).name == vocab.entry(i).name);
    CHECK(again.entry(i).cls == vocab.entry(i).cls);
  }
}

TEST_CASE("transform produces sorted unique presence columns") {
  const auto corpus = tiny_corpus();
  const FeatureVocabulary vocab = fit_vocabulary(corpus);
  const BinaryDataset ds = transform(corpus, vocab);
  REQUIRE(ds.size() == 2);
  CHECK(ds.column_count == vocab.size());
  CHECK(ds.vocabulary_fingerprint == vocab.fingerprint());
  for (const auto& row : ds.rows) {
    CHECK(std::is_sorted(row.present.begin(), row.present.end()));
    CHECK(std::adjacent_find(row.present.begin(), row.present.end()) == row.present.end());
    for (ColumnId id : row.present) CHECK(id < vocab.size());
  }
  // corpus is loaded sorted by sample_id, so good-1 comes first after transform
  // of a sorted corpus; here we passed mal-1 first and order is preserved.
  CHECK(ds.rows[0].sample_id == "mal-1");
  CHECK(*ds.rows[0].label == 1);
  CHECK(*ds.rows[0].family == "Locker");
  CHECK(*ds.rows[1].label == 0);
  CHECK_FALSE(ds.rows[1].family.has_value());
}

TEST_CASE("project maps a report onto a foreign vocabulary") {
  const auto corpus = tiny_corpus();
  const FeatureVocabulary vocab = fit_vocabulary({corpus[1]});
  const auto present = project(corpus[0], vocab);
  // Only the shared api call survives; unseen features are dropped.
  REQUIRE(present.size() == 1);
  CHECK(vocab.entry(present[0]).name == "api:createfilew");
}

TEST_CASE("transform forbids unlabeled rows unless asked not to") {
  auto corpus = tiny_corpus();
  corpus[1].label.reset();
  const FeatureVocabulary vocab = fit_vocabulary(corpus);
  CHECK_THROWS_AS((void)transform(corpus, vocab), MissingLabel);
  const BinaryDataset ds = transform(corpus, vocab, false);
  CHECK_FALSE(ds.rows[1].label.has_value());
  CHECK_THROWS_AS(ds.require_labels(), UnlabeledRow);
}

TEST_CASE("dataset JSONL round-trip and fingerprint stability") {
  const auto corpus = tiny_corpus();
  const FeatureVocabulary vocab = fit_vocabulary(corpus);
  const BinaryDataset ds = transform(corpus, vocab);
  const std::string text = ds.to_jsonl();
  const BinaryDataset again = BinaryDataset::from_jsonl(text);
  CHECK(again == ds);
  CHECK(again.to_jsonl() == text);
  CHECK(again.fingerprint() == ds.fingerprint());
  const auto [good, ransom] = ds.class_counts();
  CHECK(good == 1);
  CHECK(ransom == 1);
}

TEST_CASE("class groups cover all seventeen classes") {
  for (int c = 0; c < kFeatureClassCount; ++c) {
    const auto cls = static_cast<FeatureClass>(c);
    CHECK_FALSE(class_group(cls).empty());
    CHECK(class_from_prefix(class_prefix(cls)) == cls);
  }
}
