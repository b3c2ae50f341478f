#include "tracecls/featurize.hpp"

#include <algorithm>
#include <set>

#include "tracecls/errors.hpp"
#include "tracecls/ingest.hpp"

namespace tracecls {

namespace {

template <typename Fn>
void for_each_feature(const BehavioralReport& report, Fn&& fn) {
  for (const auto& token : report.api_calls) fn(FeatureClass::Api, token);

  static constexpr std::array<FeatureClass, 4> reg = {
      FeatureClass::RegRead, FeatureClass::RegOpen, FeatureClass::RegWrite,
      FeatureClass::RegDelete};
  static constexpr std::array<FeatureClass, 4> file = {
      FeatureClass::FileRead, FeatureClass::FileOpen, FeatureClass::FileWrite,
      FeatureClass::FileDelete};
  static constexpr std::array<FeatureClass, 4> ext = {
      FeatureClass::ExtRead, FeatureClass::ExtOpen, FeatureClass::ExtWrite,
      FeatureClass::ExtDelete};
  for (const auto& [op, tokens] : report.registry_ops)
    for (const auto& token : tokens) fn(reg[static_cast<std::size_t>(op)], token);
  for (const auto& [op, tokens] : report.file_ops)
    for (const auto& token : tokens) fn(file[static_cast<std::size_t>(op)], token);
  for (const auto& [op, tokens] : report.extension_ops)
    for (const auto& token : tokens) fn(ext[static_cast<std::size_t>(op)], token);
  for (const auto& [op, tokens] : report.directory_ops) {
    const FeatureClass cls =
        op == DirOp::Enumerate ? FeatureClass::DirEnumerate : FeatureClass::DirCreate;
    for (const auto& token : tokens) fn(cls, token);
  }
  for (const auto& token : report.dropped_file_types) fn(FeatureClass::Drop, token);
  for (const auto& token : report.strings) fn(FeatureClass::Str, token);
}

}  // namespace

FeatureVocabulary fit_vocabulary(const std::vector<BehavioralReport>& corpus) {
  if (corpus.empty()) throw EmptyCorpus("cannot fit a vocabulary on an empty corpus");

  std::set<std::string> names;
  for (const auto& report : corpus)
    for_each_feature(report, [&](FeatureClass cls, const std::string& token) {
      names.insert(feature_name(cls, token));
    });

  std::vector<FeatureVocabulary::Entry> entries;
  entries.reserve(names.size());
  for (const auto& name : names) entries.push_back({name, class_of_feature_name(name)});
  return FeatureVocabulary(std::move(entries), corpus_fingerprint(corpus));
}

std::vector<ColumnId> project(const BehavioralReport& report, const FeatureVocabulary& vocab) {
  std::vector<ColumnId> present;
  for_each_feature(report, [&](FeatureClass cls, const std::string& token) {
    const ColumnId id = vocab.lookup(feature_name(cls, token));
    if (id >= 0) present.push_back(id);
  });
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  return present;
}

BinaryDataset transform(const std::vector<BehavioralReport>& corpus,
                        const FeatureVocabulary& vocab, bool require_labels) {
  BinaryDataset ds;
  ds.vocabulary_fingerprint = vocab.fingerprint();
  ds.column_count = vocab.size();
  ds.rows.reserve(corpus.size());
  for (const auto& report : corpus) {
    if (require_labels && !report.label)
      throw MissingLabel("sample \"" + report.sample_id + "\" has no label");
    SampleRow row;
    row.sample_id = report.sample_id;
    if (report.label) row.label = static_cast<int>(*report.label);
    row.family = report.family;
    row.present = project(report, vocab);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

}  // namespace tracecls
