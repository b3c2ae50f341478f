#pragma once

#include <vector>

#include "tracecls/dataset.hpp"
#include "tracecls/report.hpp"
#include "tracecls/vocabulary.hpp"

namespace tracecls {

// One feature per distinct (class, token) pair observed anywhere in the
// corpus, ordered lexicographically by namespaced name. Throws EmptyCorpus.
FeatureVocabulary fit_vocabulary(const std::vector<BehavioralReport>& corpus);

// Presence matrix against a frozen vocabulary; tokens unseen at fit time
// contribute nothing. Row order matches the input order. With
// require_labels (the default) a report without a label raises MissingLabel.
BinaryDataset transform(const std::vector<BehavioralReport>& corpus,
                        const FeatureVocabulary& vocab, bool require_labels = true);

// Sorted present-column ids of a single report under `vocab`. This is the
// projection used when scoring new samples against a trained model.
std::vector<ColumnId> project(const BehavioralReport& report,
                              const FeatureVocabulary& vocab);

}  // namespace tracecls
