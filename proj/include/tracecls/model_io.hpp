#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "tracecls/dataset.hpp"
#include "tracecls/logistic.hpp"
#include "tracecls/naive_bayes.hpp"
#include "tracecls/svm.hpp"

namespace tracecls {

enum class ClassifierKind { LogReg, Nb, Svm };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

// A trained classifier bound to the vocabulary it was fit against.  Scoring
// anything with a different vocabulary fingerprint is refused.
struct TrainedModel {
  ClassifierKind kind = ClassifierKind::LogReg;
  std::string vocabulary_fingerprint;
  std::variant<LogRegModel, NbModel, SvmModel> model;

  const std::vector<ColumnId>& selected() const;
};

// Posterior for logreg/nb, raw margin for svm.
double model_score(const TrainedModel& model, std::span<const ColumnId> present);

// Hard 0/1 decision: threshold 0.5 on posteriors, 0 on margins.
int model_decide(const TrainedModel& model, double score);

Eigen::VectorXd model_scores(const TrainedModel& model, const BinaryDataset& dataset);

nlohmann::ordered_json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace tracecls
