#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracecls/dataset.hpp"
#include "tracecls/metrics.hpp"
#include "tracecls/model_io.hpp"

namespace tracecls {

struct SplitSpec {
  std::uint64_t seed = 0;
  int repetitions = 100;
  double train_fraction = 0.8;
  bool stratified = true;
};

// Everything a repetition needs to train one classifier.  The swept value
// in cross_validate overrides the kind's own hyperparameter (lambda for
// logreg, C for svm, alpha for nb).
struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::LogReg;
  double lambda = 2e-3;
  double learning_rate = 0.8;
  int max_iters = 4000;
  double tol = 1e-8;
  double alpha = 1.0;
  double cost_c = 1.0;
  int epochs = 50;
};

struct RepRecord {
  double auc = 0.0;
  double test_error = 0.0;
  double fp_rate = 0.0;
  double detection_rate = 0.0;
  std::vector<ColumnId> selected;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

struct EvalSummary {
  MetricSummary auc;
  MetricSummary test_error;
  MetricSummary fp_rate;
  MetricSummary detection_rate;
};

struct EvalReport {
  ClassifierConfig config;
  SplitSpec split;
  int k_features = 0;
  bool select_on_full = false;
  std::vector<RepRecord> reps;
  EvalSummary summary;
  // Test scores of every repetition pooled into one curve, for plotting.
  RocCurve pooled_roc;
};

struct EvalOptions {
  // Rank features on the full dataset once instead of per-split training
  // portions.  Deliberately leaks test rows into selection; off by default.
  bool select_on_full = false;
  int jobs = 1;
  // Scrambles the labels of each repetition's test portion after the split.
  // Selection must not notice; exists so the leakage guard is testable.
  bool permute_test_labels = false;
};

EvalSummary summarize(std::span<const RepRecord> reps);

EvalReport repeated_split_eval(const BinaryDataset& dataset, const ClassifierConfig& config,
                               const SplitSpec& split, int k_features,
                               const EvalOptions& options = {});

nlohmann::ordered_json eval_report_to_json(const EvalReport& report);
std::string eval_report_csv(const EvalReport& report);
std::string roc_csv(const RocCurve& curve);

struct CvResult {
  std::vector<double> grid;      // as evaluated, ascending
  std::vector<double> mean_auc;  // parallel to grid
  double best = 0.0;
};

CvResult cross_validate(const BinaryDataset& dataset, const ClassifierConfig& base,
                        std::span<const double> grid, int folds, std::uint64_t seed,
                        int k_features, const EvalOptions& options = {});

std::string cv_csv(const CvResult& result);

struct LooResult {
  std::string family;
  int n_samples = 0;
  double detection_rate = 0.0;
  std::vector<ColumnId> selected;
};

struct LooTable {
  std::vector<LooResult> rows;  // family name ascending
  int total_samples = 0;
  double weighted_avg = 0.0;
};

LooResult leave_one_family_out(const BinaryDataset& dataset, const std::string& family, int k,
                               double lambda = 2e-3);

LooTable loo_table(const BinaryDataset& dataset, int k, double lambda = 2e-3, int jobs = 1);

std::string loo_csv(const LooTable& table);

// Verdicts are 1 (malware) / 0 (clean); a sample is malware iff strictly
// more than half of its verdicts say so.  Samples with no verdicts are
// dropped from the output.
std::map<std::string, int> majority_vote(const std::map<std::string, std::vector<int>>& verdicts);

// CSV `sample_id,vendor,verdict` with verdict in {malware, clean}.
std::map<std::string, std::vector<int>> parse_verdicts_csv(std::istream& in);

std::string votes_csv(const std::map<std::string, int>& votes);

}  // namespace tracecls
