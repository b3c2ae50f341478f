#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "tracecls/design_matrix.hpp"
#include "tracecls/vocabulary.hpp"

namespace tracecls {

// Linear soft-margin SVM trained by primal subgradient descent.
struct SvmModel {
  std::vector<ColumnId> selected;
  Eigen::VectorXd weights;
  double bias = 0.0;
  double cost_c = 1.0;
  TrainingMeta meta;
};

struct SvmOptions {
  double cost_c = 1.0;
  int epochs = 50;
  std::uint64_t seed = 0;
};

SvmModel svm_train(const DesignMatrix& data, std::vector<ColumnId> selected,
                   const SvmOptions& options = {});

// Raw margin w.x + b for a full-width sparse row.  ROC sweeps these
// directly; the hard decision is sign(score).
double svm_score(const SvmModel& model, std::span<const ColumnId> present);

Eigen::VectorXd svm_scores(const SvmModel& model, const DesignMatrix& data);

// (1/2)||w||^2 + C * sum_i max(0, 1 - y_i (w.x_i + b)) with labels in {-1,+1}.
double svm_objective(const SvmModel& model, const DesignMatrix& data);

}  // namespace tracecls
