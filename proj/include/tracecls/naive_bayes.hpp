#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "tracecls/design_matrix.hpp"
#include "tracecls/vocabulary.hpp"

namespace tracecls {

// Bernoulli naive Bayes over binary presence features.  The per-class
// conditionals are Laplace-smoothed, everything downstream works in log
// space so long selections do not underflow.
struct NbModel {
  std::vector<ColumnId> selected;
  double alpha = 1.0;
  // Index 0 is goodware, index 1 is ransomware.
  double log_prior[2] = {0.0, 0.0};
  // One column per selected feature.
  Eigen::MatrixXd log_present;  // 2 x D', log p(x_j = 1 | class)
  Eigen::MatrixXd log_absent;   // 2 x D', log p(x_j = 0 | class)
};

NbModel nb_train(const DesignMatrix& data, std::vector<ColumnId> selected, double alpha = 1.0);

// Posterior probability of ransomware for a full-width sparse row.
double nb_predict(const NbModel& model, std::span<const ColumnId> present);

// Posterior per row of a design matrix restricted to model.selected.
Eigen::VectorXd nb_scores(const NbModel& model, const DesignMatrix& data);

}  // namespace tracecls
