#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tracecls/design_matrix.hpp"

namespace tracecls {

// Numerically stable logistic function; never overflows for finite input.
double sigmoid(double t);

// L2-regularized logistic regression over binary features. The posterior for
// a sample is sigmoid(w . x + b); with x binary the dot product degenerates
// to a sum of weights at the present selected columns.
struct LogRegModel {
  std::vector<ColumnId> selected;  // ascending
  Eigen::VectorXd weights;         // aligned with `selected`
  double bias = 0.0;
  double lambda = 0.0;
  TrainingMeta meta{};
};

struct LogRegOptions {
  double lambda = 0.0;
  double learning_rate = 0.8;
  int max_iters = 4000;
  double tol = 1e-8;
  // Optional warm start, mainly so tests can verify that distinct
  // initializations reach the same minimum.
  std::optional<Eigen::VectorXd> init_weights;
  double init_bias = 0.0;
  // The separable single-class limit is occasionally useful in tests; real
  // training keeps the check on.
  bool allow_single_class = false;
};

// Mean cross-entropy of the labels under the model plus (lambda/2)|w|^2.
// Probabilities are clamped to [1e-12, 1 - 1e-12] so the cost stays finite
// on separable data. The bias is not penalized.
double logreg_cost(const Eigen::VectorXd& weights, double bias, const DesignMatrix& data,
                   double lambda);

// Analytic gradient of logreg_cost.
void logreg_gradient(const Eigen::VectorXd& weights, double bias, const DesignMatrix& data,
                     double lambda, Eigen::VectorXd& grad_weights, double& grad_bias);

// Full-batch gradient descent from w = 0, b = 0 (or the warm start). Stops
// at max_iters or when the cost change drops below tol. Deterministic.
// Throws SingleClassData / NonFiniteCost.
LogRegModel logreg_train(const DesignMatrix& data, std::vector<ColumnId> selected,
                         const LogRegOptions& options = {});

double logreg_predict(const LogRegModel& model, std::span<const ColumnId> present);

// Posterior for every row of a design matrix built over the same selection.
Eigen::VectorXd logreg_scores(const LogRegModel& model, const DesignMatrix& data);

// One stochastic-gradient step on a single labeled row (N = 1); returns the
// updated model and bumps meta.iters_run.
LogRegModel logreg_update_online(const LogRegModel& model, std::span<const ColumnId> present,
                                 int label, double learning_rate);

}  // namespace tracecls
