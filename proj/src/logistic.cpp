#include "tracecls/logistic.hpp"

#include <cmath>

#include "tracecls/errors.hpp"

namespace tracecls {

namespace {

constexpr double kProbClamp = 1e-12;

Eigen::VectorXd posterior(const Eigen::VectorXd& weights, double bias,
                          const DesignMatrix& data) {
  Eigen::VectorXd z = data.x * weights;
  z.array() += bias;
  return z.unaryExpr([](double t) { return sigmoid(t); });
}

double cross_entropy(const Eigen::VectorXd& p, const Eigen::VectorXd& y) {
  const Eigen::ArrayXd clamped = p.array().max(kProbClamp).min(1.0 - kProbClamp);
  return -(y.array() * clamped.log() + (1.0 - y.array()) * (1.0 - clamped).log()).mean();
}

}  // namespace

double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double logreg_cost(const Eigen::VectorXd& weights, double bias, const DesignMatrix& data,
                   double lambda) {
  if (weights.size() != data.x.cols())
    throw DimensionMismatch("weight vector does not match the design matrix");
  if (data.x.rows() == 0) throw EmptyDataset("cannot evaluate the cost of an empty dataset");
  return cross_entropy(posterior(weights, bias, data), data.y) +
         0.5 * lambda * weights.squaredNorm();
}

void logreg_gradient(const Eigen::VectorXd& weights, double bias, const DesignMatrix& data,
                     double lambda, Eigen::VectorXd& grad_weights, double& grad_bias) {
  if (weights.size() != data.x.cols())
    throw DimensionMismatch("weight vector does not match the design matrix");
  const Eigen::VectorXd residual = posterior(weights, bias, data) - data.y;
  const double inv_n = 1.0 / static_cast<double>(data.x.rows());
  grad_weights = inv_n * (data.x.transpose() * residual) + lambda * weights;
  grad_bias = residual.mean();
}

LogRegModel logreg_train(const DesignMatrix& data, std::vector<ColumnId> selected,
                         const LogRegOptions& options) {
  if (static_cast<std::size_t>(data.x.cols()) != selected.size())
    throw DimensionMismatch("selection does not match the design matrix");
  if (data.x.rows() == 0) throw EmptyDataset("cannot train on an empty dataset");
  if (options.lambda < 0.0) throw InvalidConfig("lambda must be non-negative");
  if (!options.allow_single_class) data.require_both_classes();

  LogRegModel model;
  model.selected = std::move(selected);
  model.lambda = options.lambda;
  model.meta.learning_rate = options.learning_rate;
  model.meta.max_iters = options.max_iters;
  if (options.init_weights) {
    if (options.init_weights->size() != data.x.cols())
      throw DimensionMismatch("init_weights does not match the design matrix");
    model.weights = *options.init_weights;
  } else {
    model.weights = Eigen::VectorXd::Zero(data.x.cols());
  }
  model.bias = options.init_bias;

  const double inv_n = 1.0 / static_cast<double>(data.x.rows());
  double prev_cost = 0.0;
  double cost = 0.0;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    Eigen::VectorXd p = posterior(model.weights, model.bias, data);
    cost = cross_entropy(p, data.y) + 0.5 * model.lambda * model.weights.squaredNorm();
    if (!std::isfinite(cost))
      throw NonFiniteCost("cost diverged; consider a smaller learning rate");
    if (iter > 0 && std::abs(cost - prev_cost) < options.tol) {
      model.meta.converged = true;
      break;
    }
    prev_cost = cost;

    p -= data.y;  // residual
    const Eigen::VectorXd grad_w =
        inv_n * (data.x.transpose() * p) + model.lambda * model.weights;
    model.weights -= options.learning_rate * grad_w;
    model.bias -= options.learning_rate * p.mean();
    model.meta.iters_run = iter + 1;
  }
  model.meta.final_cost =
      model.meta.converged ? cost : logreg_cost(model.weights, model.bias, data, model.lambda);
  if (!std::isfinite(model.meta.final_cost))
    throw NonFiniteCost("cost diverged; consider a smaller learning rate");
  return model;
}

double logreg_predict(const LogRegModel& model, std::span<const ColumnId> present) {
  return sigmoid(sparse_dot(model.selected, model.weights, present) + model.bias);
}

Eigen::VectorXd logreg_scores(const LogRegModel& model, const DesignMatrix& data) {
  if (data.x.cols() != model.weights.size())
    throw DimensionMismatch("design matrix does not match the model");
  return posterior(model.weights, model.bias, data);
}

LogRegModel logreg_update_online(const LogRegModel& model, std::span<const ColumnId> present,
                                 int label, double learning_rate) {
  LogRegModel next = model;
  const double residual = logreg_predict(model, present) - static_cast<double>(label);

  // Gradient of the single-sample cost; the L2 term touches every weight.
  next.weights -= learning_rate * model.lambda * model.weights;
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < model.selected.size() && b < present.size()) {
    if (model.selected[a] == present[b]) {
      next.weights[static_cast<Eigen::Index>(a)] -= learning_rate * residual;
      ++a;
      ++b;
    } else if (model.selected[a] < present[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  next.bias -= learning_rate * residual;
  next.meta.iters_run = model.meta.iters_run + 1;
  return next;
}

}  // namespace tracecls
