#include "tracecls/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tracecls/errors.hpp"
#include "tracecls/rng.hpp"

namespace tracecls {

SvmModel svm_train(const DesignMatrix& data, std::vector<ColumnId> selected,
                   const SvmOptions& options) {
  if (static_cast<std::size_t>(data.x.cols()) != selected.size())
    throw DimensionMismatch("selection does not match the design matrix");
  if (data.x.rows() == 0) throw EmptyDataset("cannot train on an empty dataset");
  if (options.cost_c <= 0.0) throw InvalidConfig("cost parameter C must be positive");
  if (options.epochs < 1) throw InvalidConfig("epochs must be at least 1");
  data.require_both_classes();

  const Eigen::Index n = data.x.rows();
  Eigen::VectorXd signs(n);
  for (Eigen::Index i = 0; i < n; ++i) signs[i] = data.y[i] > 0.5 ? 1.0 : -1.0;

  // One fixed visiting order, reused every epoch, so training is a pure
  // function of (data, selection, options).
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);
  rng.shuffle(order);

  SvmModel model;
  model.selected = std::move(selected);
  model.weights = Eigen::VectorXd::Zero(data.x.cols());
  model.cost_c = options.cost_c;
  model.meta.max_iters = options.epochs;

  const double decay = std::max(1.0 / options.cost_c, 1e-6);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t idx : order) {
      ++t;
      const double step = 1.0 / (static_cast<double>(t) * decay + 1.0);
      const Eigen::Index i = static_cast<Eigen::Index>(idx);
      const double margin = signs[i] * (data.x.row(i).dot(model.weights) + model.bias);
      model.weights -= (step * inv_n) * model.weights;
      if (margin < 1.0) {
        model.weights += (step * options.cost_c * signs[i]) * data.x.row(i).transpose();
        model.bias += step * options.cost_c * signs[i];
      }
    }
    model.meta.iters_run = epoch + 1;
  }
  model.meta.learning_rate = 1.0 / (decay + 1.0);  // first-step size, for the record
  model.meta.final_cost = svm_objective(model, data);
  model.meta.converged = true;
  if (!std::isfinite(model.meta.final_cost) || !model.weights.allFinite() ||
      !std::isfinite(model.bias))
    throw NonFiniteCost("svm training produced non-finite parameters");
  return model;
}

double svm_score(const SvmModel& model, std::span<const ColumnId> present) {
  return sparse_dot(model.selected, model.weights, present) + model.bias;
}

Eigen::VectorXd svm_scores(const SvmModel& model, const DesignMatrix& data) {
  if (data.x.cols() != model.weights.size())
    throw DimensionMismatch("design matrix does not match the model");
  Eigen::VectorXd s = data.x * model.weights;
  s.array() += model.bias;
  return s;
}

double svm_objective(const SvmModel& model, const DesignMatrix& data) {
  const Eigen::VectorXd s = svm_scores(model, data);
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double sign = data.y[i] > 0.5 ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - sign * s[i]);
  }
  return 0.5 * model.weights.squaredNorm() + model.cost_c * hinge;
}

}  // namespace tracecls
