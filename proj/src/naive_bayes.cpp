#include "tracecls/naive_bayes.hpp"

#include <cmath>

#include "tracecls/errors.hpp"
#include "tracecls/logistic.hpp"

namespace tracecls {

NbModel nb_train(const DesignMatrix& data, std::vector<ColumnId> selected, double alpha) {
  if (static_cast<std::size_t>(data.x.cols()) != selected.size())
    throw DimensionMismatch("selection does not match the design matrix");
  if (data.x.rows() == 0) throw EmptyDataset("cannot train on an empty dataset");
  if (alpha <= 0.0) throw InvalidConfig("alpha must be positive");
  data.require_both_classes();

  const Eigen::Index n = data.x.rows();
  const Eigen::Index d = data.x.cols();
  double class_count[2] = {0.0, 0.0};
  Eigen::MatrixXd present_count = Eigen::MatrixXd::Zero(2, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = data.y[i] > 0.5 ? 1 : 0;
    class_count[c] += 1.0;
    present_count.row(c) += data.x.row(i);
  }

  NbModel model;
  model.selected = std::move(selected);
  model.alpha = alpha;
  model.log_present.resize(2, d);
  model.log_absent.resize(2, d);
  for (int c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(class_count[c] / static_cast<double>(n));
    const double denom = class_count[c] + 2.0 * alpha;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double p1 = (present_count(c, j) + alpha) / denom;
      model.log_present(c, j) = std::log(p1);
      model.log_absent(c, j) = std::log(1.0 - p1);
    }
  }
  return model;
}

namespace {

// Joint log likelihood of one sparse row for both classes, accumulating
// a term for every selected feature whether present or absent.
void joint_log_likelihood(const NbModel& model, std::span<const ColumnId> present, double out[2]) {
  out[0] = model.log_prior[0];
  out[1] = model.log_prior[1];
  std::size_t b = 0;
  for (std::size_t a = 0; a < model.selected.size(); ++a) {
    while (b < present.size() && present[b] < model.selected[a]) ++b;
    const bool hit = b < present.size() && present[b] == model.selected[a];
    const Eigen::Index j = static_cast<Eigen::Index>(a);
    out[0] += hit ? model.log_present(0, j) : model.log_absent(0, j);
    out[1] += hit ? model.log_present(1, j) : model.log_absent(1, j);
  }
}

}  // namespace

double nb_predict(const NbModel& model, std::span<const ColumnId> present) {
  double jll[2];
  joint_log_likelihood(model, present, jll);
  return sigmoid(jll[1] - jll[0]);
}

Eigen::VectorXd nb_scores(const NbModel& model, const DesignMatrix& data) {
  if (static_cast<std::size_t>(data.x.cols()) != model.selected.size())
    throw DimensionMismatch("design matrix does not match the model");
  Eigen::VectorXd scores(data.x.rows());
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    double jll[2] = {model.log_prior[0], model.log_prior[1]};
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
      const bool hit = data.x(i, j) > 0.5;
      jll[0] += hit ? model.log_present(0, j) : model.log_absent(0, j);
      jll[1] += hit ? model.log_present(1, j) : model.log_absent(1, j);
    }
    scores[i] = sigmoid(jll[1] - jll[0]);
  }
  return scores;
}

}  // namespace tracecls
