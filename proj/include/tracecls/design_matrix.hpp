#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "tracecls/dataset.hpp"

namespace tracecls {

// Dense 0/1 view of a dataset restricted to the selected columns. Selection
// keeps matrices small enough (N x k) that batch linear algebra is the
// natural representation; the full-width dataset stays sparse.
struct DesignMatrix {
  Eigen::MatrixXd x;  // N x D'
  Eigen::VectorXd y;  // labels in {0, 1}

  Eigen::Index samples() const { return x.rows(); }
  Eigen::Index features() const { return x.cols(); }

  // Throws SingleClassData unless both labels occur.
  void require_both_classes() const;
};

// `selected` must be strictly ascending. Rows must be labeled.
DesignMatrix restrict_dataset(const BinaryDataset& dataset,
                              std::span<const ColumnId> selected);
DesignMatrix restrict_dataset(const BinaryDataset& dataset,
                              std::span<const ColumnId> selected,
                              std::span<const std::size_t> row_indices);

// Sum of weights at selected columns that the row exhibits; the binary dot
// product behind every model's score.
double sparse_dot(std::span<const ColumnId> selected, const Eigen::VectorXd& weights,
                  std::span<const ColumnId> present);

struct TrainingMeta {
  double learning_rate = 0.0;
  int max_iters = 0;
  double final_cost = 0.0;
  int iters_run = 0;
  bool converged = false;
};

}  // namespace tracecls
