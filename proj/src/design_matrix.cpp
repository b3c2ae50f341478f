#include "tracecls/design_matrix.hpp"

#include <algorithm>
#include <numeric>

#include "tracecls/errors.hpp"

namespace tracecls {

void DesignMatrix::require_both_classes() const {
  bool has0 = false;
  bool has1 = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) (y[i] > 0.5 ? has1 : has0) = true;
  if (!has0 || !has1) throw SingleClassData("training data must contain both classes");
}

namespace {

DesignMatrix restrict_rows(const BinaryDataset& dataset, std::span<const ColumnId> selected,
                           std::span<const std::size_t> row_indices) {
  for (std::size_t k = 1; k < selected.size(); ++k) {
    if (selected[k - 1] >= selected[k])
      throw DimensionMismatch("selected columns must be strictly ascending");
  }
  if (!selected.empty() &&
      (selected.front() < 0 || selected.back() >= dataset.column_count))
    throw DimensionMismatch("selected column id out of range");

  DesignMatrix dm;
  dm.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(row_indices.size()),
                               static_cast<Eigen::Index>(selected.size()));
  dm.y.resize(static_cast<Eigen::Index>(row_indices.size()));
  for (std::size_t r = 0; r < row_indices.size(); ++r) {
    const SampleRow& row = dataset.rows.at(row_indices[r]);
    if (!row.label) throw UnlabeledRow("sample \"" + row.sample_id + "\" has no label");
    dm.y[static_cast<Eigen::Index>(r)] = *row.label;
    // Walk the two sorted id lists together.
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < selected.size() && b < row.present.size()) {
      if (selected[a] == row.present[b]) {
        dm.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) = 1.0;
        ++a;
        ++b;
      } else if (selected[a] < row.present[b]) {
        ++a;
      } else {
        ++b;
      }
    }
  }
  return dm;
}

}  // namespace

DesignMatrix restrict_dataset(const BinaryDataset& dataset,
                              std::span<const ColumnId> selected) {
  std::vector<std::size_t> all(dataset.rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return restrict_rows(dataset, selected, all);
}

DesignMatrix restrict_dataset(const BinaryDataset& dataset,
                              std::span<const ColumnId> selected,
                              std::span<const std::size_t> row_indices) {
  return restrict_rows(dataset, selected, row_indices);
}

double sparse_dot(std::span<const ColumnId> selected, const Eigen::VectorXd& weights,
                  std::span<const ColumnId> present) {
  if (static_cast<std::size_t>(weights.size()) != selected.size())
    throw DimensionMismatch("weight vector does not match the selection");
  double sum = 0.0;
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < selected.size() && b < present.size()) {
    if (selected[a] == present[b]) {
      sum += weights[static_cast<Eigen::Index>(a)];
      ++a;
      ++b;
    } else if (selected[a] < present[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  return sum;
}

}  // namespace tracecls
