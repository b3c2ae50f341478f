#include "tracecls/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "tracecls/errors.hpp"

namespace tracecls {

RocCurve roc_and_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw DimensionMismatch("scores and labels differ in length");
  double n_pos = 0.0;
  double n_neg = 0.0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1.0;
  if (n_pos == 0.0 || n_neg == 0.0)
    throw SingleClassLabels("roc needs both classes in the labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  double prev_fa = 0.0;
  double prev_det = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    // One vertex per distinct score; equal-scored samples move together,
    // which makes tied positive/negative pairs count half via the trapezoid.
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? tp : fp) += 1.0;
      ++i;
    }
    const double fa = fp / n_neg;
    const double det = tp / n_pos;
    curve.auc += (fa - prev_fa) * (det + prev_det) / 2.0;
    curve.points.push_back({fa, det});
    prev_fa = fa;
    prev_det = det;
  }
  return curve;
}

Rates rates(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw DimensionMismatch("predictions and labels differ in length");
  if (labels.empty()) throw SingleClassLabels("rates need a non-empty labeled set");
  double tp = 0.0, fp = 0.0, tn = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      (predictions[i] == 1 ? tp : fn) += 1.0;
    } else {
      (predictions[i] == 1 ? fp : tn) += 1.0;
    }
  }
  if (tp + fn == 0.0 || fp + tn == 0.0)
    throw SingleClassLabels("class-conditional rates need both classes");
  Rates r;
  r.test_error = (fp + fn) / static_cast<double>(labels.size());
  r.fp_rate = fp / (fp + tn);
  r.detection_rate = tp / (tp + fn);
  return r;
}

}  // namespace tracecls
