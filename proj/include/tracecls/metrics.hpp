#pragma once

#include <span>
#include <vector>

namespace tracecls {

struct RocPoint {
  double false_alarm = 0.0;
  double detection = 0.0;
};

// Threshold-ordered ROC polyline from (0,0) to (1,1), one vertex per
// distinct score, with the trapezoidal area under it.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

RocCurve roc_and_auc(std::span<const double> scores, std::span<const int> labels);

struct Rates {
  double test_error = 0.0;
  double fp_rate = 0.0;
  double detection_rate = 0.0;
};

Rates rates(std::span<const int> predictions, std::span<const int> labels);

}  // namespace tracecls
