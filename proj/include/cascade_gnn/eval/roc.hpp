#pragma once

#include <span>
#include <vector>

namespace cascade_gnn::eval {

struct RocPoint {
  double fpr;
  double tpr;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

/// ROC by descending-threshold sweep with tied scores merged into one step, and the
/// trapezoid area under it (equal to P(s+ > s-) + P(s+ = s-)/2).
/// `positive[k]` marks the positive class. Throws InvalidInput unless both classes occur.
RocCurve roc_auc(std::span<const double> scores, const std::vector<bool>& positive);

/// Mean TPR (and its std) of several curves at evenly spaced FPR values.
struct MeanRoc {
  std::vector<double> fpr;
  std::vector<double> tpr_mean;
  std::vector<double> tpr_std;
};
MeanRoc average_roc(std::span<const RocCurve> curves, std::size_t grid_points = 101);

/// TPR at `fpr` by linear interpolation along the curve (upper envelope at vertical steps).
double interpolate_tpr(const RocCurve& curve, double fpr);

}  // namespace cascade_gnn::eval
