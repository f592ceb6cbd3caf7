#include "cascade_gnn/eval/roc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascade_gnn/common.hpp"

namespace cascade_gnn::eval {

RocCurve roc_auc(std::span<const double> scores, const std::vector<bool>& positive) {
  if (scores.size() != positive.size()) throw InvalidInput("roc_auc: scores and labels differ in length");
  std::size_t pos = 0;
  for (bool p : positive) pos += p ? 1 : 0;
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw InvalidInput("roc_auc: need at least one positive and one negative");
  for (double s : scores)
    if (std::isnan(s)) throw InvalidInput("roc_auc: NaN score");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  // Integer trapezoid sum: twice the area in units of (1/pos)(1/neg).
  double twice_area = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t dtp = 0, dfp = 0;
    const double s = scores[order[k]];
    for (; k < order.size() && scores[order[k]] == s; ++k) (positive[order[k]] ? dtp : dfp)++;
    twice_area += static_cast<double>(dfp) * static_cast<double>(2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
  }
  curve.auc = twice_area / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return curve;
}

double interpolate_tpr(const RocCurve& curve, double fpr) {
  const auto& p = curve.points;
  double best = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k].fpr == fpr) best = std::max(best, p[k].tpr);
    if (k + 1 < p.size() && p[k].fpr < fpr && fpr < p[k + 1].fpr) {
      const double w = (fpr - p[k].fpr) / (p[k + 1].fpr - p[k].fpr);
      best = std::max(best, p[k].tpr + w * (p[k + 1].tpr - p[k].tpr));
    }
  }
  return best;
}

MeanRoc average_roc(std::span<const RocCurve> curves, std::size_t grid_points) {
  MeanRoc out;
  if (curves.empty() || grid_points < 2) return out;
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& c : curves) {
      const double y = interpolate_tpr(c, x);
      sum += y;
      sum2 += y * y;
    }
    const double n = static_cast<double>(curves.size());
    const double mean = sum / n;
    out.fpr.push_back(x);
    out.tpr_mean.push_back(mean);
    out.tpr_std.push_back(std::sqrt(std::max(0.0, sum2 / n - mean * mean)));
  }
  return out;
}

}  // namespace cascade_gnn::eval
