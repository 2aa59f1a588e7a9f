#include "depthprop/metrics.hpp"

#include <cmath>

namespace depthprop {

double masked_l2(const DepthGrid& pred, const DepthGrid& gt) {
  require_same_shape(pred.shape(), gt.shape(), "masked_l2");
  const auto p = pred.values();
  const auto g = gt.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 0.0f) {
      const double e = static_cast<double>(p[i]) - g[i];
      sum += e * e;
    }
  }
  return sum;
}

MetricReport evaluate(const DepthGrid& pred, const DepthGrid& gt) {
  require_same_shape(pred.shape(), gt.shape(), "evaluate");
  const auto p = pred.values();
  const auto g = gt.values();
  const int w = gt.width();

  double sq = 0.0, abs = 0.0, isq = 0.0, iabs = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0.0f)) continue;
    if (!(p[i] > 0.0f)) {
      throw ValueError("prediction is " + std::to_string(p[i]) + " at gt-valid pixel (v=" +
                       std::to_string(i / w) + ", u=" + std::to_string(i % w) +
                       "); inverse depth is undefined");
    }
    const double e = (static_cast<double>(p[i]) - g[i]) * 1000.0;
    const double ie = 1000.0 / p[i] - 1000.0 / g[i];
    sq += e * e;
    abs += std::abs(e);
    isq += ie * ie;
    iabs += std::abs(ie);
    ++count;
  }
  MetricReport report;
  report.valid_count = count;
  if (count == 0) return report;
  const auto n = static_cast<double>(count);
  report.rmse_mm = std::sqrt(sq / n);
  report.mae_mm = abs / n;
  report.irmse_per_km = std::sqrt(isq / n);
  report.imae_per_km = iabs / n;
  return report;
}

}  // namespace depthprop
