#pragma once

#include <cstddef>

#include "depthprop/core.hpp"

namespace depthprop {

/// KITTI depth-completion error statistics over ground-truth-valid pixels.
struct MetricReport {
  double rmse_mm = 0.0;
  double mae_mm = 0.0;
  double irmse_per_km = 0.0;
  double imae_per_km = 0.0;
  std::size_t valid_count = 0;
};

/// Sum of squared errors (m^2) over pixels where gt > 0. Zero if there are none.
double masked_l2(const DepthGrid& pred, const DepthGrid& gt);

/**
 * Errors in millimeters and inverse depth in 1/km (1000 / depth_m),
 * evaluated only where gt > 0. Throws ValueError naming the first
 * gt-valid pixel whose prediction is not positive. An all-invalid gt
 * yields a zero report.
 */
MetricReport evaluate(const DepthGrid& pred, const DepthGrid& gt);

}  // namespace depthprop
