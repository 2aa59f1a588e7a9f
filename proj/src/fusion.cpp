#include "depthprop/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace depthprop {

namespace {

// Weight of the first logit in a two-way softmax.
inline double first_weight(double a, double b) {
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  return ea / (ea + eb);
}

}  // namespace

std::pair<ScalarPlane, ScalarPlane> fusion_weights(const ScalarPlane& conf_cd,
                                                   const ScalarPlane& conf_dd) {
  require_same_shape(conf_cd.shape(), conf_dd.shape(), "fusion_weights");
  const auto a = conf_cd.values();
  const auto b = conf_dd.values();
  std::vector<float> wa(a.size()), wb(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = first_weight(a[i], b[i]);
    wa[i] = static_cast<float>(w);
    wb[i] = static_cast<float>(1.0 - w);
  }
  return {ScalarPlane(conf_cd.shape(), std::move(wa)), ScalarPlane(conf_cd.shape(), std::move(wb))};
}

DepthGrid fuse(const DepthGrid& depth_cd, const DepthGrid& depth_dd, const ScalarPlane& conf_cd,
               const ScalarPlane& conf_dd) {
  require_same_shape(depth_cd.shape(), depth_dd.shape(), "fuse (depth_cd vs depth_dd)");
  require_same_shape(depth_cd.shape(), conf_cd.shape(), "fuse (depth_cd vs conf_cd)");
  require_same_shape(depth_cd.shape(), conf_dd.shape(), "fuse (depth_cd vs conf_dd)");
  const auto dcd = depth_cd.values();
  const auto ddd = depth_dd.values();
  const auto ccd = conf_cd.values();
  const auto cdd = conf_dd.values();
  std::vector<float> out(dcd.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    // Written symmetrically so swapping the two inputs is bit-identical.
    const double m = std::max<double>(ccd[i], cdd[i]);
    const double ea = std::exp(ccd[i] - m);
    const double eb = std::exp(cdd[i] - m);
    const double fused = (ea * dcd[i] + eb * ddd[i]) / (ea + eb);
    // Clamp against rounding so the result stays inside the input interval.
    const double lo = std::min(dcd[i], ddd[i]);
    const double hi = std::max(dcd[i], ddd[i]);
    out[i] = static_cast<float>(std::clamp(fused, lo, hi));
  }
  return DepthGrid(depth_cd.shape(), std::move(out));
}

}  // namespace depthprop
