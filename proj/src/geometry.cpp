#include "depthprop/geometry.hpp"

#include <cmath>
#include <limits>

namespace depthprop {

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double u0, double v0)
    : fx_(fx), fy_(fy), u0_(u0), v0_(v0) {
  if (!std::isfinite(fx) || !(fx > 0.0) || !std::isfinite(fy) || !(fy > 0.0)) {
    throw ValueError("focal lengths must be finite and positive, got fx=" + std::to_string(fx) +
                     " fy=" + std::to_string(fy));
  }
  if (!std::isfinite(u0) || !std::isfinite(v0)) {
    throw ValueError("principal point must be finite");
  }
}

PositionMap back_project(const DepthGrid& depth, const CameraIntrinsics& k) {
  const Shape shape = depth.shape();
  std::vector<float> xs(shape.size()), ys(shape.size()), zs(shape.size());
  for (int v = 0; v < shape.height; ++v) {
    const auto row = depth.row(v);
    const double dv = (v - k.v0()) / k.fy();
    for (int u = 0; u < shape.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * shape.width + u;
      const double z = row[u];
      if (z > 0.0) {
        xs[i] = static_cast<float>((u - k.u0()) * z / k.fx());
        ys[i] = static_cast<float>(dv * z);
      }
      zs[i] = row[u];
    }
  }
  return PositionMap{ScalarPlane(shape, std::move(xs)), ScalarPlane(shape, std::move(ys)),
                     ScalarPlane(shape, std::move(zs))};
}

DepthGrid min_pool(const DepthGrid& depth, int factor) {
  if (factor < 1) {
    throw ValueError("pooling factor must be >= 1, got " + std::to_string(factor));
  }
  const Shape in = depth.shape();
  if (in.height % factor != 0) {
    throw ShapeError("min_pool: height " + std::to_string(in.height) +
                     " is not divisible by factor " + std::to_string(factor));
  }
  if (in.width % factor != 0) {
    throw ShapeError("min_pool: width " + std::to_string(in.width) +
                     " is not divisible by factor " + std::to_string(factor));
  }
  if (factor == 1) return depth;

  const Shape out{in.height / factor, in.width / factor};
  constexpr float kNone = std::numeric_limits<float>::infinity();
  std::vector<float> pooled(out.size(), kNone);
  for (int v = 0; v < in.height; ++v) {
    const auto row = depth.row(v);
    float* dst = pooled.data() + static_cast<std::size_t>(v / factor) * out.width;
    for (int u = 0; u < in.width; ++u) {
      const float d = row[u];
      if (d > 0.0f && d < dst[u / factor]) dst[u / factor] = d;
    }
  }
  for (float& d : pooled) {
    if (d == kNone) d = 0.0f;
  }
  return DepthGrid(out, std::move(pooled));
}

CameraIntrinsics scale_intrinsics(const CameraIntrinsics& k, int factor) {
  if (factor < 1) {
    throw ValueError("scale factor must be >= 1, got " + std::to_string(factor));
  }
  const double f = factor;
  return CameraIntrinsics(k.fx() / f, k.fy() / f, k.u0() / f, k.v0() / f);
}

}  // namespace depthprop
