#pragma once

#include "depthprop/core.hpp"

namespace depthprop {

/// Pinhole intrinsics in pixels. Pixel centers sit at integer (u, v), 0-based.
class CameraIntrinsics {
 public:
  /// Throws ValueError unless fx, fy are finite and > 0 and u0, v0 are finite.
  CameraIntrinsics(double fx, double fy, double u0, double v0);

  [[nodiscard]] double fx() const { return fx_; }
  [[nodiscard]] double fy() const { return fy_; }
  [[nodiscard]] double u0() const { return u0_; }
  [[nodiscard]] double v0() const { return v0_; }

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;

 private:
  double fx_;
  double fy_;
  double u0_;
  double v0_;
};

/// Per-pixel camera-frame coordinates in meters. Invalid pixels hold (0, 0, 0).
struct PositionMap {
  ScalarPlane x;
  ScalarPlane y;
  ScalarPlane z;
};

/// Z = D, X = (u - u0) Z / fx, Y = (v - v0) Z / fy.
PositionMap back_project(const DepthGrid& depth, const CameraIntrinsics& intrinsics);

/**
 * Downsample by `factor`, keeping the nearest valid depth in each
 * factor x factor window. Zeros are ignored; a window with no valid
 * depth yields 0. Throws ShapeError if factor does not divide the
 * height or width.
 */
DepthGrid min_pool(const DepthGrid& depth, int factor);

/// Intrinsics for a grid downsampled by `factor`.
CameraIntrinsics scale_intrinsics(const CameraIntrinsics& intrinsics, int factor);

}  // namespace depthprop
