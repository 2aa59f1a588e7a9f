#pragma once

#include <array>
#include <vector>

#include "depthprop/core.hpp"

namespace depthprop {

/// Tolerance used when checking that neighbor weights sum to at most one.
inline constexpr double kNormalizationTolerance = 1e-6;

/// Displacement from a pixel to one of its neighbors, before dilation scaling.
struct NeighborOffset {
  int dy = 0;
  int dx = 0;

  friend bool operator==(const NeighborOffset&, const NeighborOffset&) = default;
};

/// Non-self offsets of a k x k kernel in ascending (dy, dx) order.
/// Throws ValueError unless kernel_size is odd and >= 3.
std::vector<NeighborOffset> neighbor_offsets(int kernel_size);

/**
 * One weight plane per non-self neighbor of a k x k kernel.
 *
 * Plane j at pixel i holds the weight pixel i gives to the neighbor at
 * i + rate * offset(j). Planes are stored in the order returned by
 * neighbor_offsets(). The self weight is implicit: one minus the sum of
 * the neighbor weights at that pixel.
 */
class AffinityField {
 public:
  AffinityField(int kernel_size, std::vector<ScalarPlane> planes);

  [[nodiscard]] int kernel_size() const { return kernel_size_; }
  [[nodiscard]] const Shape& shape() const { return planes_.front().shape(); }
  [[nodiscard]] const std::vector<NeighborOffset>& offsets() const { return offsets_; }
  [[nodiscard]] const std::vector<ScalarPlane>& planes() const { return planes_; }
  [[nodiscard]] const ScalarPlane& plane(std::size_t index) const { return planes_[index]; }
  /// Throws ValueError for (0, 0) or offsets outside the kernel.
  [[nodiscard]] const ScalarPlane& plane(NeighborOffset offset) const;

  friend bool operator==(const AffinityField&, const AffinityField&) = default;

 private:
  int kernel_size_;
  std::vector<NeighborOffset> offsets_;
  std::vector<ScalarPlane> planes_;
};

/// Field with every neighbor weight zero (self weight one).
AffinityField zero_affinity(Shape shape, int kernel_size);

/// True when all weights are >= 0 and each pixel's neighbor sum is <= 1 + tolerance.
bool is_normalized(const AffinityField& field, double tolerance = kNormalizationTolerance);

/**
 * Stability normalization: w_j <- |w_j| / max(1, sum_j |w_j|) per pixel.
 *
 * Fields whose absolute sum is already within kNormalizationTolerance of
 * one pass through untouched, which makes the operation idempotent.
 */
AffinityField normalize(const AffinityField& raw);

/// Self weight 1 - sum_j w_j at each pixel, clamped at 0. No border folding.
ScalarPlane self_weight(const AffinityField& field);

/// Three color channels of one image, typically in [0, 1].
using RgbImage = std::array<ScalarPlane, 3>;

/**
 * Edge-aware affinity from a color image: the raw weight toward neighbor
 * j is exp(-|c_i - c_j|^2 / (2 sigma^2)), zero for out-of-bounds
 * neighbors, followed by normalize().
 */
AffinityField guided_affinity(const RgbImage& image, int kernel_size, double sigma);

}  // namespace depthprop
