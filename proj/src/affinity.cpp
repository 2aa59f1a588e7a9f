#include "depthprop/affinity.hpp"

#include <algorithm>
#include <cmath>

namespace depthprop {

namespace {

void check_kernel_size(int kernel_size) {
  if (kernel_size < 3 || kernel_size % 2 == 0) {
    throw ValueError("kernel size must be odd and >= 3, got " + std::to_string(kernel_size));
  }
}

}  // namespace

std::vector<NeighborOffset> neighbor_offsets(int kernel_size) {
  check_kernel_size(kernel_size);
  const int r = (kernel_size - 1) / 2;
  std::vector<NeighborOffset> offsets;
  offsets.reserve(static_cast<std::size_t>(kernel_size) * kernel_size - 1);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dy != 0 || dx != 0) offsets.push_back({dy, dx});
    }
  }
  return offsets;
}

AffinityField::AffinityField(int kernel_size, std::vector<ScalarPlane> planes)
    : kernel_size_(kernel_size), offsets_(neighbor_offsets(kernel_size)), planes_(std::move(planes)) {
  if (planes_.size() != offsets_.size()) {
    throw ShapeError("kernel size " + std::to_string(kernel_size) + " needs " +
                     std::to_string(offsets_.size()) + " neighbor planes, got " +
                     std::to_string(planes_.size()));
  }
  for (const auto& p : planes_) {
    require_same_shape(planes_.front().shape(), p.shape(), "affinity planes");
  }
}

const ScalarPlane& AffinityField::plane(NeighborOffset offset) const {
  const int r = (kernel_size_ - 1) / 2;
  if (offset == NeighborOffset{} || std::abs(offset.dy) > r || std::abs(offset.dx) > r) {
    throw ValueError("offset (" + std::to_string(offset.dy) + ", " + std::to_string(offset.dx) +
                     ") is not a neighbor of a " + std::to_string(kernel_size_) + "x" +
                     std::to_string(kernel_size_) + " kernel");
  }
  auto index = static_cast<std::size_t>((offset.dy + r) * kernel_size_ + (offset.dx + r));
  // Self slot is omitted from storage.
  if (index > offsets_.size() / 2) --index;
  return planes_[index];
}

AffinityField zero_affinity(Shape shape, int kernel_size) {
  std::vector<ScalarPlane> planes(neighbor_offsets(kernel_size).size(), ScalarPlane(shape, 0.0f));
  return AffinityField(kernel_size, std::move(planes));
}

bool is_normalized(const AffinityField& field, double tolerance) {
  const std::size_t n = field.shape().size();
  std::vector<double> sums(n, 0.0);
  for (const auto& p : field.planes()) {
    const auto w = p.values();
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] < 0.0f) return false;
      sums[i] += w[i];
    }
  }
  return std::all_of(sums.begin(), sums.end(), [&](double s) { return s <= 1.0 + tolerance; });
}

AffinityField normalize(const AffinityField& raw) {
  const std::size_t n = raw.shape().size();
  std::vector<double> sums(n, 0.0);
  for (const auto& p : raw.planes()) {
    const auto w = p.values();
    for (std::size_t i = 0; i < n; ++i) sums[i] += std::abs(static_cast<double>(w[i]));
  }
  std::vector<ScalarPlane> planes;
  planes.reserve(raw.planes().size());
  for (const auto& p : raw.planes()) {
    const auto w = p.values();
    std::vector<float> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(static_cast<double>(w[i]));
      out[i] = sums[i] > 1.0 + kNormalizationTolerance ? static_cast<float>(a / sums[i])
                                                       : static_cast<float>(a);
    }
    planes.emplace_back(raw.shape(), std::move(out));
  }
  return AffinityField(raw.kernel_size(), std::move(planes));
}

ScalarPlane self_weight(const AffinityField& field) {
  const std::size_t n = field.shape().size();
  std::vector<double> sums(n, 0.0);
  for (const auto& p : field.planes()) {
    const auto w = p.values();
    for (std::size_t i = 0; i < n; ++i) sums[i] += w[i];
  }
  std::vector<float> self(n);
  std::transform(sums.begin(), sums.end(), self.begin(),
                 [](double s) { return static_cast<float>(std::max(0.0, 1.0 - s)); });
  return ScalarPlane(field.shape(), std::move(self));
}

AffinityField guided_affinity(const RgbImage& image, int kernel_size, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ValueError("sigma must be finite and positive, got " + std::to_string(sigma));
  }
  const auto offsets = neighbor_offsets(kernel_size);
  const Shape shape = image[0].shape();
  require_same_shape(shape, image[1].shape(), "guided_affinity (channel 0 vs 1)");
  require_same_shape(shape, image[2].shape(), "guided_affinity (channel 0 vs 2)");
  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);

  std::vector<ScalarPlane> planes;
  planes.reserve(offsets.size());
  for (const auto& off : offsets) {
    std::vector<float> w(shape.size(), 0.0f);
    for (int v = 0; v < shape.height; ++v) {
      const int nv = v + off.dy;
      if (nv < 0 || nv >= shape.height) continue;
      for (int u = 0; u < shape.width; ++u) {
        const int nu = u + off.dx;
        if (nu < 0 || nu >= shape.width) continue;
        double dist_sq = 0.0;
        for (const auto& channel : image) {
          const double d = static_cast<double>(channel.at(v, u)) - channel.at(nv, nu);
          dist_sq += d * d;
        }
        w[static_cast<std::size_t>(v) * shape.width + u] =
            static_cast<float>(std::exp(-dist_sq * inv_two_sigma_sq));
      }
    }
    planes.emplace_back(shape, std::move(w));
  }
  return normalize(AffinityField(kernel_size, std::move(planes)));
}

}  // namespace depthprop
