#include "depthprop/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace depthprop {

namespace {

void check_shape(const Shape& shape) {
  if (shape.height < 1 || shape.width < 1) {
    throw ValueError("plane dimensions must be positive, got " + shape.str());
  }
}

void check_size(const Shape& shape, std::size_t n) {
  if (n != shape.size()) {
    throw ShapeError("plane " + shape.str() + " needs " + std::to_string(shape.size()) +
                     " values, got " + std::to_string(n));
  }
}

std::string describe(std::size_t index, int width, float value) {
  std::ostringstream os;
  os << value << " at (v=" << index / width << ", u=" << index % width << ")";
  return os.str();
}

}  // namespace

std::string Shape::str() const {
  return std::to_string(height) + "x" + std::to_string(width);
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.str() + " vs " + b.str());
  }
}

ScalarPlane::ScalarPlane(Shape shape, float fill)
    : ScalarPlane(shape, std::vector<float>(shape.height > 0 && shape.width > 0 ? shape.size() : 0,
                                            fill)) {}

ScalarPlane::ScalarPlane(Shape shape, std::vector<float> values)
    : shape_(shape), values_(std::move(values)) {
  check_shape(shape_);
  check_size(shape_, values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ValueError("non-finite value " + describe(i, shape_.width, values_[i]));
    }
  }
}

DepthGrid::DepthGrid(Shape shape, float fill)
    : DepthGrid(shape, std::vector<float>(shape.height > 0 && shape.width > 0 ? shape.size() : 0,
                                          fill)) {}

DepthGrid::DepthGrid(Shape shape, std::vector<float> values)
    : ScalarPlane(shape, std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 0.0f) {
      throw ValueError("negative depth " + describe(i, shape_.width, values_[i]));
    }
  }
}

std::size_t DepthGrid::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](float d) { return d > 0.0f; }));
}

Mask::Mask(Shape shape, std::vector<std::uint8_t> bits) : shape_(shape), bits_(std::move(bits)) {
  check_shape(shape_);
  check_size(shape_, bits_.size());
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

DepthGrid make_grid(int height, int width, float fill) {
  return DepthGrid(Shape{height, width}, fill);
}

Mask valid_mask(const DepthGrid& depth) {
  std::vector<std::uint8_t> bits(depth.size());
  const auto values = depth.values();
  std::transform(values.begin(), values.end(), bits.begin(),
                 [](float d) { return static_cast<std::uint8_t>(d > 0.0f); });
  return Mask(depth.shape(), std::move(bits));
}

}  // namespace depthprop
