#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthprop {

/// Base class for every data-level failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two planes that must agree in size do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain invariant (non-finite, negative depth, ...).
class ValueError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

struct Shape {
  int height = 0;
  int width = 0;

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  [[nodiscard]] std::string str() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Throws ShapeError unless both shapes are equal. `what` names the operation.
void require_same_shape(const Shape& a, const Shape& b, const char* what);

/**
 * Row-major H x W plane of finite 32-bit reals.
 *
 * Indexing is (row v, column u); u is the horizontal image coordinate.
 * Instances are immutable once constructed.
 */
class ScalarPlane {
 public:
  ScalarPlane() = default;
  ScalarPlane(Shape shape, float fill);
  ScalarPlane(Shape shape, std::vector<float> values);

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] int height() const { return shape_.height; }
  [[nodiscard]] int width() const { return shape_.width; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

  [[nodiscard]] float at(int v, int u) const {
    return values_[static_cast<std::size_t>(v) * shape_.width + u];
  }
  [[nodiscard]] std::span<const float> values() const { return values_; }
  [[nodiscard]] std::span<const float> row(int v) const {
    return std::span<const float>(values_).subspan(
        static_cast<std::size_t>(v) * shape_.width, shape_.width);
  }

  friend bool operator==(const ScalarPlane&, const ScalarPlane&) = default;

 protected:
  Shape shape_;
  std::vector<float> values_;
};

/**
 * Depth in meters. Zero marks a pixel without a measurement; every
 * other value is strictly positive and finite.
 */
class DepthGrid : public ScalarPlane {
 public:
  DepthGrid() = default;
  DepthGrid(Shape shape, float fill);
  DepthGrid(Shape shape, std::vector<float> values);

  [[nodiscard]] bool valid(int v, int u) const { return at(v, u) > 0.0f; }
  [[nodiscard]] std::size_t valid_count() const;

  friend bool operator==(const DepthGrid&, const DepthGrid&) = default;
};

class Mask {
 public:
  Mask() = default;
  Mask(Shape shape, std::vector<std::uint8_t> bits);

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] bool at(int v, int u) const {
    return bits_[static_cast<std::size_t>(v) * shape_.width + u] != 0;
  }
  [[nodiscard]] std::span<const std::uint8_t> bits() const { return bits_; }
  [[nodiscard]] std::size_t count() const;

 private:
  Shape shape_;
  std::vector<std::uint8_t> bits_;
};

DepthGrid make_grid(int height, int width, float fill);

/// Bit set exactly where depth > 0.
Mask valid_mask(const DepthGrid& depth);

}  // namespace depthprop
