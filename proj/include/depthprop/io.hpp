#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "depthprop/affinity.hpp"
#include "depthprop/core.hpp"
#include "depthprop/geometry.hpp"

namespace depthprop::io {

/// Depth PNGs store round(depth_m * 256) as 16-bit gray; raw 0 is invalid.
inline constexpr double kDepthScale = 256.0;
inline constexpr double kMaxEncodableDepth = 65535.0 / kDepthScale;

/// Throws FormatError unless the file is a single-channel 16-bit PNG.
DepthGrid read_depth_png(const std::filesystem::path& path);

/// Throws ValueError if any depth exceeds kMaxEncodableDepth.
void write_depth_png(const DepthGrid& depth, const std::filesystem::path& path);

/// 8- or 16-bit RGB / RGBA / gray PNG as three channels scaled to [0, 1].
RgbImage read_rgb_png(const std::filesystem::path& path);

/**
 * Binary plane container, little-endian throughout:
 *
 *   magic        8 bytes  "PRFPLN\0\1"
 *   height       u32
 *   width        u32
 *   plane_count  u32
 *   payload      plane_count * height * width f32, plane-major, row-major
 */
struct PlaneContainer {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<ScalarPlane> planes;

  friend bool operator==(const PlaneContainer&, const PlaneContainer&) = default;
};

inline constexpr std::array<char, 8> kPlaneMagic = {'P', 'R', 'F', 'P', 'L', 'N', '\0', '\1'};

std::vector<std::uint8_t> encode_planes(const PlaneContainer& container);
/// Throws FormatError on bad magic, zero sizes, truncation or trailing
/// bytes, and non-finite floats.
PlaneContainer decode_planes(const std::vector<std::uint8_t>& bytes);

PlaneContainer read_planes(const std::filesystem::path& path);
void write_planes(const PlaneContainer& container, const std::filesystem::path& path);

/// Neighbor planes in ascending (dy, dx) order; the kernel size is
/// recovered from the plane count (k^2 - 1).
PlaneContainer to_container(const AffinityField& field);
AffinityField affinity_from_container(const PlaneContainer& container);

PlaneContainer to_container(const ScalarPlane& plane);
/// Throws FormatError unless the container holds exactly one plane.
ScalarPlane single_plane(const PlaneContainer& container);

/// Intrinsics from the "P2:" row of a KITTI calibration file.
CameraIntrinsics read_kitti_calib(const std::filesystem::path& path);
CameraIntrinsics parse_kitti_calib(const std::string& text);

}  // namespace depthprop::io
