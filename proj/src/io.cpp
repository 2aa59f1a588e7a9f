#include "depthprop/io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace depthprop::io {

namespace {

// libpng reports errors through longjmp. Every function that calls into
// libpng below sets its own jump target and keeps only trivially
// destructible locals, so the jump never skips a destructor.

struct PngHandle {
  std::FILE* file = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  bool writing = false;
  char message[256] = {};

  PngHandle() = default;
  PngHandle(const PngHandle&) = delete;
  PngHandle& operator=(const PngHandle&) = delete;
  ~PngHandle() {
    if (writing) {
      png_destroy_write_struct(&png, &info);
    } else {
      png_destroy_read_struct(&png, &info, nullptr);
    }
    if (file) std::fclose(file);
  }
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* handle = static_cast<PngHandle*>(png_get_error_ptr(png));
  std::snprintf(handle->message, sizeof(handle->message), "%s", msg);
  longjmp(png_jmpbuf(png), 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;
};

std::string describe_color_type(int color_type) {
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: return "gray";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "gray+alpha";
    case PNG_COLOR_TYPE_RGB: return "rgb";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "rgba";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    default: return "unknown";
  }
}

void open_for_read(PngHandle& h, const std::filesystem::path& path) {
  h.file = std::fopen(path.string().c_str(), "rb");
  if (!h.file) throw FormatError("cannot open " + path.string() + " for reading");
  png_byte signature[8];
  if (std::fread(signature, 1, 8, h.file) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw FormatError(path.string() + " is not a PNG file");
  }
  h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &h, on_png_error, on_png_warning);
  if (!h.png) throw FormatError("libpng: cannot create read struct");
  h.info = png_create_info_struct(h.png);
  if (!h.info) throw FormatError("libpng: cannot create info struct");
}

bool read_header(PngHandle& h, PngHeader& header) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_init_io(h.png, h.file);
  png_set_sig_bytes(h.png, 8);
  png_read_info(h.png, h.info);
  header.width = png_get_image_width(h.png, h.info);
  header.height = png_get_image_height(h.png, h.info);
  header.bit_depth = png_get_bit_depth(h.png, h.info);
  header.color_type = png_get_color_type(h.png, h.info);
  header.channels = png_get_channels(h.png, h.info);
  return true;
}

// Registers transforms that turn any supported input into 8- or 16-bit RGB.
bool request_rgb(PngHandle& h, const PngHeader& header) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  if (header.color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png);
  if (header.color_type == PNG_COLOR_TYPE_GRAY && header.bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(h.png);
  }
  if (header.color_type == PNG_COLOR_TYPE_GRAY || header.color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(h.png);
  }
  if (header.color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(h.png);
  return true;
}

bool read_pixels(PngHandle& h, png_bytep* rows) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  if constexpr (std::endian::native == std::endian::little) png_set_swap(h.png);
  png_set_interlace_handling(h.png);
  png_read_update_info(h.png, h.info);
  png_read_image(h.png, rows);
  png_read_end(h.png, nullptr);
  return true;
}

bool write_pixels(PngHandle& h, png_uint_32 width, png_uint_32 height, png_bytep* rows) {
  if (setjmp(png_jmpbuf(h.png))) return false;
  png_init_io(h.png, h.file);
  png_set_IHDR(h.png, h.info, width, height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(h.png, h.info);
  if constexpr (std::endian::native == std::endian::little) png_set_swap(h.png);
  png_write_image(h.png, rows);
  png_write_end(h.png, nullptr);
  return true;
}

[[noreturn]] void png_failure(const PngHandle& h, const std::filesystem::path& path) {
  throw FormatError(path.string() + ": " + h.message);
}

template <typename Sample>
std::vector<png_bytep> row_pointers(std::vector<Sample>& data, std::size_t row_samples,
                                    std::size_t height) {
  std::vector<png_bytep> rows(height);
  for (std::size_t v = 0; v < height; ++v) {
    rows[v] = reinterpret_cast<png_bytep>(data.data() + v * row_samples);
  }
  return rows;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

constexpr std::size_t kHeaderBytes = 8 + 3 * 4;

}  // namespace

DepthGrid read_depth_png(const std::filesystem::path& path) {
  PngHandle h;
  open_for_read(h, path);
  PngHeader header;
  if (!read_header(h, header)) png_failure(h, path);
  if (header.color_type != PNG_COLOR_TYPE_GRAY || header.bit_depth != 16) {
    throw FormatError(path.string() + ": depth PNG must be single-channel 16-bit, got " +
                      describe_color_type(header.color_type) + " with " +
                      std::to_string(header.channels) + " channel(s) at " +
                      std::to_string(header.bit_depth) + " bit");
  }
  const std::size_t w = header.width;
  const std::size_t hgt = header.height;
  std::vector<std::uint16_t> raw(w * hgt);
  auto rows = row_pointers(raw, w, hgt);
  if (!read_pixels(h, rows.data())) png_failure(h, path);

  std::vector<float> depth(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    depth[i] = static_cast<float>(raw[i] / kDepthScale);
  }
  return DepthGrid(Shape{static_cast<int>(hgt), static_cast<int>(w)}, std::move(depth));
}

void write_depth_png(const DepthGrid& depth, const std::filesystem::path& path) {
  const auto values = depth.values();
  std::vector<std::uint16_t> raw(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double scaled = std::round(static_cast<double>(values[i]) * kDepthScale);
    if (scaled > 65535.0) {
      std::ostringstream os;
      os << "depth " << values[i] << " m at (v=" << i / depth.width()
         << ", u=" << i % depth.width() << ") exceeds the maximum encodable value of "
         << kMaxEncodableDepth << " m";
      throw ValueError(os.str());
    }
    raw[i] = static_cast<std::uint16_t>(scaled);
  }
  const auto w = static_cast<std::size_t>(depth.width());
  const auto hgt = static_cast<std::size_t>(depth.height());
  auto rows = row_pointers(raw, w, hgt);

  PngHandle h;
  h.writing = true;
  h.file = std::fopen(path.string().c_str(), "wb");
  if (!h.file) throw FormatError("cannot open " + path.string() + " for writing");
  h.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &h, on_png_error, on_png_warning);
  if (!h.png) throw FormatError("libpng: cannot create write struct");
  h.info = png_create_info_struct(h.png);
  if (!h.info) throw FormatError("libpng: cannot create info struct");
  if (!write_pixels(h, static_cast<png_uint_32>(w), static_cast<png_uint_32>(hgt), rows.data())) {
    png_failure(h, path);
  }
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  PngHandle h;
  open_for_read(h, path);
  PngHeader header;
  if (!read_header(h, header)) png_failure(h, path);
  if (!request_rgb(h, header)) png_failure(h, path);

  const std::size_t w = header.width;
  const std::size_t hgt = header.height;
  const Shape shape{static_cast<int>(hgt), static_cast<int>(w)};
  std::array<std::vector<float>, 3> channels;
  for (auto& c : channels) c.resize(w * hgt);

  if (header.bit_depth == 16) {
    std::vector<std::uint16_t> raw(w * hgt * 3);
    auto rows = row_pointers(raw, w * 3, hgt);
    if (!read_pixels(h, rows.data())) png_failure(h, path);
    for (std::size_t i = 0; i < w * hgt; ++i) {
      for (int c = 0; c < 3; ++c) channels[c][i] = raw[3 * i + c] / 65535.0f;
    }
  } else {
    std::vector<std::uint8_t> raw(w * hgt * 3);
    auto rows = row_pointers(raw, w * 3, hgt);
    if (!read_pixels(h, rows.data())) png_failure(h, path);
    for (std::size_t i = 0; i < w * hgt; ++i) {
      for (int c = 0; c < 3; ++c) channels[c][i] = raw[3 * i + c] / 255.0f;
    }
  }
  return {ScalarPlane(shape, std::move(channels[0])), ScalarPlane(shape, std::move(channels[1])),
          ScalarPlane(shape, std::move(channels[2]))};
}

std::vector<std::uint8_t> encode_planes(const PlaneContainer& container) {
  const std::size_t per_plane = static_cast<std::size_t>(container.height) * container.width;
  std::vector<std::uint8_t> out(kPlaneMagic.begin(), kPlaneMagic.end());
  out.reserve(kHeaderBytes + container.planes.size() * per_plane * 4);
  put_u32(out, container.height);
  put_u32(out, container.width);
  put_u32(out, static_cast<std::uint32_t>(container.planes.size()));
  for (const auto& plane : container.planes) {
    if (plane.size() != per_plane || plane.height() != static_cast<int>(container.height)) {
      throw ShapeError("plane " + plane.shape().str() + " does not match container " +
                       std::to_string(container.height) + "x" + std::to_string(container.width));
    }
    for (float f : plane.values()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

PlaneContainer decode_planes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw FormatError("plane container truncated: " + std::to_string(bytes.size()) +
                      " bytes is shorter than the " + std::to_string(kHeaderBytes) +
                      "-byte header");
  }
  if (!std::equal(kPlaneMagic.begin(), kPlaneMagic.end(), bytes.begin())) {
    throw FormatError("plane container has bad magic");
  }
  PlaneContainer c;
  c.height = get_u32(bytes.data() + 8);
  c.width = get_u32(bytes.data() + 12);
  const std::uint32_t count = get_u32(bytes.data() + 16);
  if (c.height == 0 || c.width == 0 || count == 0) {
    throw FormatError("plane container declares an empty payload (" + std::to_string(c.height) +
                      "x" + std::to_string(c.width) + ", " + std::to_string(count) + " planes)");
  }
  if (c.height > static_cast<std::uint32_t>(INT32_MAX) ||
      c.width > static_cast<std::uint32_t>(INT32_MAX)) {
    throw FormatError("plane container dimensions too large");
  }
  // Compare in floats-available units to avoid overflowing the product.
  const std::size_t available = (bytes.size() - kHeaderBytes) / 4;
  const std::uint64_t per_plane = static_cast<std::uint64_t>(c.height) * c.width;
  const bool aligned = (bytes.size() - kHeaderBytes) % 4 == 0;
  if (!aligned || available % per_plane != 0 || available / per_plane != count) {
    const bool short_payload = available / per_plane < count;
    throw FormatError(std::string(short_payload ? "plane container truncated"
                                                : "plane container has trailing bytes") +
                      ": header declares " + std::to_string(count) + " planes of " +
                      std::to_string(c.height) + "x" + std::to_string(c.width) + " but payload is " +
                      std::to_string(bytes.size() - kHeaderBytes) + " bytes");
  }
  const Shape shape{static_cast<int>(c.height), static_cast<int>(c.width)};
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  c.planes.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    std::vector<float> values(per_plane);
    for (auto& f : values) {
      f = std::bit_cast<float>(get_u32(p));
      p += 4;
    }
    try {
      c.planes.emplace_back(shape, std::move(values));
    } catch (const ValueError& e) {
      throw FormatError("plane " + std::to_string(k) + ": " + e.what());
    }
  }
  return c;
}

PlaneContainer read_planes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string() + " for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_planes(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_planes(const PlaneContainer& container, const std::filesystem::path& path) {
  const auto bytes = encode_planes(container);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

PlaneContainer to_container(const AffinityField& field) {
  return PlaneContainer{static_cast<std::uint32_t>(field.shape().height),
                        static_cast<std::uint32_t>(field.shape().width), field.planes()};
}

AffinityField affinity_from_container(const PlaneContainer& container) {
  const std::size_t count = container.planes.size();
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count + 1))));
  if (k < 3 || k % 2 == 0 || static_cast<std::size_t>(k) * k - 1 != count) {
    throw FormatError("affinity container needs k*k-1 planes for odd k >= 3, got " +
                      std::to_string(count));
  }
  return AffinityField(k, container.planes);
}

PlaneContainer to_container(const ScalarPlane& plane) {
  return PlaneContainer{static_cast<std::uint32_t>(plane.height()),
                        static_cast<std::uint32_t>(plane.width()), {plane}};
}

ScalarPlane single_plane(const PlaneContainer& container) {
  if (container.planes.size() != 1) {
    throw FormatError("expected a single-plane container, got " +
                      std::to_string(container.planes.size()) + " planes");
  }
  return container.planes.front();
}

CameraIntrinsics parse_kitti_calib(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key) || key != "P2:") continue;
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw FormatError("P2 row has a non-numeric entry '" + token + "'");
      }
    }
    if (row.size() != 12) {
      throw FormatError("P2 row needs 12 values, got " + std::to_string(row.size()));
    }
    try {
      return CameraIntrinsics(row[0], row[5], row[2], row[6]);
    } catch (const ValueError& e) {
      throw FormatError(std::string("P2 row: ") + e.what());
    }
  }
  throw FormatError("calibration has no P2 row");
}

CameraIntrinsics read_kitti_calib(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string() + " for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_kitti_calib(buffer.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace depthprop::io
