#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dansr {

/// Planar real-valued image, values nominally in [0, 1].
/// Layout is channel-major: v[(c*H + y)*W + x].
struct Image {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> v;

  Image() = default;
  Image(int c, int h, int w) : channels(c), height(h), width(w), v(static_cast<size_t>(c) * h * w, 0.0) {}

  static Image constant(int c, int h, int w, double value) {
    Image img(c, h, w);
    std::fill(img.v.begin(), img.v.end(), value);
    return img;
  }

  double& at(int c, int y, int x) { return v[(static_cast<size_t>(c) * height + y) * width + x]; }
  double at(int c, int y, int x) const { return v[(static_cast<size_t>(c) * height + y) * width + x]; }

  size_t numel() const { return v.size(); }
  bool same_dims(const Image& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }

  void clamp01();
  Image clamped01() const;

  /// Crop to the largest top-left region whose dims are divisible by s.
  Image center_crop_to_multiple(int s) const;
};

/// 8-bit binary PPM (P6) for 3-channel images, PGM (P5) for 1-channel.
/// Values are quantized by round(255*x) with clamping.
void write_pnm(const std::filesystem::path& path, const Image& img);
Image read_pnm(const std::filesystem::path& path);

/// Quantized byte view (the exact bytes write_pnm would emit for the pixels).
std::vector<std::uint8_t> quantize_bytes(const Image& img);

}  // namespace dansr
