#include "dansr/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dansr {

void Image::clamp01() {
  for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
}

Image Image::clamped01() const {
  Image out = *this;
  out.clamp01();
  return out;
}

Image Image::center_crop_to_multiple(int s) const {
  const int h = (height / s) * s;
  const int w = (width / s) * s;
  if (h <= 0 || w <= 0) throw std::invalid_argument("center_crop_to_multiple: image smaller than s");
  const int y0 = (height - h) / 2;
  const int x0 = (width - w) / 2;
  Image out(channels, h, w);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = at(c, y0 + y, x0 + x);
  return out;
}

std::vector<std::uint8_t> quantize_bytes(const Image& img) {
  std::vector<std::uint8_t> bytes(img.numel());
  // Interleaved pixel order, matching the PNM payload.
  size_t k = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        const double q = std::round(255.0 * std::clamp(img.at(c, y, x), 0.0, 1.0));
        bytes[k++] = static_cast<std::uint8_t>(q);
      }
  return bytes;
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("write_pnm: channels must be 1 or 3");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pnm: cannot open " + path.string());
  f << (img.channels == 3 ? "P6" : "P5") << "\n"
    << img.width << " " << img.height << "\n255\n";
  const auto bytes = quantize_bytes(img);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write_pnm: write failed for " + path.string());
}

namespace {

int read_pnm_token(std::istream& in) {
  // Skips whitespace and '#' comments per the PNM grammar.
  while (true) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  in >> value;
  if (!in) throw std::runtime_error("read_pnm: malformed header");
  return value;
}

}  // namespace

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_pnm: cannot open " + path.string());
  char magic[2];
  f.read(magic, 2);
  if (!f || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
    throw std::runtime_error("read_pnm: not a binary PGM/PPM file: " + path.string());
  const int channels = magic[1] == '6' ? 3 : 1;
  const int width = read_pnm_token(f);
  const int height = read_pnm_token(f);
  const int maxval = read_pnm_token(f);
  if (maxval != 255) throw std::runtime_error("read_pnm: only 8-bit files supported");
  f.get();  // single whitespace after maxval
  std::vector<std::uint8_t> bytes(static_cast<size_t>(channels) * height * width);
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("read_pnm: truncated pixel data in " + path.string());
  Image img(channels, height, width);
  size_t k = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) img.at(c, y, x) = bytes[k++] / 255.0;
  return img;
}

}  // namespace dansr
