#include "dansr/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dansr {

namespace {
constexpr double kPi = 3.14159265358979323846;

int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  int m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - m;
  return m;
}
}  // namespace

std::string to_string(ResizeMode m) {
  switch (m) {
    case ResizeMode::area: return "area";
    case ResizeMode::bilinear: return "bilinear";
    case ResizeMode::bicubic: return "bicubic";
  }
  return "?";
}

ResizeMode resize_mode_from_string(const std::string& s) {
  if (s == "area") return ResizeMode::area;
  if (s == "bilinear") return ResizeMode::bilinear;
  if (s == "bicubic") return ResizeMode::bicubic;
  throw std::invalid_argument("unknown resize mode: " + s);
}

void NoiseSpec::validate() const {
  if (sigma_g < 0.0 || lambda < 0.0) throw std::invalid_argument("noise levels must be >= 0");
  if (gaussian_type && lambda != 0.0)
    throw std::invalid_argument("gaussian noise spec must store lambda=0");
  if (!gaussian_type && sigma_g != 0.0)
    throw std::invalid_argument("poisson noise spec must store sigma_g=0");
}

void JpegSpec::validate() const {
  if (compressed) {
    if (quality < 1 || quality >= 100)
      throw std::invalid_argument("compressed jpeg quality must be in [1, 100)");
  } else if (quality != 100) {
    throw std::invalid_argument("uncompressed jpeg spec must store quality=100");
  }
}

StageParams StageParams::identity() {
  StageParams sp;
  sp.blur = BlurKernelSpec::gaussian(3, 0.1, 0.1, 0.0, 1.0);  // near-delta
  sp.resize = {ResizeMode::area, 1.0};
  sp.noise = {true, true, 0.0, 0.0};
  sp.jpeg = {false, 100};
  return sp;
}

void StageParams::validate() const {
  blur.validate();
  if (!(resize.scale > 0.0)) throw std::invalid_argument("resize scale must be > 0");
  noise.validate();
  jpeg.validate();
}

DegradationParams DegradationParams::null_params(int scale) {
  DegradationParams p;
  p.stage1 = StageParams::identity();
  p.stage2 = StageParams::identity();
  p.target_sr_scale = scale;
  p.validate();
  return p;
}

void DegradationParams::validate() const {
  stage1.validate();
  stage2.validate();
  if (target_sr_scale != 2 && target_sr_scale != 4)
    throw std::invalid_argument("target_sr_scale must be 2 or 4");
}

// --- convolution and resampling -------------------------------------------

Image convolve2d(const Image& img, const KernelMatrix& kernel) {
  if (kernel.size % 2 == 0 || kernel.size < 1)
    throw std::invalid_argument("convolve2d: kernel size must be odd");
  if (kernel.size > img.height || kernel.size > img.width)
    throw std::invalid_argument("convolve2d: kernel larger than image");
  const int r = kernel.radius();
  Image out(img.channels, img.height, img.width);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          const int sy = reflect101(y + i, img.height);
          for (int j = -r; j <= r; ++j)
            acc += kernel.at(i, j) * img.at(c, sy, reflect101(x + j, img.width));
        }
        out.at(c, y, x) = acc;
      }
  return out;
}

namespace {

double keys_cubic(double x) {
  // Keys kernel with a = -0.5 (Catmull-Rom); reproduces constants exactly.
  x = std::fabs(x);
  if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
  if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
  return 0.0;
}

struct Tap {
  int index;
  double weight;
};

// Weights for resampling a length n_in axis to n_out.
std::vector<std::vector<Tap>> axis_taps(int n_in, int n_out, ResizeMode mode) {
  std::vector<std::vector<Tap>> taps(n_out);
  const double inv = static_cast<double>(n_in) / n_out;
  for (int i = 0; i < n_out; ++i) {
    auto& row = taps[i];
    if (mode == ResizeMode::area) {
      const double lo = i * inv;
      const double hi = (i + 1) * inv;
      const int p0 = static_cast<int>(std::floor(lo));
      const int p1 = std::min(n_in - 1, static_cast<int>(std::ceil(hi)) - 1);
      double total = 0.0;
      for (int p = p0; p <= p1; ++p) {
        const double overlap = std::min(hi, static_cast<double>(p + 1)) - std::max(lo, static_cast<double>(p));
        if (overlap <= 0.0) continue;
        row.push_back({std::clamp(p, 0, n_in - 1), overlap});
        total += overlap;
      }
      for (auto& t : row) t.weight /= total;
    } else {
      const double src = (i + 0.5) * inv - 0.5;
      const int base = static_cast<int>(std::floor(src));
      const double frac = src - base;
      if (mode == ResizeMode::bilinear) {
        row.push_back({reflect101(base, n_in), 1.0 - frac});
        row.push_back({reflect101(base + 1, n_in), frac});
      } else {
        for (int t = -1; t <= 2; ++t)
          row.push_back({reflect101(base + t, n_in), keys_cubic(frac - t)});
      }
    }
  }
  return taps;
}

Image resample_axis(const Image& img, int n_out, ResizeMode mode, bool vertical) {
  const int n_in = vertical ? img.height : img.width;
  const auto taps = axis_taps(n_in, n_out, mode);
  Image out(img.channels, vertical ? n_out : img.height, vertical ? img.width : n_out);
  for (int c = 0; c < img.channels; ++c) {
    if (vertical) {
      for (int y = 0; y < n_out; ++y)
        for (int x = 0; x < img.width; ++x) {
          double acc = 0.0;
          for (const auto& t : taps[y]) acc += t.weight * img.at(c, t.index, x);
          out.at(c, y, x) = acc;
        }
    } else {
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < n_out; ++x) {
          double acc = 0.0;
          for (const auto& t : taps[x]) acc += t.weight * img.at(c, y, t.index);
          out.at(c, y, x) = acc;
        }
    }
  }
  return out;
}

}  // namespace

Image resize_to(const Image& img, ResizeMode mode, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw std::invalid_argument("resize: degenerate output size");
  Image tmp = resample_axis(img, out_h, mode, /*vertical=*/true);
  return resample_axis(tmp, out_w, mode, /*vertical=*/false);
}

Image resize(const Image& img, const ResizeSpec& spec) {
  if (!(spec.scale > 0.0)) throw std::invalid_argument("resize: scale must be > 0");
  const int out_h = static_cast<int>(std::lround(img.height * spec.scale));
  const int out_w = static_cast<int>(std::lround(img.width * spec.scale));
  return resize_to(img, spec.mode, out_h, out_w);
}

Image downsample_s_fold(const Image& img, int s) {
  if (s < 1) throw std::invalid_argument("downsample_s_fold: s must be >= 1");
  if (img.height % s != 0 || img.width % s != 0)
    throw std::invalid_argument("downsample_s_fold: dims not divisible by s");
  Image out(img.channels, img.height / s, img.width / s);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < out.height; ++y)
      for (int x = 0; x < out.width; ++x) out.at(c, y, x) = img.at(c, y * s, x * s);
  return out;
}

// --- noise -----------------------------------------------------------------

Image add_gaussian_noise(const Image& img, double sigma_g, bool rgb, Rng& rng) {
  if (sigma_g < 0.0) throw std::invalid_argument("gaussian noise sigma must be >= 0");
  if (sigma_g == 0.0) return img;
  Image out = img;
  if (rgb || img.channels == 1) {
    for (auto& x : out.v) x = std::clamp(x + sigma_g * rng.normal(), 0.0, 1.0);
  } else {
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        const double n = sigma_g * rng.normal();
        for (int c = 0; c < img.channels; ++c)
          out.at(c, y, x) = std::clamp(img.at(c, y, x) + n, 0.0, 1.0);
      }
  }
  return out;
}

Image add_poisson_noise(const Image& img, double lambda, bool rgb, Rng& rng) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson noise lambda must be > 0");
  const double v = 1.0 / lambda;  // Var(Poisson(x*v)/v) = x*lambda
  Image out = img;
  if (rgb || img.channels == 1) {
    for (auto& x : out.v) x = std::clamp(rng.poisson(std::max(0.0, x) * v) / v, 0.0, 1.0);
  } else {
    // Gray mode: one shared count per pixel, the resulting delta applied
    // to every channel.
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        double lum = 0.0;
        for (int c = 0; c < img.channels; ++c) lum += img.at(c, y, x);
        lum = std::max(0.0, lum / img.channels);
        const double delta = rng.poisson(lum * v) / v - lum;
        for (int c = 0; c < img.channels; ++c)
          out.at(c, y, x) = std::clamp(img.at(c, y, x) + delta, 0.0, 1.0);
      }
  }
  return out;
}

// --- JPEG roundtrip ----------------------------------------------------------
//
// Pixel-domain model of baseline JPEG: 8-bit source quantization, BT.601
// full-range color transform, per-plane 8x8 DCT with Annex-K tables scaled
// by the conventional quality mapping of libjpeg. The lossless stages
// (zigzag, Huffman) do not affect pixels and are omitted. Samples stay
// real-valued after the source quantization.

namespace {

constexpr int kLumaTable[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr int kChromaTable[64] = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

std::array<double, 64> scaled_table(const int* base, int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<double, 64> q{};
  for (int i = 0; i < 64; ++i)
    q[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return q;
}

struct DctBasis {
  double c[8][8];
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int x = 0; x < 8; ++x) c[u][x] = cu * std::cos((2 * x + 1) * u * kPi / 16.0);
    }
  }
};

const DctBasis& dct_basis() {
  static const DctBasis basis;
  return basis;
}

using Plane = std::vector<double>;  // row-major h*w

void jpeg_code_plane(Plane& p, int h, int w, const std::array<double, 64>& q) {
  const auto& B = dct_basis();
  const int bh = (h + 7) / 8, bw = (w + 7) / 8;
  double f[8][8], t[8][8], F[8][8];
  for (int by = 0; by < bh; ++by)
    for (int bx = 0; bx < bw; ++bx) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const int sy = std::min(h - 1, by * 8 + y);
          const int sx = std::min(w - 1, bx * 8 + x);
          f[y][x] = p[static_cast<size_t>(sy) * w + sx] - 128.0;  // level shift, edge-replicated pad
        }
      // F = C f C^T, quantize, f' = C^T F' C
      for (int u = 0; u < 8; ++u)
        for (int x = 0; x < 8; ++x) {
          double acc = 0.0;
          for (int y = 0; y < 8; ++y) acc += B.c[u][y] * f[y][x];
          t[u][x] = acc;
        }
      for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
          double acc = 0.0;
          for (int x = 0; x < 8; ++x) acc += t[u][x] * B.c[v][x];
          const double qq = q[u * 8 + v];
          F[u][v] = std::round(acc / qq) * qq;
        }
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          double acc = 0.0;
          for (int u = 0; u < 8; ++u) acc += B.c[u][y] * F[u][x];
          t[y][x] = acc;
        }
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          if (by * 8 + y >= h || bx * 8 + x >= w) continue;
          double acc = 0.0;
          for (int u = 0; u < 8; ++u) acc += t[y][u] * B.c[u][x];
          p[static_cast<size_t>(by * 8 + y) * w + (bx * 8 + x)] = acc + 128.0;
        }
    }
}

Plane resize_plane(const Plane& p, int h, int w, int oh, int ow, ResizeMode mode) {
  Image img(1, h, w);
  img.v.assign(p.begin(), p.end());
  Image out = resize_to(img, mode, oh, ow);
  return out.v;
}

}  // namespace

Image jpeg_roundtrip(const Image& img, int quality, bool subsample_420) {
  if (quality < 1 || quality > 100) throw std::invalid_argument("jpeg quality must be in [1, 100]");
  const int h = img.height, w = img.width;
  const auto ql = scaled_table(kLumaTable, quality);
  const auto qc = scaled_table(kChromaTable, quality);

  auto to_byte = [](double x) { return std::round(255.0 * std::clamp(x, 0.0, 1.0)); };

  if (img.channels == 1) {
    Plane y(static_cast<size_t>(h) * w);
    for (int i = 0; i < h * w; ++i) y[i] = to_byte(img.v[i]);
    jpeg_code_plane(y, h, w, ql);
    Image out(1, h, w);
    for (int i = 0; i < h * w; ++i) out.v[i] = std::clamp(y[i] / 255.0, 0.0, 1.0);
    return out;
  }
  if (img.channels != 3) throw std::invalid_argument("jpeg_roundtrip: 1 or 3 channels required");

  Plane y(static_cast<size_t>(h) * w), cb(y.size()), cr(y.size());
  for (int py = 0; py < h; ++py)
    for (int px = 0; px < w; ++px) {
      const double r = to_byte(img.at(0, py, px));
      const double g = to_byte(img.at(1, py, px));
      const double b = to_byte(img.at(2, py, px));
      const size_t i = static_cast<size_t>(py) * w + px;
      y[i] = 0.299 * r + 0.587 * g + 0.114 * b;
      cb[i] = -0.168735892 * r - 0.331264108 * g + 0.5 * b + 128.0;
      cr[i] = 0.5 * r - 0.418687589 * g - 0.081312411 * b + 128.0;
    }

  jpeg_code_plane(y, h, w, ql);
  if (subsample_420 && h >= 2 && w >= 2) {
    const int ch = (h + 1) / 2, cw = (w + 1) / 2;
    Plane sb = resize_plane(cb, h, w, ch, cw, ResizeMode::area);
    Plane sr = resize_plane(cr, h, w, ch, cw, ResizeMode::area);
    jpeg_code_plane(sb, ch, cw, qc);
    jpeg_code_plane(sr, ch, cw, qc);
    cb = resize_plane(sb, ch, cw, h, w, ResizeMode::bilinear);
    cr = resize_plane(sr, ch, cw, h, w, ResizeMode::bilinear);
  } else {
    jpeg_code_plane(cb, h, w, qc);
    jpeg_code_plane(cr, h, w, qc);
  }

  Image out(3, h, w);
  for (int py = 0; py < h; ++py)
    for (int px = 0; px < w; ++px) {
      const size_t i = static_cast<size_t>(py) * w + px;
      const double yy = y[i], ub = cb[i] - 128.0, vr = cr[i] - 128.0;
      out.at(0, py, px) = std::clamp((yy + 1.402 * vr) / 255.0, 0.0, 1.0);
      out.at(1, py, px) = std::clamp((yy - 0.344136286 * ub - 0.714136286 * vr) / 255.0, 0.0, 1.0);
      out.at(2, py, px) = std::clamp((yy + 1.772 * ub) / 255.0, 0.0, 1.0);
    }
  return out;
}

// --- pipeline ---------------------------------------------------------------

Image apply_stage(const Image& img, const StageParams& sp, Rng& rng, double kernel_noise_strength) {
  sp.validate();
  Rng kernel_rng = rng.substream("kernel");
  const KernelMatrix kernel = kernel_from_spec(sp.blur, kernel_noise_strength, kernel_rng);
  Image out = convolve2d(img, kernel);
  out = resize(out, sp.resize);
  Rng noise_rng = rng.substream("noise");
  if (sp.noise.gaussian_type) {
    if (sp.noise.sigma_g > 0.0) out = add_gaussian_noise(out, sp.noise.sigma_g, sp.noise.rgb, noise_rng);
  } else if (sp.noise.lambda > 0.0) {
    out = add_poisson_noise(out, sp.noise.lambda, sp.noise.rgb, noise_rng);
  }
  if (sp.jpeg.compressed) out = jpeg_roundtrip(out, sp.jpeg.quality);
  out.clamp01();
  return out;
}

Image degrade_two_stage(const Image& hr, const DegradationParams& params, Rng& rng,
                        double kernel_noise_strength) {
  params.validate();
  const int s = params.target_sr_scale;
  if (hr.height % s != 0 || hr.width % s != 0)
    throw std::invalid_argument("degrade_two_stage: HR dims not divisible by target scale");
  Rng rng1 = rng.substream("stage1");
  Rng rng2 = rng.substream("stage2");
  Image out = apply_stage(hr, params.stage1, rng1, kernel_noise_strength);
  out = apply_stage(out, params.stage2, rng2, kernel_noise_strength);
  out = resize_to(out, ResizeMode::bicubic, hr.height / s, hr.width / s);
  out.clamp01();
  return out;
}

Image degrade_blurry(const Image& hr, const KernelMatrix& kernel, int s) {
  return downsample_s_fold(convolve2d(hr, kernel), s);
}

// --- theta codec --------------------------------------------------------------

std::string ThetaTable::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "dansr-theta-table-v" << version << ";ks:" << ks_min << ":" << ks_max
     << ";sigma:" << sigma_min << ":" << sigma_max << ";theta:" << theta_min << ":" << theta_max
     << ";beta:" << beta_min << ":" << beta_max << ";omega:" << omega_min << ":" << omega_max
     << ";scale:" << scale_min << ":" << scale_max << ";sigma_g:" << sigma_g_min << ":" << sigma_g_max
     << ";lambda:" << lambda_min << ":" << lambda_max << ";q:" << q_min << ":" << q_max;
  return os.str();
}

std::uint64_t ThetaTable::hash() const { return fnv1a64(serialize()); }

const ThetaTable& ThetaTable::v1() {
  static const ThetaTable t;
  return t;
}

namespace {

double enc_range(double v, double lo, double hi, const char* field) {
  if (v < lo - 1e-9 || v > hi + 1e-9)
    throw std::invalid_argument(std::string("encode_theta: field out of range: ") + field);
  return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

double dec_range(double v, double lo, double hi) { return lo + std::clamp(v, 0.0, 1.0) * (hi - lo); }

void encode_stage(const StageParams& sp, const ThetaTable& t, double* out) {
  // [k_g, k_c, k_s, sx, sy, theta, beta, wc, r_area, r_bil, r_bic, s, n_t, n_c, sg, lam, j, q]
  const auto& b = sp.blur;
  out[0] = b.kind == KernelKind::gaussian ? 1.0 : 0.0;
  out[1] = b.kind == KernelKind::sinc ? 1.0 : 0.0;
  out[2] = enc_range(b.size, t.ks_min, t.ks_max, "kernel size");
  if (b.kind == KernelKind::sinc) {
    out[3] = out[4] = out[5] = out[6] = 0.0;
    out[7] = enc_range(b.omega_c, t.omega_min, t.omega_max, "omega_c");
  } else {
    out[3] = enc_range(b.sigma_x, t.sigma_min, t.sigma_max, "sigma_x");
    out[4] = enc_range(b.sigma_y, t.sigma_min, t.sigma_max, "sigma_y");
    out[5] = enc_range(b.theta, t.theta_min, t.theta_max, "theta");
    out[6] = enc_range(b.beta, t.beta_min, t.beta_max, "beta");
    out[7] = 0.0;
  }
  out[8] = sp.resize.mode == ResizeMode::area ? 1.0 : 0.0;
  out[9] = sp.resize.mode == ResizeMode::bilinear ? 1.0 : 0.0;
  out[10] = sp.resize.mode == ResizeMode::bicubic ? 1.0 : 0.0;
  out[11] = enc_range(sp.resize.scale, t.scale_min, t.scale_max, "resize scale");
  out[12] = sp.noise.gaussian_type ? 1.0 : 0.0;
  out[13] = sp.noise.rgb ? 1.0 : 0.0;
  out[14] = sp.noise.gaussian_type ? enc_range(sp.noise.sigma_g, t.sigma_g_min, t.sigma_g_max, "sigma_g") : 0.0;
  out[15] = sp.noise.gaussian_type ? 0.0 : enc_range(sp.noise.lambda, t.lambda_min, t.lambda_max, "lambda");
  out[16] = sp.jpeg.compressed ? 1.0 : 0.0;
  out[17] = enc_range(sp.jpeg.quality, t.q_min, t.q_max, "jpeg quality");
}

StageParams decode_stage(const double* v, const ThetaTable& t, int stage_index,
                         std::vector<std::string>& repairs) {
  auto note = [&](const std::string& msg) {
    repairs.push_back("stage" + std::to_string(stage_index) + ": " + msg);
  };

  StageParams sp;
  const bool kg = v[0] > 0.5, kc = v[1] > 0.5;
  KernelKind kind;
  if (kg && kc) {
    kind = KernelKind::gaussian;
    note("kernel type bits (1,1) are invalid; repaired to gaussian");
  } else if (kg) {
    kind = KernelKind::gaussian;
  } else if (kc) {
    kind = KernelKind::sinc;
  } else {
    kind = KernelKind::plateau;
  }

  const double ks_cont = dec_range(v[2], t.ks_min, t.ks_max);
  int size = static_cast<int>(t.ks_min) + 2 * static_cast<int>(std::lround((ks_cont - t.ks_min) / 2.0));
  size = std::clamp(size, static_cast<int>(t.ks_min), static_cast<int>(t.ks_max));

  if (kind == KernelKind::sinc) {
    double wc = dec_range(v[7], t.omega_min, t.omega_max);
    if (wc < 0.01 * kPi) {
      wc = 0.01 * kPi;
      note("sinc cutoff at or below zero; repaired to 0.01*pi");
    }
    if (std::fabs(v[3]) + std::fabs(v[4]) + std::fabs(v[5]) + std::fabs(v[6]) > 1e-6)
      note("sinc kernel: nonzero sigma/theta/beta slots zeroed");
    sp.blur = BlurKernelSpec::sinc(size, wc);
  } else {
    const double sx = dec_range(v[3], t.sigma_min, t.sigma_max);
    const double sy = dec_range(v[4], t.sigma_min, t.sigma_max);
    const double th = dec_range(v[5], t.theta_min, t.theta_max);
    double beta = dec_range(v[6], t.beta_min, t.beta_max);
    if (kind == KernelKind::gaussian)
      sp.blur = BlurKernelSpec::gaussian(size, sx, sy, th, beta);
    else
      sp.blur = BlurKernelSpec::plateau(size, sx, sy, th, beta);
    if (std::fabs(v[7]) > 1e-6) note("non-sinc kernel: nonzero omega_c slot zeroed");
  }

  const int mode_idx = static_cast<int>(std::max_element(v + 8, v + 11) - (v + 8));
  sp.resize.mode = mode_idx == 0 ? ResizeMode::area : mode_idx == 1 ? ResizeMode::bilinear : ResizeMode::bicubic;
  sp.resize.scale = dec_range(v[11], t.scale_min, t.scale_max);

  sp.noise.gaussian_type = v[12] > 0.5;
  sp.noise.rgb = v[13] > 0.5;
  if (sp.noise.gaussian_type) {
    sp.noise.sigma_g = dec_range(v[14], t.sigma_g_min, t.sigma_g_max);
    sp.noise.lambda = 0.0;
    if (std::fabs(v[15]) > 1e-6) note("gaussian noise: nonzero lambda slot zeroed");
  } else {
    sp.noise.lambda = dec_range(v[15], t.lambda_min, t.lambda_max);
    sp.noise.sigma_g = 0.0;
    if (std::fabs(v[14]) > 1e-6) note("poisson noise: nonzero sigma_g slot zeroed");
  }

  sp.jpeg.compressed = v[16] > 0.5;
  if (sp.jpeg.compressed) {
    int q = static_cast<int>(std::lround(dec_range(v[17], t.q_min, t.q_max)));
    if (q > 99) {
      q = 99;
      note("compressed jpeg quality 100 repaired to 99");
    }
    sp.jpeg.quality = std::clamp(q, 1, 99);
  } else {
    sp.jpeg.quality = 100;
    if (v[17] < 1.0 - 1e-6) note("uncompressed jpeg: quality slot repaired to 100");
  }
  return sp;
}

}  // namespace

ThetaVector encode_theta(const DegradationParams& params, const ThetaTable& table) {
  params.validate();
  ThetaVector v{};
  encode_stage(params.stage1, table, v.data());
  encode_stage(params.stage2, table, v.data() + kStageDim);
  return v;
}

DecodedTheta decode_theta(std::span<const double> v, int target_sr_scale, const ThetaTable& table) {
  if (v.size() != kThetaDim) throw std::invalid_argument("decode_theta: expected 36 entries");
  DecodedTheta out;
  out.params.stage1 = decode_stage(v.data(), table, 1, out.repairs);
  out.params.stage2 = decode_stage(v.data() + kStageDim, table, 2, out.repairs);
  out.params.target_sr_scale = target_sr_scale;
  return out;
}

// --- degradation presets -------------------------------------------------------

std::string to_string(DegradationPreset p) {
  switch (p) {
    case DegradationPreset::blurry_x2: return "blurry_x2";
    case DegradationPreset::blurry_x4: return "blurry_x4";
    case DegradationPreset::real_x2: return "real_x2";
    case DegradationPreset::real_x4: return "real_x4";
  }
  return "?";
}

DegradationPreset degradation_preset_from_string(const std::string& s) {
  if (s == "blurry_x2") return DegradationPreset::blurry_x2;
  if (s == "blurry_x4") return DegradationPreset::blurry_x4;
  if (s == "real_x2") return DegradationPreset::real_x2;
  if (s == "real_x4") return DegradationPreset::real_x4;
  throw std::invalid_argument("unknown degradation preset: " + s);
}

PresetTraits preset_traits(DegradationPreset p) {
  switch (p) {
    case DegradationPreset::blurry_x2: return {2, true, 0.25};
    case DegradationPreset::blurry_x4: return {4, true, 0.25};
    case DegradationPreset::real_x2: return {2, false, 0.25};
    case DegradationPreset::real_x4: return {4, false, 0.25};
  }
  return {};
}

namespace {

StageParams sample_real_stage(KernelPreset kp, Rng& rng) {
  StageParams sp;
  sp.blur = sample_kernel_spec(kp, rng);
  const int mode = rng.uniform_int(0, 2);
  sp.resize.mode = mode == 0 ? ResizeMode::area : mode == 1 ? ResizeMode::bilinear : ResizeMode::bicubic;
  sp.resize.scale = kp == KernelPreset::real_stage1 ? rng.uniform(0.15, 1.5) : rng.uniform(0.3, 1.2);
  sp.noise.gaussian_type = rng.bernoulli(0.5);
  sp.noise.rgb = !rng.bernoulli(0.4);
  if (sp.noise.gaussian_type) {
    sp.noise.sigma_g = rng.uniform(0.002, 0.1);
    sp.noise.lambda = 0.0;
  } else {
    sp.noise.lambda = rng.uniform(0.05, 1.0);
    sp.noise.sigma_g = 0.0;
  }
  sp.jpeg.compressed = rng.bernoulli(0.75);
  sp.jpeg.quality = sp.jpeg.compressed ? rng.uniform_int(30, 95) : 100;
  return sp;
}

}  // namespace

DegradationParams sample_degradation(DegradationPreset preset, Rng& rng) {
  const auto traits = preset_traits(preset);
  DegradationParams p;
  p.target_sr_scale = traits.sr_scale;
  if (traits.blurry) {
    p.stage1 = StageParams::identity();
    p.stage1.blur = sample_kernel_spec(
        traits.sr_scale == 2 ? KernelPreset::blurry_x2 : KernelPreset::blurry_x4, rng);
    p.stage2 = StageParams::identity();
  } else {
    p.stage1 = sample_real_stage(KernelPreset::real_stage1, rng);
    p.stage2 = sample_real_stage(KernelPreset::real_stage2, rng);
  }
  p.validate();
  return p;
}

// --- JSON ------------------------------------------------------------------------

namespace {

nlohmann::json blur_to_json(const BlurKernelSpec& b) {
  return {{"kind", to_string(b.kind)}, {"size", b.size},       {"sigma_x", b.sigma_x},
          {"sigma_y", b.sigma_y},      {"theta", b.theta},     {"beta", b.beta},
          {"omega_c", b.omega_c}};
}

BlurKernelSpec blur_from_json(const nlohmann::json& j) {
  BlurKernelSpec b;
  b.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
  b.size = j.at("size").get<int>();
  b.sigma_x = j.at("sigma_x").get<double>();
  b.sigma_y = j.at("sigma_y").get<double>();
  b.theta = j.at("theta").get<double>();
  b.beta = j.at("beta").get<double>();
  b.omega_c = j.at("omega_c").get<double>();
  b.validate();
  return b;
}

nlohmann::json stage_to_json(const StageParams& sp) {
  return {{"blur", blur_to_json(sp.blur)},
          {"resize", {{"mode", to_string(sp.resize.mode)}, {"scale", sp.resize.scale}}},
          {"noise",
           {{"gaussian_type", sp.noise.gaussian_type},
            {"rgb", sp.noise.rgb},
            {"sigma_g", sp.noise.sigma_g},
            {"lambda", sp.noise.lambda}}},
          {"jpeg", {{"compressed", sp.jpeg.compressed}, {"quality", sp.jpeg.quality}}}};
}

StageParams stage_from_json(const nlohmann::json& j) {
  StageParams sp;
  sp.blur = blur_from_json(j.at("blur"));
  sp.resize.mode = resize_mode_from_string(j.at("resize").at("mode").get<std::string>());
  sp.resize.scale = j.at("resize").at("scale").get<double>();
  sp.noise.gaussian_type = j.at("noise").at("gaussian_type").get<bool>();
  sp.noise.rgb = j.at("noise").at("rgb").get<bool>();
  sp.noise.sigma_g = j.at("noise").at("sigma_g").get<double>();
  sp.noise.lambda = j.at("noise").at("lambda").get<double>();
  sp.jpeg.compressed = j.at("jpeg").at("compressed").get<bool>();
  sp.jpeg.quality = j.at("jpeg").at("quality").get<int>();
  sp.validate();
  return sp;
}

}  // namespace

std::string degradation_params_to_json(const DegradationParams& p) {
  const auto theta = encode_theta(p);
  nlohmann::json j = {{"target_sr_scale", p.target_sr_scale},
                      {"stage1", stage_to_json(p.stage1)},
                      {"stage2", stage_to_json(p.stage2)},
                      {"theta_vector", std::vector<double>(theta.begin(), theta.end())}};
  return j.dump(2);
}

DegradationParams degradation_params_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DegradationParams p;
  p.target_sr_scale = j.at("target_sr_scale").get<int>();
  p.stage1 = stage_from_json(j.at("stage1"));
  p.stage2 = stage_from_json(j.at("stage2"));
  p.validate();
  return p;
}

}  // namespace dansr
