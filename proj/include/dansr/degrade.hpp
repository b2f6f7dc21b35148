#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dansr/image.hpp"
#include "dansr/kernels.hpp"
#include "dansr/rng.hpp"

namespace dansr {

enum class ResizeMode { area, bilinear, bicubic };

std::string to_string(ResizeMode m);
ResizeMode resize_mode_from_string(const std::string& s);

struct ResizeSpec {
  ResizeMode mode = ResizeMode::bicubic;
  double scale = 1.0;  // output/input size ratio, > 0
};

/// gaussian_type (n_t=1) carries sigma_g and zeroes lambda; poisson
/// (n_t=0) carries lambda and zeroes sigma_g.
struct NoiseSpec {
  bool gaussian_type = true;  // n_t
  bool rgb = true;            // n_c: 1 RGB, 0 gray
  double sigma_g = 0.0;       // std on [0,1]-scaled images
  double lambda = 0.0;        // poisson level; variance at value x is x*lambda

  void validate() const;
};

struct JpegSpec {
  bool compressed = false;  // j
  int quality = 100;        // j=1 => q in [1, 100), j=0 => q=100

  void validate() const;
};

struct StageParams {
  BlurKernelSpec blur;
  ResizeSpec resize;
  NoiseSpec noise;
  JpegSpec jpeg;

  /// The designated no-op stage: near-delta gaussian blur, area resize at
  /// scale one, zero gaussian noise, no compression.
  static StageParams identity();
  void validate() const;
};

struct DegradationParams {
  StageParams stage1;
  StageParams stage2;
  int target_sr_scale = 2;  // in {2, 4}

  static DegradationParams null_params(int scale);
  void validate() const;
};

// --- pixel-level operations ----------------------------------------------

/// Per-channel 2-D correlation with reflect-101 borders, same output size.
/// The synthesized kernels are point-symmetric, so this equals convolution
/// for them; the same orientation convention is used everywhere.
Image convolve2d(const Image& img, const KernelMatrix& kernel);

/// area = box average over the source footprint; bilinear = tent with
/// half-pixel centers; bicubic = Keys cubic (a = -0.5) with half-pixel
/// centers. Reflect-101 borders. Output dims = round(input * scale).
Image resize(const Image& img, const ResizeSpec& spec);
Image resize_to(const Image& img, ResizeMode mode, int out_h, int out_w);

/// Keep only the upper-left pixel of each distinct s x s patch.
Image downsample_s_fold(const Image& img, int s);

Image add_gaussian_noise(const Image& img, double sigma_g, bool rgb, Rng& rng);

/// Shot-noise model y = Poisson(x*v)/v with v = 1/lambda. Gray mode draws
/// one count per pixel from the luminance and applies it to all channels.
Image add_poisson_noise(const Image& img, double lambda, bool rgb, Rng& rng);

/// DCT-quantization roundtrip with the standard luma/chroma tables scaled
/// by the conventional quality mapping. Entropy coding is lossless and
/// omitted; chroma subsampling (4:2:0) is off unless requested.
Image jpeg_roundtrip(const Image& img, int quality, bool subsample_420 = false);

/// blur -> resize -> noise -> jpeg, in that order.
Image apply_stage(const Image& img, const StageParams& sp, Rng& rng, double kernel_noise_strength);

/// Both stages plus a final exact bicubic resize to (H/s, W/s).
Image degrade_two_stage(const Image& hr, const DegradationParams& params, Rng& rng,
                        double kernel_noise_strength);

/// The blur-then-decimate specialization: convolve2d then downsample_s_fold.
Image degrade_blurry(const Image& hr, const KernelMatrix& kernel, int s);

// --- theta codec -----------------------------------------------------------

inline constexpr int kThetaDim = 36;
inline constexpr int kStageDim = 18;

/// Affine normalization ranges for the continuous theta fields. The table
/// is versioned and its hash is embedded in manifests and checkpoints so a
/// model and its codec cannot drift apart.
struct ThetaTable {
  int version = 1;
  double ks_min = 3, ks_max = 31;
  double sigma_min = 0.1, sigma_max = 5.0;
  double theta_min = -3.14159265358979323846, theta_max = 3.14159265358979323846;
  double beta_min = 0.5, beta_max = 4.0;
  double omega_min = 0.0, omega_max = 3.14159265358979323846;
  double scale_min = 0.1, scale_max = 2.0;
  double sigma_g_min = 0.0, sigma_g_max = 0.2;
  double lambda_min = 0.0, lambda_max = 2.0;
  double q_min = 1, q_max = 100;

  std::string serialize() const;
  std::uint64_t hash() const;
  static const ThetaTable& v1();
};

using ThetaVector = std::array<double, kThetaDim>;

/// Continuous fields map affinely to [0,1] by the table ranges; discrete
/// fields are emitted as 0/1. Fields zeroed by a type invariant (sinc's
/// sigma/theta/beta, gaussian/plateau's omega_c, the off-type noise level)
/// emit exact 0. Throws when a field lies outside its declared range.
ThetaVector encode_theta(const DegradationParams& params, const ThetaTable& table = ThetaTable::v1());

struct DecodedTheta {
  DegradationParams params;
  std::vector<std::string> repairs;  // human-readable notes for each applied repair
};

/// Total inverse with invariant repair: bits threshold at 0.5, the resize
/// one-hot decodes by argmax, continuous entries clamp into range.
DecodedTheta decode_theta(std::span<const double> v, int target_sr_scale,
                          const ThetaTable& table = ThetaTable::v1());

enum class DegradationPreset { blurry_x2, blurry_x4, real_x2, real_x4 };

std::string to_string(DegradationPreset p);
DegradationPreset degradation_preset_from_string(const std::string& s);

struct PresetTraits {
  int sr_scale = 2;
  bool blurry = false;           // setting-1: blur + s-fold decimation only
  double kernel_noise = 0.25;    // multiplicative kernel noise strength
};
PresetTraits preset_traits(DegradationPreset p);

/// blurry presets: sampled gaussian kernel in stage1, identity elsewhere.
/// real presets: every field drawn from the documented ranges.
DegradationParams sample_degradation(DegradationPreset preset, Rng& rng);

// JSON (de)serialization mirroring the struct field names, plus the raw
// 36-vector. Implemented over nlohmann::json in degrade.cpp.
std::string degradation_params_to_json(const DegradationParams& p);
DegradationParams degradation_params_from_json(const std::string& text);

}  // namespace dansr
