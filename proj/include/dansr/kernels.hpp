#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dansr/rng.hpp"

namespace dansr {

enum class KernelKind { gaussian, plateau, sinc };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

/// Parameter record for one blur kernel. Fields that do not apply to the
/// kind are stored as zero: sinc kernels zero sigma_x/sigma_y/theta/beta,
/// gaussian and plateau kernels zero omega_c.
struct BlurKernelSpec {
  KernelKind kind = KernelKind::gaussian;
  int size = 3;          // odd, >= 3
  double sigma_x = 1.0;  // > 0 for gaussian/plateau
  double sigma_y = 1.0;
  double theta = 0.0;    // radians in [-pi, pi]
  double beta = 1.0;     // > 0, shape
  double omega_c = 0.0;  // (0, pi] for sinc

  static BlurKernelSpec gaussian(int size, double sx, double sy, double theta, double beta);
  static BlurKernelSpec plateau(int size, double sx, double sy, double theta, double beta);
  static BlurKernelSpec sinc(int size, double omega_c);

  void validate() const;  // throws std::invalid_argument on violations
};

/// Square kernel with integer coordinates centered at the midpoint:
/// i, j in [-(size-1)/2, (size-1)/2].
struct KernelMatrix {
  int size = 0;
  std::vector<double> w;  // row-major, w[(i+R)*size + (j+R)] with R = (size-1)/2

  KernelMatrix() = default;
  explicit KernelMatrix(int s) : size(s), w(static_cast<size_t>(s) * s, 0.0) {}

  int radius() const { return (size - 1) / 2; }
  double& at(int i, int j) { return w[static_cast<size_t>(i + radius()) * size + (j + radius())]; }
  double at(int i, int j) const { return w[static_cast<size_t>(i + radius()) * size + (j + radius())]; }
  double sum() const;
};

/// First-order Bessel function of the first kind. Power series (30 terms)
/// for |x| < 12, Hankel asymptotic expansion beyond; absolute error below
/// 1e-8 on |x| <= 100.
double bessel_j1(double x);

// Raw (pre-normalization) analytic kernels. The quadratic form uses the
// symmetrized covariance Rot(theta)*diag(sx^2, sy^2)*Rot(theta)^T.
KernelMatrix synth_gaussian_kernel_raw(double sigma_x, double sigma_y, double theta, double beta, int size);
KernelMatrix synth_plateau_kernel_raw(double sigma_x, double sigma_y, double theta, double beta, int size);
KernelMatrix synth_sinc_kernel_raw(double omega_c, int size);

// Sum-normalized kernels (the public synthesis surface).
KernelMatrix synth_gaussian_kernel(double sigma_x, double sigma_y, double theta, double beta, int size);
KernelMatrix synth_plateau_kernel(double sigma_x, double sigma_y, double theta, double beta, int size);
KernelMatrix synth_sinc_kernel(double omega_c, int size);

/// Scale weights so they sum to one. Throws on (near-)zero-sum kernels.
KernelMatrix normalize_kernel(KernelMatrix k);

/// Multiply each weight by an independent uniform factor in
/// [1-strength, 1+strength), then renormalize to sum one.
KernelMatrix apply_kernel_noise(const KernelMatrix& k, double strength, Rng& rng);

enum class KernelPreset { blurry_x2, blurry_x4, real_stage1, real_stage2 };

std::string to_string(KernelPreset p);
KernelPreset kernel_preset_from_string(const std::string& s);

/// Draw a kernel spec from a preset's documented distributions.
/// Gaussian/plateau draws are canonicalized to sigma_x >= sigma_y with
/// theta folded into [-pi/2, pi/2); the induced kernel distribution is
/// unchanged (the quadratic form is invariant under axis swap + 90deg
/// rotation and under theta -> theta + pi), but the spec-to-kernel map
/// becomes injective, which keeps parameter regression well-posed.
BlurKernelSpec sample_kernel_spec(KernelPreset preset, Rng& rng);

/// Synthesize the kernel for a spec, optionally apply multiplicative
/// noise, and normalize. Sinc kernels skip the noise unless
/// noise_on_sinc is set.
KernelMatrix kernel_from_spec(const BlurKernelSpec& spec, double kernel_noise_strength, Rng& rng,
                              bool noise_on_sinc = false);

struct KernelMoments {
  double mxx = 0, myy = 0, mxy = 0;  // second moments about the center
};
KernelMoments kernel_second_moments(const KernelMatrix& k);

/// Plain-text grid: one row per line, space-separated decimals.
void write_kernel_text(const std::filesystem::path& path, const KernelMatrix& k);
KernelMatrix read_kernel_text(const std::filesystem::path& path);

/// 8-bit PGM, max-normalized (negative lobes clamp to black).
void write_kernel_pgm(const std::filesystem::path& path, const KernelMatrix& k);

}  // namespace dansr
