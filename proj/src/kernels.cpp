#include "dansr/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace dansr {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::plateau: return "plateau";
    case KernelKind::sinc: return "sinc";
  }
  return "?";
}

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "gaussian") return KernelKind::gaussian;
  if (s == "plateau") return KernelKind::plateau;
  if (s == "sinc") return KernelKind::sinc;
  throw std::invalid_argument("unknown kernel kind: " + s);
}

BlurKernelSpec BlurKernelSpec::gaussian(int size, double sx, double sy, double theta, double beta) {
  BlurKernelSpec s{KernelKind::gaussian, size, sx, sy, theta, beta, 0.0};
  s.validate();
  return s;
}

BlurKernelSpec BlurKernelSpec::plateau(int size, double sx, double sy, double theta, double beta) {
  BlurKernelSpec s{KernelKind::plateau, size, sx, sy, theta, beta, 0.0};
  s.validate();
  return s;
}

BlurKernelSpec BlurKernelSpec::sinc(int size, double omega_c) {
  BlurKernelSpec s{KernelKind::sinc, size, 0.0, 0.0, 0.0, 0.0, omega_c};
  s.validate();
  return s;
}

void BlurKernelSpec::validate() const {
  if (size < 3 || size % 2 == 0) throw std::invalid_argument("kernel size must be odd and >= 3");
  if (kind == KernelKind::sinc) {
    if (!(omega_c > 0.0 && omega_c <= kPi))
      throw std::invalid_argument("sinc cutoff must be in (0, pi]");
    if (sigma_x != 0.0 || sigma_y != 0.0 || theta != 0.0 || beta != 0.0)
      throw std::invalid_argument("sinc spec must store sigma_x=sigma_y=theta=beta=0");
  } else {
    if (!(sigma_x > 0.0 && sigma_y > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
    if (theta < -kPi || theta > kPi) throw std::invalid_argument("theta must be in [-pi, pi]");
    if (omega_c != 0.0) throw std::invalid_argument("gaussian/plateau spec must store omega_c=0");
  }
}

double KernelMatrix::sum() const {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

// --- Bessel J1 ---------------------------------------------------------
//
// |x| < 12: power series J1(x) = sum_{m>=0} (-1)^m / (m! (m+1)!) (x/2)^{2m+1}.
// 30 terms; the tail term at |x|=12 is ~3e-18 and cancellation keeps the
// absolute error below ~1e-11.
//
// |x| >= 12: Hankel expansion J1(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),
// chi = x - 3pi/4, with P/Q the asymptotic series in 1/x truncated at the
// smallest term; at x=12 the smallest term is below 1e-10.
double bessel_j1(double x) {
  const double ax = std::fabs(x);
  double result;
  if (ax < 12.0) {
    const double half = ax / 2.0;
    const double h2 = half * half;
    double term = half;  // m = 0: (x/2) / (0! 1!)
    double sum = term;
    for (int m = 1; m < 30; ++m) {
      term *= -h2 / (static_cast<double>(m) * (m + 1));
      sum += term;
    }
    result = sum;
  } else {
    const double mu = 4.0;  // 4*nu^2 for nu = 1
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= 40; ++m) {
      const double odd = 2.0 * m - 1.0;
      term *= (mu - odd * odd) / (8.0 * m * ax);
      if (std::fabs(term) >= prev) break;  // asymptotic series: stop at smallest term
      prev = std::fabs(term);
      const int rem = m % 4;
      if (rem == 1) q += term;
      else if (rem == 2) p -= term;
      else if (rem == 3) q -= term;
      else p += term;
      if (std::fabs(term) < 1e-17) break;
    }
    const double chi = ax - 0.75 * kPi;
    result = std::sqrt(2.0 / (kPi * ax)) * (p * std::cos(chi) - q * std::sin(chi));
  }
  return x < 0.0 ? -result : result;
}

// --- analytic kernels --------------------------------------------------

namespace {

struct InverseCovariance {
  double a, b, c;  // quadratic form a*i^2 + 2*b*i*j + c*j^2
};

InverseCovariance inverse_covariance(double sx, double sy, double theta) {
  // Sigma = Rot(theta) diag(sx^2, sy^2) Rot(theta)^T, inverted in closed form.
  const double ct = std::cos(theta), st = std::sin(theta);
  const double s00 = ct * ct * sx * sx + st * st * sy * sy;
  const double s01 = ct * st * (sx * sx - sy * sy);
  const double s11 = st * st * sx * sx + ct * ct * sy * sy;
  const double det = s00 * s11 - s01 * s01;
  return {s11 / det, -s01 / det, s00 / det};
}

template <typename F>
KernelMatrix fill_centered(int size, F&& f) {
  KernelMatrix k(size);
  const int r = k.radius();
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j) k.at(i, j) = f(i, j);
  return k;
}

void check_shape_params(double sx, double sy, double beta, int size) {
  if (size < 3 || size % 2 == 0) throw std::invalid_argument("kernel size must be odd and >= 3");
  if (!(sx > 0.0 && sy > 0.0)) throw std::invalid_argument("sigma must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
}

}  // namespace

KernelMatrix synth_gaussian_kernel_raw(double sx, double sy, double theta, double beta, int size) {
  check_shape_params(sx, sy, beta, size);
  const auto ic = inverse_covariance(sx, sy, theta);
  return fill_centered(size, [&](int i, int j) {
    const double q = ic.a * i * i + 2.0 * ic.b * i * j + ic.c * j * j;
    return std::exp(-0.5 * std::pow(q, beta));
  });
}

KernelMatrix synth_plateau_kernel_raw(double sx, double sy, double theta, double beta, int size) {
  check_shape_params(sx, sy, beta, size);
  const auto ic = inverse_covariance(sx, sy, theta);
  return fill_centered(size, [&](int i, int j) {
    const double q = ic.a * i * i + 2.0 * ic.b * i * j + ic.c * j * j;
    return 1.0 / (1.0 + std::pow(q, beta));
  });
}

KernelMatrix synth_sinc_kernel_raw(double omega_c, int size) {
  if (size < 3 || size % 2 == 0) throw std::invalid_argument("kernel size must be odd and >= 3");
  if (!(omega_c > 0.0 && omega_c <= kPi))
    throw std::invalid_argument("sinc cutoff must be in (0, pi]");
  return fill_centered(size, [&](int i, int j) {
    if (i == 0 && j == 0) return omega_c * omega_c / (4.0 * kPi);  // analytic r->0 limit
    const double r = std::sqrt(static_cast<double>(i) * i + static_cast<double>(j) * j);
    return omega_c / (2.0 * kPi * r) * bessel_j1(omega_c * r);
  });
}

KernelMatrix synth_gaussian_kernel(double sx, double sy, double theta, double beta, int size) {
  return normalize_kernel(synth_gaussian_kernel_raw(sx, sy, theta, beta, size));
}

KernelMatrix synth_plateau_kernel(double sx, double sy, double theta, double beta, int size) {
  return normalize_kernel(synth_plateau_kernel_raw(sx, sy, theta, beta, size));
}

KernelMatrix synth_sinc_kernel(double omega_c, int size) {
  return normalize_kernel(synth_sinc_kernel_raw(omega_c, size));
}

KernelMatrix normalize_kernel(KernelMatrix k) {
  const double s = k.sum();
  if (std::fabs(s) < 1e-12) throw std::runtime_error("normalize_kernel: degenerate zero-sum kernel");
  for (auto& x : k.w) x /= s;
  return k;
}

KernelMatrix apply_kernel_noise(const KernelMatrix& k, double strength, Rng& rng) {
  if (strength < 0.0 || strength > 1.0)
    throw std::invalid_argument("kernel noise strength must be in [0, 1]");
  if (strength == 0.0) return k;
  KernelMatrix out = k;
  for (auto& x : out.w) x *= 1.0 + strength * (2.0 * rng.uniform() - 1.0);
  return normalize_kernel(std::move(out));
}

// --- preset sampling ----------------------------------------------------

std::string to_string(KernelPreset p) {
  switch (p) {
    case KernelPreset::blurry_x2: return "blurry_x2";
    case KernelPreset::blurry_x4: return "blurry_x4";
    case KernelPreset::real_stage1: return "real_stage1";
    case KernelPreset::real_stage2: return "real_stage2";
  }
  return "?";
}

KernelPreset kernel_preset_from_string(const std::string& s) {
  if (s == "blurry_x2") return KernelPreset::blurry_x2;
  if (s == "blurry_x4") return KernelPreset::blurry_x4;
  if (s == "real_stage1") return KernelPreset::real_stage1;
  if (s == "real_stage2") return KernelPreset::real_stage2;
  throw std::invalid_argument("unknown kernel preset: " + s);
}

namespace {

// Fold into the canonical (sigma_x >= sigma_y, theta in [-pi/2, pi/2)) form.
void canonicalize_anisotropy(double& sx, double& sy, double& theta) {
  if (sx < sy) {
    std::swap(sx, sy);
    theta += kPi / 2.0;
  }
  while (theta >= kPi / 2.0) theta -= kPi;
  while (theta < -kPi / 2.0) theta += kPi;
}

}  // namespace

BlurKernelSpec sample_kernel_spec(KernelPreset preset, Rng& rng) {
  if (preset == KernelPreset::blurry_x2 || preset == KernelPreset::blurry_x4) {
    const int size = preset == KernelPreset::blurry_x2 ? 11 : 31;
    double sx = rng.uniform(0.6, 5.0);
    double sy = rng.uniform(0.6, 5.0);
    double theta = rng.uniform(-kPi, kPi);
    canonicalize_anisotropy(sx, sy, theta);
    return BlurKernelSpec::gaussian(size, sx, sy, theta, 1.0);
  }

  // real-world presets
  const double sigma_hi = preset == KernelPreset::real_stage1 ? 3.0 : 1.5;
  const int size = 7 + 2 * rng.uniform_int(0, 7);  // odd in {7, ..., 21}
  const double kind_draw = rng.uniform();
  if (kind_draw < 0.7) {
    double sx = rng.uniform(0.2, sigma_hi);
    double sy = rng.uniform(0.2, sigma_hi);
    double theta = rng.uniform(-kPi, kPi);
    const double beta = rng.uniform(0.5, 4.0);
    canonicalize_anisotropy(sx, sy, theta);
    return BlurKernelSpec::gaussian(size, sx, sy, theta, beta);
  }
  if (kind_draw < 0.85) {
    double sx = rng.uniform(0.2, sigma_hi);
    double sy = rng.uniform(0.2, sigma_hi);
    double theta = rng.uniform(-kPi, kPi);
    const double beta = rng.uniform(1.0, 2.0);
    canonicalize_anisotropy(sx, sy, theta);
    return BlurKernelSpec::plateau(size, sx, sy, theta, beta);
  }
  const double omega_c = rng.uniform(kPi / 3.0, kPi);
  return BlurKernelSpec::sinc(size, omega_c);
}

KernelMatrix kernel_from_spec(const BlurKernelSpec& spec, double kernel_noise_strength, Rng& rng,
                              bool noise_on_sinc) {
  spec.validate();
  KernelMatrix k;
  switch (spec.kind) {
    case KernelKind::gaussian:
      k = synth_gaussian_kernel(spec.sigma_x, spec.sigma_y, spec.theta, spec.beta, spec.size);
      break;
    case KernelKind::plateau:
      k = synth_plateau_kernel(spec.sigma_x, spec.sigma_y, spec.theta, spec.beta, spec.size);
      break;
    case KernelKind::sinc:
      k = synth_sinc_kernel(spec.omega_c, spec.size);
      break;
  }
  const bool want_noise =
      kernel_noise_strength > 0.0 && (spec.kind != KernelKind::sinc || noise_on_sinc);
  if (want_noise) k = apply_kernel_noise(k, kernel_noise_strength, rng);
  return k;
}

KernelMoments kernel_second_moments(const KernelMatrix& k) {
  KernelMoments m;
  const int r = k.radius();
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j) {
      const double w = k.at(i, j);
      m.mxx += w * i * i;
      m.myy += w * j * j;
      m.mxy += w * i * j;
    }
  return m;
}

// --- export -------------------------------------------------------------

void write_kernel_text(const std::filesystem::path& path, const KernelMatrix& k) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_kernel_text: cannot open " + path.string());
  f << std::setprecision(17);
  for (int row = 0; row < k.size; ++row) {
    for (int col = 0; col < k.size; ++col) {
      if (col) f << ' ';
      f << k.w[static_cast<size_t>(row) * k.size + col];
    }
    f << '\n';
  }
}

KernelMatrix read_kernel_text(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_kernel_text: cannot open " + path.string());
  std::vector<double> vals;
  double x;
  while (f >> x) vals.push_back(x);
  const int size = static_cast<int>(std::lround(std::sqrt(static_cast<double>(vals.size()))));
  if (size < 1 || static_cast<size_t>(size) * size != vals.size())
    throw std::runtime_error("read_kernel_text: not a square grid");
  KernelMatrix k(size);
  k.w = std::move(vals);
  return k;
}

void write_kernel_pgm(const std::filesystem::path& path, const KernelMatrix& k) {
  double maxw = 0.0;
  for (double x : k.w) maxw = std::max(maxw, x);
  if (maxw <= 0.0) maxw = 1.0;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_kernel_pgm: cannot open " + path.string());
  f << "P5\n" << k.size << " " << k.size << "\n255\n";
  for (double x : k.w) {
    const double q = std::round(255.0 * std::clamp(x / maxw, 0.0, 1.0));
    const char byte = static_cast<char>(static_cast<unsigned char>(q));
    f.write(&byte, 1);
  }
}

}  // namespace dansr
