#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dansr/degrade.hpp"
#include "dansr/image.hpp"

namespace dansr {

/// Luma (Y') of the BT.601 YCbCr transform. Default is the studio-swing
/// convention used by SR-literature PSNR: Y = (65.481 R + 128.553 G +
/// 24.966 B + 16) / 255 on [0,1] inputs. full_range switches to the
/// JFIF full-swing weights.
Image rgb_to_y(const Image& img, bool full_range = false);

enum class PsnrMode { y_channel, rgb };

/// 10*log10(1 / MSE) on [0,1] data; identical inputs return +infinity.
/// shave crops a border of N pixels from both images first.
double psnr(const Image& a, const Image& b, PsnrMode mode = PsnrMode::y_channel, int shave = 0);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01,
/// K2=0.03, L=1, averaged over valid window positions on the Y channel
/// (or the raw plane for single-channel input).
double ssim(const Image& a, const Image& b, PsnrMode mode = PsnrMode::y_channel);

/// Mean squared entrywise difference after center alignment; kernels of
/// different odd sizes are zero-padded to the larger one.
double kernel_mse(const KernelMatrix& k_hat, const KernelMatrix& k_gt);

/// PSNR between the stored LR and the LR regenerated by blurring and
/// decimating the HR with the estimated kernel.
double lr_psnr(const Image& hr, const Image& lr, const KernelMatrix& k_hat, int s);

struct EvalRow {
  int id = 0;
  double psnr_db = 0;
  double ssim_val = 0;
  double psnr_bicubic_db = 0;
  double theta_mse = 0;
  std::optional<double> kernel_mse_val;
  std::optional<double> lr_psnr_db;
};

struct EvalAggregate {
  double mean = 0, stddev = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  EvalAggregate psnr_agg, ssim_agg, psnr_bicubic_agg, theta_mse_agg;
  std::optional<EvalAggregate> kernel_mse_agg, lr_psnr_agg;
  std::string checkpoint_hash;
  std::string config_hash;
  bool used_gt_degradation = false;
  int iterations = 0;

  std::string to_json() const;
  std::string to_csv() const;
};

EvalAggregate aggregate(const std::vector<double>& xs);

}  // namespace dansr
