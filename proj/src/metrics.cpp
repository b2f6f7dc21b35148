#include "dansr/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dansr {

Image rgb_to_y(const Image& img, bool full_range) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw std::invalid_argument("rgb_to_y: expected 1 or 3 channels");
  Image y(1, img.height, img.width);
  for (int py = 0; py < img.height; ++py)
    for (int px = 0; px < img.width; ++px) {
      const double r = img.at(0, py, px), g = img.at(1, py, px), b = img.at(2, py, px);
      y.at(0, py, px) = full_range ? 0.299 * r + 0.587 * g + 0.114 * b
                                   : (65.481 * r + 128.553 * g + 24.966 * b + 16.0) / 255.0;
    }
  return y;
}

namespace {

Image shaved(const Image& img, int shave) {
  if (shave <= 0) return img;
  const int h = img.height - 2 * shave, w = img.width - 2 * shave;
  if (h < 1 || w < 1) throw std::invalid_argument("psnr: shave leaves no pixels");
  Image out(img.channels, h, w);
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y + shave, x + shave);
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, PsnrMode mode, int shave) {
  if (!a.same_dims(b)) throw std::invalid_argument("psnr: dimension mismatch");
  Image pa = mode == PsnrMode::y_channel ? rgb_to_y(a) : a;
  Image pb = mode == PsnrMode::y_channel ? rgb_to_y(b) : b;
  pa = shaved(pa, shave);
  pb = shaved(pb, shave);
  double mse = 0.0;
  for (size_t i = 0; i < pa.v.size(); ++i) {
    const double d = pa.v[i] - pb.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(pa.v.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b, PsnrMode mode) {
  if (!a.same_dims(b)) throw std::invalid_argument("ssim: dimension mismatch");
  const Image pa = mode == PsnrMode::y_channel ? rgb_to_y(a) : a;
  const Image pb = mode == PsnrMode::y_channel ? rgb_to_y(b) : b;

  constexpr int W = 11, R = 5;
  constexpr double kC1 = 0.01 * 0.01, kC2 = 0.03 * 0.03;
  static const auto window = [] {
    constexpr double kSigma = 1.5;
    std::array<double, W * W> w{};
    double sum = 0.0;
    for (int i = -R; i <= R; ++i)
      for (int j = -R; j <= R; ++j) {
        const double g = std::exp(-(i * i + j * j) / (2.0 * kSigma * kSigma));
        w[(i + R) * W + (j + R)] = g;
        sum += g;
      }
    for (auto& x : w) x /= sum;
    return w;
  }();

  if (pa.height < W || pa.width < W) throw std::invalid_argument("ssim: image smaller than window");

  double total = 0.0;
  int count = 0;
  for (int c = 0; c < pa.channels; ++c)
    for (int y = R; y < pa.height - R; ++y)
      for (int x = R; x < pa.width - R; ++x) {
        double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
        for (int i = -R; i <= R; ++i)
          for (int j = -R; j <= R; ++j) {
            const double w = window[(i + R) * W + (j + R)];
            const double va = pa.at(c, y + i, x + j);
            const double vb = pb.at(c, y + i, x + j);
            mu_a += w * va;
            mu_b += w * vb;
            aa += w * va * va;
            bb += w * vb * vb;
            ab += w * va * vb;
          }
        const double var_a = aa - mu_a * mu_a;
        const double var_b = bb - mu_b * mu_b;
        const double cov = ab - mu_a * mu_b;
        total += ((2 * mu_a * mu_b + kC1) * (2 * cov + kC2)) /
                 ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
        ++count;
      }
  return total / count;
}

double kernel_mse(const KernelMatrix& k_hat, const KernelMatrix& k_gt) {
  const int size = std::max(k_hat.size, k_gt.size);
  const int r = (size - 1) / 2;
  double acc = 0.0;
  for (int i = -r; i <= r; ++i)
    for (int j = -r; j <= r; ++j) {
      const double a =
          std::abs(i) <= k_hat.radius() && std::abs(j) <= k_hat.radius() ? k_hat.at(i, j) : 0.0;
      const double b =
          std::abs(i) <= k_gt.radius() && std::abs(j) <= k_gt.radius() ? k_gt.at(i, j) : 0.0;
      acc += (a - b) * (a - b);
    }
  return acc / (static_cast<double>(size) * size);
}

double lr_psnr(const Image& hr, const Image& lr, const KernelMatrix& k_hat, int s) {
  return psnr(degrade_blurry(hr, k_hat, s), lr);
}

EvalAggregate aggregate(const std::vector<double>& xs) {
  EvalAggregate a;
  if (xs.empty()) return a;
  for (double x : xs) a.mean += x;
  a.mean /= static_cast<double>(xs.size());
  for (double x : xs) a.stddev += (x - a.mean) * (x - a.mean);
  a.stddev = std::sqrt(a.stddev / static_cast<double>(xs.size()));
  return a;
}

namespace {

nlohmann::json finite_or_string(double x) {
  if (std::isinf(x)) return x > 0 ? nlohmann::json("inf") : nlohmann::json("-inf");
  if (std::isnan(x)) return "nan";
  return x;
}

nlohmann::json agg_json(const EvalAggregate& a) {
  return {{"mean", finite_or_string(a.mean)}, {"stddev", finite_or_string(a.stddev)}};
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = {{"id", r.id},
                          {"psnr", finite_or_string(r.psnr_db)},
                          {"ssim", finite_or_string(r.ssim_val)},
                          {"psnr_bicubic", finite_or_string(r.psnr_bicubic_db)},
                          {"theta_mse", finite_or_string(r.theta_mse)}};
    if (r.kernel_mse_val) row["kernel_mse"] = finite_or_string(*r.kernel_mse_val);
    if (r.lr_psnr_db) row["lr_psnr"] = finite_or_string(*r.lr_psnr_db);
    rows_json.push_back(row);
  }
  nlohmann::json j = {{"rows", rows_json},
                      {"aggregates",
                       {{"psnr", agg_json(psnr_agg)},
                        {"ssim", agg_json(ssim_agg)},
                        {"psnr_bicubic", agg_json(psnr_bicubic_agg)},
                        {"theta_mse", agg_json(theta_mse_agg)}}},
                      {"checkpoint_hash", checkpoint_hash},
                      {"config_hash", config_hash},
                      {"used_gt_degradation", used_gt_degradation},
                      {"iterations", iterations}};
  if (kernel_mse_agg) j["aggregates"]["kernel_mse"] = agg_json(*kernel_mse_agg);
  if (lr_psnr_agg) j["aggregates"]["lr_psnr"] = agg_json(*lr_psnr_agg);
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "id,psnr,ssim,psnr_bicubic,theta_mse,kernel_mse,lr_psnr\n";
  for (const auto& r : rows) {
    os << r.id << ',' << r.psnr_db << ',' << r.ssim_val << ',' << r.psnr_bicubic_db << ','
       << r.theta_mse << ',';
    if (r.kernel_mse_val) os << *r.kernel_mse_val;
    os << ',';
    if (r.lr_psnr_db) os << *r.lr_psnr_db;
    os << '\n';
  }
  return os.str();
}

}  // namespace dansr
