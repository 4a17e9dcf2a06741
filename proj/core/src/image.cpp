#include "camreloc/image.hpp"

#include <algorithm>
#include <cmath>

namespace camreloc {

namespace {

std::vector<double> gaussian_taps(double sigma, int radius) {
  std::vector<double> taps(2 * radius + 1);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-static_cast<double>(i) * i * inv2s2);
  }
  return taps;
}

// One renormalized 1-D pass along x; transpose-free y pass mirrors it.
void blur_pass_x(const GrayImage& src, GrayImage& dst, const std::vector<double>& taps,
                 int radius) {
  const int w = src.width();
  const int h = src.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!src.valid(x, y)) {
        dst.at(x, y) = 0.0;
        dst.set_valid(x, y, false);
        continue;
      }
      double acc = 0.0;
      double wsum = 0.0;
      const int lo = std::max(-radius, -x);
      const int hi = std::min(radius, w - 1 - x);
      for (int i = lo; i <= hi; ++i) {
        if (!src.valid(x + i, y)) continue;
        const double t = taps[i + radius];
        acc += t * src.at(x + i, y);
        wsum += t;
      }
      dst.at(x, y) = acc / wsum;  // wsum > 0: the center pixel is valid
      dst.set_valid(x, y, true);
    }
  }
}

void blur_pass_y(const GrayImage& src, GrayImage& dst, const std::vector<double>& taps,
                 int radius) {
  const int w = src.width();
  const int h = src.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!src.valid(x, y)) {
        dst.at(x, y) = 0.0;
        dst.set_valid(x, y, false);
        continue;
      }
      double acc = 0.0;
      double wsum = 0.0;
      const int lo = std::max(-radius, -y);
      const int hi = std::min(radius, h - 1 - y);
      for (int i = lo; i <= hi; ++i) {
        if (!src.valid(x, y + i)) continue;
        const double t = taps[i + radius];
        acc += t * src.at(x, y + i);
        wsum += t;
      }
      dst.at(x, y) = acc / wsum;
      dst.set_valid(x, y, true);
    }
  }
}

double cubic_weight(double t) {
  // Catmull-Rom (Keys a = -0.5).
  const double at = std::abs(t);
  if (at <= 1.0) return 1.0 - at * at * (2.5 - 1.5 * at);
  if (at < 2.0) return 2.0 - at * (4.0 - at * (2.5 - 0.5 * at));
  return 0.0;
}

template <typename Fn>
GrayImage remap(const GrayImage& img, Fn&& fn) {
  GrayImage out = img;
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    if (out.mask()[i]) out.data()[i] = fn(out.data()[i]);
  }
  return out;
}

}  // namespace

GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
  if (sigma < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");
  }
  if (sigma == 0.0) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  const auto taps = gaussian_taps(sigma, radius);
  GrayImage tmp(img.width(), img.height());
  GrayImage out(img.width(), img.height());
  blur_pass_x(img, tmp, taps, radius);
  blur_pass_y(tmp, out, taps, radius);
  for (auto& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

double sample_bicubic(const GrayImage& img, double x, double y) {
  if (!bicubic_in_bounds(img, x, y)) {
    throw Error(ErrorCode::OutOfBounds, "bicubic sample outside safe margin");
  }
  int x0 = static_cast<int>(std::floor(x));
  int y0 = static_cast<int>(std::floor(y));
  // Keep the 4x4 window in bounds at the far edge (x == width-2 exactly).
  x0 = std::min(x0, img.width() - 3);
  y0 = std::min(y0, img.height() - 3);
  const double fx = x - x0;
  const double fy = y - y0;

  double wx[4], wy[4];
  for (int i = 0; i < 4; ++i) {
    wx[i] = cubic_weight(fx - (i - 1));
    wy[i] = cubic_weight(fy - (i - 1));
  }
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    double row = 0.0;
    for (int i = 0; i < 4; ++i) {
      row += wx[i] * img.at(x0 - 1 + i, y0 - 1 + j);
    }
    acc += wy[j] * row;
  }
  return acc;
}

GrayImage remap_gamma_binwise(const GrayImage& img, double gamma, int bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins must be >= 1");
  const double b = static_cast<double>(bins);
  return remap(img, [gamma, bins, b](double v) {
    int k = static_cast<int>(v * b);
    if (k >= bins) k = bins - 1;
    const double local = v * b - k;
    return (k + std::pow(local, gamma)) / b;
  });
}

GrayImage remap_brightness_contrast(const GrayImage& img, double gain, double bias) {
  return remap(img, [gain, bias](double v) { return std::clamp(gain * v + bias, 0.0, 1.0); });
}

GrayImage remap_invert(const GrayImage& img) {
  return remap(img, [](double v) { return 1.0 - v; });
}

GrayImage add_noise(const GrayImage& img, double stddev, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage out = img;
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    const double n = rng.normal(0.0, stddev);  // drawn per pixel, masked or not
    if (out.mask()[i]) out.data()[i] = std::clamp(out.data()[i] + n, 0.0, 1.0);
  }
  return out;
}

GrayImage quantize8(const GrayImage& img) {
  return remap(img, [](double v) {
    const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    return q / 255.0;
  });
}

}  // namespace camreloc
