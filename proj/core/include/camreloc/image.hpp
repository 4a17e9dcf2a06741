#pragma once

#include <cstdint>
#include <vector>

#include "camreloc/error.hpp"
#include "camreloc/rng.hpp"

namespace camreloc {

/// Dense grayscale image with intensities in [0,1] and a per-pixel validity
/// mask. Fully valid unless constructed otherwise; rendered synthetic views
/// mark unhit pixels invalid.
class GrayImage {
 public:
  GrayImage() = default;

  GrayImage(int width, int height, double fill = 0.0, bool valid = true)
      : width_(width),
        height_(height),
        data_(static_cast<std::size_t>(width) * height, fill),
        mask_(static_cast<std::size_t>(width) * height, valid ? 1 : 0) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  double at(int x, int y) const { return data_[index(x, y)]; }
  double& at(int x, int y) { return data_[index(x, y)]; }
  bool valid(int x, int y) const { return mask_[index(x, y)] != 0; }
  void set_valid(int x, int y, bool v) { mask_[index(x, y)] = v ? 1 : 0; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  std::vector<std::uint8_t>& mask() { return mask_; }

  bool fully_valid() const {
    for (auto m : mask_)
      if (!m) return false;
    return true;
  }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto m : mask_) n += m != 0;
    return n;
  }

  bool same_size(const GrayImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
  std::vector<std::uint8_t> mask_;
};

/// Separable Gaussian blur, kernel truncated at 3 sigma and renormalized over
/// the in-bounds valid support, so constant regions stay constant. sigma = 0
/// returns the input unchanged. The validity mask is carried through.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);

/// Catmull-Rom bicubic sample at a subpixel location. Requires the 4x4
/// neighborhood to be in bounds: x,y within [1, dim-2]. Throws OutOfBounds.
double sample_bicubic(const GrayImage& img, double x, double y);

inline bool bicubic_in_bounds(const GrayImage& img, double x, double y) {
  return x >= 1.0 && y >= 1.0 && x <= img.width() - 2.0 && y <= img.height() - 2.0;
}

// Intensity remaps used to simulate changed capture conditions.

/// Gamma warp applied inside each of `bins` equal intensity bins, so every
/// pixel keeps its bin while moving within it. Strictly monotone overall.
GrayImage remap_gamma_binwise(const GrayImage& img, double gamma, int bins);

/// clamp(gain * v + bias) to [0,1].
GrayImage remap_brightness_contrast(const GrayImage& img, double gain, double bias);

/// v -> 1 - v.
GrayImage remap_invert(const GrayImage& img);

/// Additive Gaussian noise, clamped to [0,1]; deterministic under the seed.
GrayImage add_noise(const GrayImage& img, double stddev, std::uint64_t seed);

/// Snap intensities to the 8-bit grid (k/255) as PNG storage would.
GrayImage quantize8(const GrayImage& img);

}  // namespace camreloc
