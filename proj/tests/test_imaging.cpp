#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "camreloc/image.hpp"
#include "camreloc/rng.hpp"
#include "camreloc/similarity.hpp"

using namespace camreloc;

namespace {

GrayImage random_image(int w, int h, std::uint64_t seed) {
  GrayImage img(w, h);
  Rng rng(seed);
  for (auto& v : img.data()) v = rng.uniform01();
  return img;
}

GrayImage from_values(int w, int h, const std::vector<double>& values) {
  GrayImage img(w, h);
  img.data() = values;
  return img;
}

}  // namespace

TEST_CASE("gaussian smoothing keeps constants and sigma zero is identity") {
  const GrayImage flat(32, 24, 0.5);
  const GrayImage out = gaussian_smooth(flat, 2.0);
  for (const double v : out.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

  const GrayImage img = random_image(16, 16, 3);
  const GrayImage same = gaussian_smooth(img, 0.0);
  CHECK(same.data() == img.data());
}

TEST_CASE("impulse response equals the normalized sampled kernel") {
  const int n = 25;
  GrayImage img(n, n, 0.0);
  img.at(n / 2, n / 2) = 1.0;
  const double sigma = 1.0;
  const GrayImage out = gaussian_smooth(img, sigma);

  // direct kernel-sum oracle over the truncated window
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  double total = 0.0;
  std::vector<double> kernel((2 * radius + 1) * (2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      kernel[(dy + radius) * (2 * radius + 1) + dx + radius] = w;
      total += w;
    }
  }
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double expected = kernel[(dy + radius) * (2 * radius + 1) + dx + radius] / total;
      CHECK(out.at(n / 2 + dx, n / 2 + dy) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("smoothing preserves the mean of an interior-supported signal") {
  const int n = 40;
  const double sigma = 1.5;
  GrayImage img(n, n, 0.25);
  Rng rng(9);
  for (int y = 10; y < 30; ++y)
    for (int x = 10; x < 30; ++x) img.at(x, y) = 0.25 + 0.5 * rng.uniform01();
  double mean_in = 0.0;
  for (const double v : img.data()) mean_in += v;
  const GrayImage out = gaussian_smooth(img, sigma);
  double mean_out = 0.0;
  for (const double v : out.data()) mean_out += v;
  CHECK(std::abs(mean_in - mean_out) / img.data().size() < 1e-6);
}

TEST_CASE("smoothing carries the validity mask through") {
  GrayImage img = random_image(12, 12, 4);
  img.set_valid(3, 4, false);
  img.set_valid(8, 8, false);
  const GrayImage out = gaussian_smooth(img, 1.0);
  CHECK_FALSE(out.valid(3, 4));
  CHECK_FALSE(out.valid(8, 8));
  CHECK(out.valid(0, 0));
}

TEST_CASE("bicubic sampling reproduces stored pixels and constants") {
  const GrayImage img = random_image(10, 10, 5);
  CHECK(sample_bicubic(img, 4.0, 5.0) == doctest::Approx(img.at(4, 5)).epsilon(1e-12));
  CHECK(sample_bicubic(img, 1.0, 1.0) == doctest::Approx(img.at(1, 1)).epsilon(1e-12));

  const GrayImage flat(10, 10, 0.42);
  CHECK(sample_bicubic(flat, 3.3, 6.7) == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("bicubic sampling reproduces a bilinear ramp") {
  GrayImage img(12, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) img.at(x, y) = 0.02 * x + 0.03 * y + 0.1;
  const double got = sample_bicubic(img, 5.5, 6.5);
  CHECK(got == doctest::Approx(0.02 * 5.5 + 0.03 * 6.5 + 0.1).epsilon(1e-6));
}

TEST_CASE("bicubic sampling rejects the unsafe margin") {
  const GrayImage img = random_image(10, 10, 6);
  CHECK_THROWS_AS(sample_bicubic(img, 0.5, 5.0), Error);
  CHECK_THROWS_AS(sample_bicubic(img, 5.0, 8.5), Error);
}

TEST_CASE("nmi of an image with itself is 1") {
  const GrayImage img = random_image(20, 20, 8);
  CHECK(nmi(img, img, 64) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hand-computed 2x2 joint histogram cases") {
  const GrayImage a = from_values(2, 2, {0.0, 0.0, 1.0, 1.0});
  const GrayImage b_dependent = from_values(2, 2, {1.0, 1.0, 0.0, 0.0});
  const GrayImage b_independent = from_values(2, 2, {0.0, 1.0, 0.0, 1.0});
  CHECK(nmi(a, b_dependent, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nmi(a, b_independent, 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("nmi is symmetric and bounded") {
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    const GrayImage a = random_image(16, 12, 100 + i);
    const GrayImage b = random_image(16, 12, 200 + i);
    const double ab = nmi(a, b, 32);
    const double ba = nmi(b, a, 32);
    CHECK(ab == ba);  // transposed joint histogram, identical sums
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("nmi rejects degenerate inputs") {
  const GrayImage flat(8, 8, 0.3);
  const GrayImage img = random_image(8, 8, 11);
  CHECK_THROWS_AS(nmi(flat, flat, 16), Error);
  CHECK_THROWS_AS(nmi(flat, img, 16), Error);  // one constant marginal
  const GrayImage small(4, 4, 0.0);
  CHECK_THROWS_AS(nmi(img, small, 16), Error);  // size mismatch
}

TEST_CASE("nmi only looks at jointly valid pixels") {
  GrayImage a = random_image(10, 10, 12);
  GrayImage b = a;
  // corrupt pixels that are masked out of b; result must stay self-similar
  for (int x = 0; x < 10; ++x) {
    b.at(x, 0) = 1.0 - b.at(x, 0);
    b.set_valid(x, 0, false);
  }
  CHECK(nmi(a, b, 32) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("median trimmed mean matches the hand-computed case") {
  CHECK(median_trimmed_mean({0.0, 1.0, 4.0, 9.0}) == 0.5);
  CHECK(median_trimmed_mean({5.0}) == 5.0);
  CHECK(median_trimmed_mean({3.0, 3.0, 3.0}) == 3.0);
}

TEST_CASE("robust rse is zero for identical images") {
  const GrayImage img = random_image(16, 16, 13);
  CHECK(robust_rse(img, img) == 0.0);
}

TEST_CASE("robust rse reproduces the scaled hand case") {
  // residuals {0, 0.01, 0.04, 0.09}: median 0.025, keep the lower half
  const GrayImage q = from_values(2, 2, {0.5, 0.5, 0.5, 0.5});
  const GrayImage s = from_values(2, 2, {0.5, 0.6, 0.7, 0.8});
  CHECK(robust_rse(q, s) == doctest::Approx(0.005).epsilon(1e-12));
}

TEST_CASE("corrupting exactly half the pixels leaves the clean-half cost") {
  const int n = 16;
  GrayImage q(n, n, 0.4);
  GrayImage s(n, n, 0.5);  // clean residual 0.01 everywhere
  int corrupted = 0;
  for (int y = 0; y < n && corrupted < n * n / 2; ++y) {
    for (int x = 0; x < n && corrupted < n * n / 2; ++x) {
      q.at(x, y) = 1.0;  // residual 0.25
      ++corrupted;
    }
  }
  CHECK(robust_rse(q, s) == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("corrupting under half the pixels does not move the cost") {
  const int n = 20;
  GrayImage q(n, n, 0.4);
  const GrayImage s(n, n, 0.5);
  const double clean = robust_rse(q, s);
  CHECK(clean == doctest::Approx(0.01).epsilon(1e-12));
  Rng rng(14);
  int corrupted = 0;
  while (corrupted < (n * n) / 2 - 1) {
    const int x = static_cast<int>(rng.uniform_index(n));
    const int y = static_cast<int>(rng.uniform_index(n));
    if (q.at(x, y) != 0.4) continue;
    q.at(x, y) = 1.0;
    ++corrupted;
  }
  CHECK(robust_rse(q, s) == doctest::Approx(clean).epsilon(1e-9));
}

TEST_CASE("robust rse needs overlap") {
  GrayImage q = random_image(4, 4, 15);
  GrayImage s = random_image(4, 4, 16);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) s.set_valid(x, y, false);
  CHECK_THROWS_AS(robust_rse(q, s), Error);
}

TEST_CASE("binwise gamma remap keeps every pixel in its bin") {
  const GrayImage img = random_image(24, 24, 17);
  const int bins = 64;
  const GrayImage warped = remap_gamma_binwise(img, 2.0, bins);
  int moved = 0;
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    CHECK(intensity_bin(warped.data()[i], bins) == intensity_bin(img.data()[i], bins));
    if (warped.data()[i] != img.data()[i]) ++moved;
  }
  CHECK(moved > 0);  // the warp must actually change intensities
}

TEST_CASE("quantize8 snaps to the 8-bit grid") {
  const GrayImage img = random_image(8, 8, 18);
  const GrayImage q = quantize8(img);
  for (const double v : q.data()) {
    CHECK(v * 255.0 == doctest::Approx(std::round(v * 255.0)).epsilon(1e-12));
  }
}
