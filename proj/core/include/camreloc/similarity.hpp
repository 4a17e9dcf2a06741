#pragma once

#include <cstdint>
#include <vector>

#include "camreloc/image.hpp"

namespace camreloc {

/// B x B joint intensity histogram over jointly valid pixels. Bins are
/// uniform on [0,1]; the last bin is right-closed so v = 1 lands in bin B-1.
struct JointHistogram {
  int bins = 0;
  std::vector<std::int64_t> counts;  // row-major: counts[a_bin * bins + b_bin]
  std::int64_t total = 0;

  std::int64_t at(int a_bin, int b_bin) const {
    return counts[static_cast<std::size_t>(a_bin) * bins + b_bin];
  }
};

inline int intensity_bin(double v, int bins) {
  int k = static_cast<int>(v * bins);
  if (k >= bins) k = bins - 1;
  if (k < 0) k = 0;
  return k;
}

JointHistogram joint_histogram(const GrayImage& a, const GrayImage& b, int bins);

/// Marginal entropies (bits) of the joint distribution and the joint entropy.
struct EntropyTriple {
  double h_a = 0.0;
  double h_b = 0.0;
  double h_ab = 0.0;
};
EntropyTriple entropies(const JointHistogram& hist);

/// Normalized mutual information MI / max(H(a), H(b)), in [0,1].
/// Throws DegenerateImage when either marginal entropy over the joint support
/// is zero (constant input), SizeMismatch, EmptyOverlap.
double nmi(const GrayImage& a, const GrayImage& b, int bins);

/// Core of the M-estimator: average of the residuals not exceeding their
/// median (even-length median is the midpoint of the central pair).
double median_trimmed_mean(const std::vector<double>& residuals);

/// Median-trimmed photometric cost: residuals E = (q - s)^2 over the valid
/// pixels of s, weights zero where E exceeds the median residual, average of
/// the surviving residuals. Throws EmptyOverlap, SizeMismatch.
double robust_rse(const GrayImage& query, const GrayImage& synthetic);

}  // namespace camreloc
