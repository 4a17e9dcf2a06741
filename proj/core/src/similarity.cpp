#include "camreloc/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace camreloc {

JointHistogram joint_histogram(const GrayImage& a, const GrayImage& b, int bins) {
  if (!a.same_size(b)) {
    throw Error(ErrorCode::SizeMismatch, "joint histogram inputs differ in size");
  }
  if (bins < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least 2 bins");
  }
  JointHistogram hist;
  hist.bins = bins;
  hist.counts.assign(static_cast<std::size_t>(bins) * bins, 0);
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    if (!a.mask()[i] || !b.mask()[i]) continue;
    const int ka = intensity_bin(a.data()[i], bins);
    const int kb = intensity_bin(b.data()[i], bins);
    ++hist.counts[static_cast<std::size_t>(ka) * bins + kb];
    ++hist.total;
  }
  return hist;
}

EntropyTriple entropies(const JointHistogram& hist) {
  EntropyTriple e;
  if (hist.total == 0) return e;
  const int b = hist.bins;
  std::vector<std::int64_t> row(b, 0), col(b, 0);
  const double inv_total = 1.0 / static_cast<double>(hist.total);
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) {
      const std::int64_t c = hist.at(i, j);
      if (c == 0) continue;
      row[i] += c;
      col[j] += c;
      const double p = c * inv_total;
      e.h_ab -= p * std::log2(p);
    }
  }
  for (int i = 0; i < b; ++i) {
    if (row[i] > 0) {
      const double p = row[i] * inv_total;
      e.h_a -= p * std::log2(p);
    }
    if (col[i] > 0) {
      const double p = col[i] * inv_total;
      e.h_b -= p * std::log2(p);
    }
  }
  return e;
}

double nmi(const GrayImage& a, const GrayImage& b, int bins) {
  const JointHistogram hist = joint_histogram(a, b, bins);
  if (hist.total == 0) {
    throw Error(ErrorCode::EmptyOverlap, "no jointly valid pixels");
  }
  const EntropyTriple e = entropies(hist);
  if (e.h_a == 0.0 || e.h_b == 0.0) {
    throw Error(ErrorCode::DegenerateImage, "constant image over the joint support");
  }
  const double mi = e.h_a + e.h_b - e.h_ab;
  const double denom = std::max(e.h_a, e.h_b);
  return std::clamp(mi / denom, 0.0, 1.0);
}

double median_trimmed_mean(const std::vector<double>& residuals) {
  if (residuals.empty()) {
    throw Error(ErrorCode::EmptyOverlap, "no residuals");
  }
  // Median: midpoint of the two central values for even counts.
  std::vector<double> sorted = residuals;
  const std::size_t n = sorted.size();
  const std::size_t mid = n / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  double theta = sorted[mid];
  if (n % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
    theta = 0.5 * (lower + theta);
  }
  double acc = 0.0;
  std::size_t kept = 0;
  for (const double e : residuals) {
    if (e > theta) continue;  // zero weight strictly above the median
    acc += e;
    ++kept;
  }
  return acc / static_cast<double>(kept);
}

double robust_rse(const GrayImage& query, const GrayImage& synthetic) {
  if (!query.same_size(synthetic)) {
    throw Error(ErrorCode::SizeMismatch, "robust_rse inputs differ in size");
  }
  std::vector<double> residuals;
  residuals.reserve(synthetic.size());
  for (std::size_t i = 0; i < synthetic.data().size(); ++i) {
    if (!synthetic.mask()[i] || !query.mask()[i]) continue;
    const double d = query.data()[i] - synthetic.data()[i];
    residuals.push_back(d * d);
  }
  if (residuals.empty()) {
    throw Error(ErrorCode::EmptyOverlap, "no valid pixels to compare");
  }
  return median_trimmed_mean(residuals);
}

}  // namespace camreloc
