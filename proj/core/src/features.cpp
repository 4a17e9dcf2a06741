#include "camreloc/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace camreloc {

namespace {

struct ResponseMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Scale-normalized |det H| of the sigma-smoothed image. Saddle points
// (checkerboard corners) produce negative determinants; the magnitude makes
// them detectable alongside blobs.
ResponseMap hessian_response(const GrayImage& smoothed, double sigma) {
  const int w = smoothed.width();
  const int h = smoothed.height();
  ResponseMap out;
  out.width = w;
  out.height = h;
  out.values.assign(static_cast<std::size_t>(w) * h, 0.0);
  const double s4 = sigma * sigma * sigma * sigma;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const double c = smoothed.at(x, y);
      const double ixx = smoothed.at(x + 1, y) - 2.0 * c + smoothed.at(x - 1, y);
      const double iyy = smoothed.at(x, y + 1) - 2.0 * c + smoothed.at(x, y - 1);
      const double ixy = 0.25 * (smoothed.at(x + 1, y + 1) - smoothed.at(x - 1, y + 1) -
                                 smoothed.at(x + 1, y - 1) + smoothed.at(x - 1, y - 1));
      out.at(x, y) = s4 * std::abs(ixx * iyy - ixy * ixy);
    }
  }
  return out;
}

double parabola_offset(double left, double center, double right) {
  const double denom = left - 2.0 * center + right;
  if (denom == 0.0) return 0.0;
  const double off = 0.5 * (left - right) / denom;
  return std::clamp(off, -0.5, 0.5);
}

constexpr int kDescGrid = 4;    // 4x4 spatial cells
constexpr int kDescBins = 8;    // orientation bins per cell
constexpr int kDescLen = kDescGrid * kDescGrid * kDescBins;
constexpr int kPatch = 16;      // sample grid per keypoint

double sample_bilinear_clamped(const GrayImage& img, double x, double y) {
  x = std::clamp(x, 0.0, img.width() - 1.0);
  y = std::clamp(y, 0.0, img.height() - 1.0);
  const int x0 = std::min(static_cast<int>(x), img.width() - 2);
  const int y0 = std::min(static_cast<int>(y), img.height() - 2);
  const double fx = x - x0;
  const double fy = y - y0;
  return (1 - fx) * (1 - fy) * img.at(x0, y0) + fx * (1 - fy) * img.at(x0 + 1, y0) +
         (1 - fx) * fy * img.at(x0, y0 + 1) + fx * fy * img.at(x0 + 1, y0 + 1);
}

// Upright SIFT-style descriptor sampled from the keypoint's own smoothed
// level: 16x16 samples spaced by the keypoint scale, gradients binned into
// 4x4 cells x 8 orientations with bilinear spatial/orientation sharing.
bool describe(const GrayImage& level, const Keypoint& kp, Descriptor& desc) {
  const double step = kp.scale;
  const double half = (kPatch / 2.0) * step;
  if (kp.location.x() - half - step < 0.0 || kp.location.y() - half - step < 0.0 ||
      kp.location.x() + half + step > level.width() - 1.0 ||
      kp.location.y() + half + step > level.height() - 1.0) {
    return false;
  }
  double hist[kDescGrid][kDescGrid][kDescBins] = {};
  const double sigma_w = kPatch / 2.0;
  for (int sy = 0; sy < kPatch; ++sy) {
    for (int sx = 0; sx < kPatch; ++sx) {
      const double px = kp.location.x() + (sx - kPatch / 2 + 0.5) * step;
      const double py = kp.location.y() + (sy - kPatch / 2 + 0.5) * step;
      const double gx = sample_bilinear_clamped(level, px + step, py) -
                        sample_bilinear_clamped(level, px - step, py);
      const double gy = sample_bilinear_clamped(level, px, py + step) -
                        sample_bilinear_clamped(level, px, py - step);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;
      const double du = (sx - kPatch / 2 + 0.5) / sigma_w;
      const double dv = (sy - kPatch / 2 + 0.5) / sigma_w;
      const double wgauss = std::exp(-0.5 * (du * du + dv * dv));
      double angle = std::atan2(gy, gx);
      if (angle < 0.0) angle += 2.0 * kPi;
      const double obin = angle * kDescBins / (2.0 * kPi);
      const double cbin_x = (sx + 0.5) * kDescGrid / kPatch - 0.5;
      const double cbin_y = (sy + 0.5) * kDescGrid / kPatch - 0.5;
      const int ox0 = static_cast<int>(std::floor(cbin_x));
      const int oy0 = static_cast<int>(std::floor(cbin_y));
      const int ob0 = static_cast<int>(std::floor(obin)) % kDescBins;
      const double fx = cbin_x - ox0;
      const double fy = cbin_y - oy0;
      const double fo = obin - std::floor(obin);
      for (int dy = 0; dy <= 1; ++dy) {
        const int cy = oy0 + dy;
        if (cy < 0 || cy >= kDescGrid) continue;
        const double wy = dy ? fy : 1.0 - fy;
        for (int dx = 0; dx <= 1; ++dx) {
          const int cx = ox0 + dx;
          if (cx < 0 || cx >= kDescGrid) continue;
          const double wx = dx ? fx : 1.0 - fx;
          for (int doo = 0; doo <= 1; ++doo) {
            const int ob = (ob0 + doo) % kDescBins;
            const double wo = doo ? fo : 1.0 - fo;
            hist[cy][cx][ob] += mag * wgauss * wy * wx * wo;
          }
        }
      }
    }
  }
  desc.assign(kDescLen, 0.0f);
  double norm2 = 0.0;
  for (int cy = 0; cy < kDescGrid; ++cy)
    for (int cx = 0; cx < kDescGrid; ++cx)
      for (int ob = 0; ob < kDescBins; ++ob) {
        const double v = hist[cy][cx][ob];
        desc[(cy * kDescGrid + cx) * kDescBins + ob] = static_cast<float>(v);
        norm2 += v * v;
      }
  if (norm2 <= 0.0) return false;
  double inv = 1.0 / std::sqrt(norm2);
  norm2 = 0.0;
  for (auto& v : desc) {
    v = static_cast<float>(std::min(static_cast<double>(v) * inv, 0.2));
    norm2 += static_cast<double>(v) * v;
  }
  if (norm2 <= 0.0) return false;
  inv = 1.0 / std::sqrt(norm2);
  for (auto& v : desc) v = static_cast<float>(v * inv);
  return true;
}

double descriptor_distance2(const Descriptor& a, const Descriptor& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

FeatureSet detect_and_describe(const GrayImage& img, const DetectorConfig& cfg) {
  FeatureSet out;
  if (img.width() < 8 || img.height() < 8) return out;

  std::vector<GrayImage> levels;
  std::vector<double> sigmas;
  levels.reserve(cfg.num_scales);
  for (int i = 0; i < cfg.num_scales; ++i) {
    const double sigma = cfg.base_sigma * std::pow(cfg.scale_factor, i);
    sigmas.push_back(sigma);
    levels.push_back(gaussian_smooth(img, sigma));
  }
  std::vector<ResponseMap> responses;
  responses.reserve(levels.size());
  for (int i = 0; i < cfg.num_scales; ++i) {
    responses.push_back(hessian_response(levels[i], sigmas[i]));
  }

  struct Candidate {
    Keypoint kp;
    int level;
  };
  std::vector<Candidate> candidates;
  const int w = img.width();
  const int h = img.height();
  for (int s = 0; s < cfg.num_scales; ++s) {
    for (int y = 1; y + 1 < h; ++y) {
      for (int x = 1; x + 1 < w; ++x) {
        const double v = responses[s].at(x, y);
        if (v < cfg.response_threshold) continue;
        bool is_max = true;
        for (int dy = -1; dy <= 1 && is_max; ++dy)
          for (int dx = -1; dx <= 1 && is_max; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (responses[s].at(x + dx, y + dy) > v) is_max = false;
          }
        if (!is_max) continue;
        if (s > 0 && responses[s - 1].at(x, y) > v) continue;
        if (s + 1 < cfg.num_scales && responses[s + 1].at(x, y) > v) continue;
        Keypoint kp;
        kp.location.x() = x + parabola_offset(responses[s].at(x - 1, y), v,
                                              responses[s].at(x + 1, y));
        kp.location.y() = y + parabola_offset(responses[s].at(x, y - 1), v,
                                              responses[s].at(x, y + 1));
        kp.scale = sigmas[s];
        kp.response = v;
        candidates.push_back(Candidate{kp, s});
      }
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.kp.response != b.kp.response) return a.kp.response > b.kp.response;
    if (a.kp.location.y() != b.kp.location.y()) return a.kp.location.y() < b.kp.location.y();
    return a.kp.location.x() < b.kp.location.x();
  });

  for (const Candidate& c : candidates) {
    if (static_cast<int>(out.keypoints.size()) >= cfg.max_keypoints) break;
    Descriptor desc;
    if (!describe(levels[c.level], c.kp, desc)) continue;
    out.keypoints.push_back(c.kp);
    out.descriptors.push_back(std::move(desc));
  }
  return out;
}

MatchSet2D2D match_ratio(const std::vector<Descriptor>& query_descriptors,
                         const std::vector<Descriptor>& reference_descriptors,
                         double ratio) {
  if (!(ratio > 0.0) || !(ratio < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "ratio must be in (0,1)");
  }
  MatchSet2D2D out;
  if (reference_descriptors.size() < 2) return out;
  for (std::size_t qi = 0; qi < query_descriptors.size(); ++qi) {
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t ri = 0; ri < reference_descriptors.size(); ++ri) {
      const double d = descriptor_distance2(query_descriptors[qi], reference_descriptors[ri]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = ri;
      } else if (d < d2) {
        d2 = d;
      }
    }
    // distances are squared; the test d1 < r*d2 becomes d1 < r^2 * d2
    if (d1 < ratio * ratio * d2) {
      out.matches.push_back(Match{qi, best, std::sqrt(d1)});
    }
  }
  return out;
}

CorrespondenceSet2D3D build_2d3d(const MatchSet2D2D& matches,
                                 const std::vector<Keypoint>& query_keypoints,
                                 const std::vector<Keypoint>& reference_keypoints,
                                 const ReferenceTuple& ref, const Intrinsics& K,
                                 double max_pixel_distance) {
  if (matches.empty()) {
    throw Error(ErrorCode::NoCorrespondences, "no 2D-2D matches to lift");
  }
  const auto projections =
      project_cloud(ref.cloud, K, ref.pose, ref.image.width(), ref.image.height());
  if (projections.empty()) {
    throw Error(ErrorCode::NoCorrespondences, "reference cloud does not project into the image");
  }
  std::vector<Vec2> ref_pixels;
  ref_pixels.reserve(matches.size());
  for (const Match& m : matches.matches) {
    ref_pixels.push_back(reference_keypoints[m.reference_index].location);
  }
  const auto lifted = lift_features(ref_pixels, projections, K, max_pixel_distance);
  CorrespondenceSet2D3D out;
  out.items.reserve(lifted.size());
  for (const LiftedFeature& lf : lifted) {
    const Match& m = matches.matches[lf.feature_index];
    out.items.push_back(
        Correspondence2D3D{query_keypoints[m.query_index].location, lf.camera_point});
  }
  if (out.empty()) {
    throw Error(ErrorCode::NoCorrespondences, "every match fell outside the cloud coverage");
  }
  return out;
}

}  // namespace camreloc
