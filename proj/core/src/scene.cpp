#include "camreloc/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace camreloc {

ColoredPointCloud colorize(const ReferenceTuple& ref, const Intrinsics& K) {
  if (ref.cloud.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot colorize an empty cloud");
  }
  ColoredPointCloud out;
  out.points.reserve(ref.cloud.size());
  out.intensities.reserve(ref.cloud.size());
  const Mat3& r = ref.pose.rotation();
  const Vec3& t = ref.pose.translation();
  for (const Vec3& p : ref.cloud.points) {
    const Vec3 cam = r * p + t;
    if (!(cam.z() > 0.0)) continue;
    const double inv_z = 1.0 / cam.z();
    const double u = (K.fx * cam.x() + K.skew * cam.y()) * inv_z + K.cx;
    const double v = K.fy * cam.y() * inv_z + K.cy;
    if (!bicubic_in_bounds(ref.image, u, v)) continue;
    out.points.push_back(p);
    out.intensities.push_back(std::clamp(sample_bicubic(ref.image, u, v), 0.0, 1.0));
  }
  if (out.empty()) {
    throw Error(ErrorCode::EmptyResult, "no cloud point projects into the reference image");
  }
  return out;
}

SyntheticView render(const ColoredPointCloud& cloud, const Intrinsics& K, const PoseSE3& M,
                     int width, int height, double splat_radius) {
  if (cloud.empty()) {
    throw Error(ErrorCode::InvalidArgument, "cannot render an empty cloud");
  }
  SyntheticView view;
  view.image = GrayImage(width, height, 0.0, false);
  view.depth.assign(static_cast<std::size_t>(width) * height,
                    std::numeric_limits<double>::infinity());
  view.point_index.assign(static_cast<std::size_t>(width) * height, -1);

  const int ir = static_cast<int>(std::floor(splat_radius));
  const double r2 = splat_radius * splat_radius;
  const Mat3& rot = M.rotation();
  const Vec3& t = M.translation();

  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3 cam = rot * cloud.points[i] + t;
    if (!(cam.z() > 0.0)) continue;
    const double inv_z = 1.0 / cam.z();
    const double u = (K.fx * cam.x() + K.skew * cam.y()) * inv_z + K.cx;
    const double v = K.fy * cam.y() * inv_z + K.cy;
    const int cx = static_cast<int>(std::lround(u));
    const int cy = static_cast<int>(std::lround(v));
    for (int dy = -ir; dy <= ir; ++dy) {
      const int py = cy + dy;
      if (py < 0 || py >= height) continue;
      for (int dx = -ir; dx <= ir; ++dx) {
        if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy > r2) continue;
        const int px = cx + dx;
        if (px < 0 || px >= width) continue;
        const std::size_t idx = view.image.index(px, py);
        if (cam.z() < view.depth[idx]) {
          view.depth[idx] = cam.z();
          view.image.data()[idx] = cloud.intensities[i];
          view.image.mask()[idx] = 1;
          view.point_index[idx] = static_cast<std::int32_t>(i);
        }
      }
    }
  }
  return view;
}

std::vector<CloudProjection> project_cloud(const PointCloud& cloud, const Intrinsics& K,
                                           const PoseSE3& M, int width, int height) {
  std::vector<CloudProjection> out;
  out.reserve(cloud.size());
  const Mat3& rot = M.rotation();
  const Vec3& t = M.translation();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3 cam = rot * cloud.points[i] + t;
    if (!(cam.z() > 0.0)) continue;
    const double inv_z = 1.0 / cam.z();
    const double u = (K.fx * cam.x() + K.skew * cam.y()) * inv_z + K.cx;
    const double v = K.fy * cam.y() * inv_z + K.cy;
    if (u < 0.0 || v < 0.0 || u > width - 1.0 || v > height - 1.0) continue;
    out.push_back(CloudProjection{Vec2(u, v), cam.z(), i});
  }
  return out;
}

namespace {

// Uniform grid over projections, cell size = gate, for exact nearest-within-gate
// lookups. Candidate order follows projection order so distance ties resolve to
// the lowest point index.
class ProjectionGrid {
 public:
  ProjectionGrid(const std::vector<CloudProjection>& projections, double cell)
      : projections_(projections), cell_(cell) {
    for (std::size_t i = 0; i < projections.size(); ++i) {
      buckets_[key(projections[i].pixel)].push_back(i);
    }
  }

  // Index into projections of the nearest projection within `gate`, or npos.
  std::size_t nearest(const Vec2& p, double gate) const {
    const std::int64_t kx = coord(p.x());
    const std::int64_t ky = coord(p.y());
    const double gate2 = gate * gate;
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = npos;
    std::size_t best_point = npos;
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const auto it = buckets_.find((kx + dx) * 0x100000000LL + (ky + dy));
        if (it == buckets_.end()) continue;
        for (const std::size_t idx : it->second) {
          const double d2 = (projections_[idx].pixel - p).squaredNorm();
          if (d2 > gate2) continue;
          const std::size_t pt = projections_[idx].point_index;
          if (d2 < best_d2 || (d2 == best_d2 && pt < best_point)) {
            best_d2 = d2;
            best = idx;
            best_point = pt;
          }
        }
      }
    }
    return best;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  std::int64_t key(const Vec2& p) const {
    return coord(p.x()) * 0x100000000LL + coord(p.y());
  }

  const std::vector<CloudProjection>& projections_;
  double cell_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace

std::vector<LiftedFeature> lift_features(const std::vector<Vec2>& features,
                                         const std::vector<CloudProjection>& projections,
                                         const Intrinsics& K, double max_pixel_distance) {
  if (projections.empty()) {
    throw Error(ErrorCode::NoProjections, "no cloud projections to lift depth from");
  }
  const ProjectionGrid grid(projections, max_pixel_distance);
  std::vector<LiftedFeature> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::size_t hit = grid.nearest(features[i], max_pixel_distance);
    if (hit == ProjectionGrid::npos) continue;
    out.push_back(LiftedFeature{i, backproject(K, features[i], projections[hit].depth)});
  }
  return out;
}

}  // namespace camreloc
