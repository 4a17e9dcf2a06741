#pragma once

#include <string>
#include <vector>

#include "camreloc/geometry.hpp"
#include "camreloc/image.hpp"

namespace camreloc {

/// World-frame point cloud (meters).
struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Points with per-point intensity sampled from a reference image.
struct ColoredPointCloud {
  std::vector<Vec3> points;      // world frame
  std::vector<double> intensities;  // [0,1], one per point

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Reference image with its registered world-frame cloud and known pose
/// (world-to-camera). Everything lives in one common world frame.
struct ReferenceTuple {
  GrayImage image;
  PointCloud cloud;
  PoseSE3 pose;
  int id = -1;
};

/// Rendered view of a colored cloud: masked intensity image plus z-buffer.
struct SyntheticView {
  GrayImage image;                      // valid only where a point splatted
  std::vector<double> depth;            // meters; meaningful where image.valid()
  std::vector<std::int32_t> point_index;  // winning cloud point per valid pixel

  double depth_at(int x, int y) const { return depth[image.index(x, y)]; }
};

struct CloudProjection {
  Vec2 pixel;
  double depth = 0.0;
  std::size_t point_index = 0;
};

/// Assign intensities to cloud points by projecting into the reference image
/// and sampling bicubically. Points behind the camera or outside the safe
/// sampling margin are dropped. Throws EmptyResult if nothing survives.
ColoredPointCloud colorize(const ReferenceTuple& ref, const Intrinsics& K);

/// Z-buffered disc splatting of a colored cloud into a w x h view at pose M.
/// Pixels never hit stay masked invalid; an all-masked view is legal.
SyntheticView render(const ColoredPointCloud& cloud, const Intrinsics& K, const PoseSE3& M,
                     int width, int height, double splat_radius);

/// In-bounds positive-depth projections of a cloud (bounds given in pixels).
std::vector<CloudProjection> project_cloud(const PointCloud& cloud, const Intrinsics& K,
                                           const PoseSE3& M, int width, int height);

/// For each feature pixel, adopt the depth of the nearest cloud projection
/// (exact nearest neighbor, ties to the lowest point index) and backproject
/// to a camera-frame 3D point. Features with no projection within
/// max_pixel_distance are dropped; their slot is absent from the output.
/// Returns one entry per surviving feature: (feature index, 3D point).
struct LiftedFeature {
  std::size_t feature_index = 0;
  Vec3 camera_point;
};
std::vector<LiftedFeature> lift_features(const std::vector<Vec2>& features,
                                         const std::vector<CloudProjection>& projections,
                                         const Intrinsics& K,
                                         double max_pixel_distance = 3.0);

}  // namespace camreloc
