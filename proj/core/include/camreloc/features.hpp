#pragma once

#include <functional>
#include <vector>

#include "camreloc/geometry.hpp"
#include "camreloc/image.hpp"
#include "camreloc/scene.hpp"

namespace camreloc {

struct Keypoint {
  Vec2 location;        // subpixel, image coordinates
  double scale = 1.0;   // pixels
  double response = 0.0;
};

using Descriptor = std::vector<float>;

struct FeatureSet {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;

  std::size_t size() const { return keypoints.size(); }
};

struct DetectorConfig {
  int max_keypoints = 500;
  double response_threshold = 1e-4;  // on scale-normalized |det H|
  int num_scales = 5;
  double base_sigma = 1.6;
  double scale_factor = 1.4142135623730951;  // sqrt(2) between scales
};

/// One 2D-2D match: query feature index, reference feature index, descriptor
/// distance. Query side is unique, reference side may repeat.
struct Match {
  std::size_t query_index = 0;
  std::size_t reference_index = 0;
  double distance = 0.0;
};

struct MatchSet2D2D {
  std::vector<Match> matches;
  std::size_t size() const { return matches.size(); }
  bool empty() const { return matches.empty(); }
};

/// 2D query pixel paired with its 3D point in the reference camera frame.
struct Correspondence2D3D {
  Vec2 query_pixel;
  Vec3 reference_camera_point;
};

struct CorrespondenceSet2D3D {
  std::vector<Correspondence2D3D> items;
  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

/// Detector plug-in: image -> keypoints + descriptors. Must be deterministic.
using DetectorFn = std::function<FeatureSet(const GrayImage&, const DetectorConfig&)>;

/// Default detector: scale-normalized determinant-of-Hessian extrema (both
/// blobs and saddle-type corners) with an upright 4x4x8 gradient-orientation
/// histogram descriptor, 128-d, L2-normalized.
FeatureSet detect_and_describe(const GrayImage& img, const DetectorConfig& cfg = {});

/// Lowe ratio matching: exhaustive nearest neighbor per query descriptor,
/// accepted iff d1 < ratio * d2. Ties on distance go to the lowest reference
/// index. Reference sets with fewer than 2 descriptors yield no matches.
MatchSet2D2D match_ratio(const std::vector<Descriptor>& query_descriptors,
                         const std::vector<Descriptor>& reference_descriptors,
                         double ratio = 0.8);

/// Lift the reference pixels of the matches to camera-frame 3D points via the
/// reference cloud (project_cloud + nearest-projection depth), keeping the
/// paired query pixels. Throws NoCorrespondences if every match is dropped.
CorrespondenceSet2D3D build_2d3d(const MatchSet2D2D& matches,
                                 const std::vector<Keypoint>& query_keypoints,
                                 const std::vector<Keypoint>& reference_keypoints,
                                 const ReferenceTuple& ref, const Intrinsics& K,
                                 double max_pixel_distance = 3.0);

}  // namespace camreloc
