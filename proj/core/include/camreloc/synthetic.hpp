#pragma once

#include <cstdint>

#include "camreloc/dataset.hpp"

namespace camreloc {

/// Procedural desk-scale scene: a textured ground plane plus scattered boxes,
/// observed by a camera driving a gentle arc. Surfaces carry a deterministic
/// multi-octave noise + checker texture so that every view has both corners
/// for feature detection and intensity variation for histogram costs.
struct SceneSpec {
  int image_width = 320;
  int image_height = 240;
  int frame_count = 30;
  double focal_px = 300.0;
  double path_length_m = 12.0;
  double camera_height_m = 1.6;
  double pitch_down_deg = 18.0;
  double curve_amplitude_m = 1.2;
  int box_count = 14;
  int cloud_stride = 1;   // take every n-th pixel's surface hit into the cloud
  double texture_scale_m = 0.8;
  int texture_octaves = 4;
};

struct Box {
  Vec3 min;
  Vec3 max;
};

/// The world model itself; exposed so tests can raycast ground-truth views
/// from arbitrary poses and compare against surface points.
class SceneModel {
 public:
  SceneModel(const SceneSpec& spec, std::uint64_t seed);

  /// Nearest surface hit along the pixel ray. Returns false for sky.
  /// `world_point` receives the hit, `depth` the camera-frame z.
  bool raycast(const Intrinsics& K, const PoseSE3& pose, double px, double py,
               Vec3* world_point, double* depth) const;

  /// Ground-truth image by per-pixel raycasting (8-bit quantized).
  GrayImage raycast_image(const Intrinsics& K, const PoseSE3& pose, int width,
                          int height) const;

  /// Surface intensity at a world point.
  double texture(const Vec3& p) const;

  /// True where a world point lies on the ground plane or a box surface,
  /// within `tolerance` meters. Used by tests as the surface oracle.
  bool on_surface(const Vec3& p, double tolerance) const;

  const std::vector<Box>& boxes() const { return boxes_; }

 private:
  double sky(const Vec3& direction) const;

  SceneSpec spec_;
  std::uint64_t texture_seed_ = 0;
  std::vector<Box> boxes_;
};

/// Camera pose (world-to-camera) for parameter u in [0,1] along the path.
PoseSE3 trajectory_pose(const SceneSpec& spec, double u);

/// Full dataset: per-frame raycast image, surface-sampled world cloud
/// (float-snapped so disk round-trips are lossless), exact pose, ground tag.
DatasetIndex generate_synthetic_dataset(const SceneSpec& spec, std::uint64_t seed);

}  // namespace camreloc
