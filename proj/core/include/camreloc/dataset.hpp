#pragma once

#include <string>
#include <vector>

#include "camreloc/scene.hpp"

namespace camreloc {

/// One loaded frame: reference tuple (image, world-frame cloud, world-to-camera
/// pose) plus the 2D ground position used for radius queries.
struct DatasetFrame {
  ReferenceTuple ref;
  Vec2 ground_position = Vec2::Zero();
};

/// A sequence loaded into memory. Poses are converted from the stored
/// camera-to-world convention to world-to-camera at load time.
struct DatasetIndex {
  Intrinsics intrinsics;
  std::vector<DatasetFrame> frames;

  std::size_t size() const { return frames.size(); }
};

/// Layout on disk:
///   intrinsics.txt   fx fy cx cy skew
///   poses.txt        one line per frame, 12 reals: row-major 3x4 camera-to-world
///   images/%06d.png  8-bit grayscale
///   clouds/%06d.bin  little-endian float32 xyz triples, world frame
///   positions.txt    optional, one "x y" ground tag per frame
/// Counts must agree across poses, images and clouds. Rotations more than
/// 1e-3 from orthonormal are rejected; smaller drift is re-orthonormalized.
DatasetIndex load_dataset(const std::string& root);

void write_dataset(const std::string& root, const DatasetIndex& dataset);

void write_cloud_bin(const std::string& path, const PointCloud& cloud);
PointCloud read_cloud_bin(const std::string& path);

}  // namespace camreloc
