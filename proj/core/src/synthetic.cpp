#include "camreloc/synthetic.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "camreloc/rng.hpp"

namespace camreloc {

namespace {

double lattice_hash(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::int64_t iz) {
  std::uint64_t h = mix_seed(seed, static_cast<std::uint64_t>(ix) * 0x8da6b343ULL);
  h = mix_seed(h, static_cast<std::uint64_t>(iy) * 0xd8163841ULL);
  h = mix_seed(h, static_cast<std::uint64_t>(iz) * 0xcb1ab31fULL);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, const Vec3& p) {
  const double fx = std::floor(p.x());
  const double fy = std::floor(p.y());
  const double fz = std::floor(p.z());
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const double tx = smoothstep(p.x() - fx);
  const double ty = smoothstep(p.y() - fy);
  const double tz = smoothstep(p.z() - fz);
  double acc = 0.0;
  for (int dz = 0; dz <= 1; ++dz) {
    const double wz = dz ? tz : 1.0 - tz;
    for (int dy = 0; dy <= 1; ++dy) {
      const double wy = dy ? ty : 1.0 - ty;
      for (int dx = 0; dx <= 1; ++dx) {
        const double wx = dx ? tx : 1.0 - tx;
        acc += wx * wy * wz * lattice_hash(seed, ix + dx, iy + dy, iz + dz);
      }
    }
  }
  return acc;
}

// Slab intersection; returns the entry parameter or +inf.
double intersect_box(const Box& box, const Vec3& origin, const Vec3& dir) {
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dir[a]) < 1e-15) {
      if (origin[a] < box.min[a] || origin[a] > box.max[a]) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    double t0 = (box.min[a] - origin[a]) / dir[a];
    double t1 = (box.max[a] - origin[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::numeric_limits<double>::infinity();
  }
  return t_near > 1e-9 ? t_near : std::numeric_limits<double>::infinity();
}

Vec3 snap_to_float(const Vec3& p) {
  return Vec3(static_cast<float>(p.x()), static_cast<float>(p.y()),
              static_cast<float>(p.z()));
}

}  // namespace

SceneModel::SceneModel(const SceneSpec& spec, std::uint64_t seed)
    : spec_(spec), texture_seed_(mix_seed(seed, 0x7e57)) {
  Rng rng(mix_seed(seed, 17));
  boxes_.reserve(spec.box_count);
  const double half = spec.path_length_m / 2.0 + 4.0;
  for (int i = 0; i < spec.box_count; ++i) {
    const double cx = rng.uniform(-half, half);
    // keep the corridor the path wanders through free of boxes
    const double side = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    const double cy = side * rng.uniform(2.6, 7.0);
    const double sx = rng.uniform(0.6, 2.2);
    const double sy = rng.uniform(0.6, 2.2);
    const double sz = rng.uniform(0.6, 2.4);
    Box box;
    box.min = Vec3(cx - sx / 2.0, cy - sy / 2.0, 0.0);
    box.max = Vec3(cx + sx / 2.0, cy + sy / 2.0, sz);
    boxes_.push_back(box);
  }
}

double SceneModel::texture(const Vec3& p) const {
  const double base = 1.0 / spec_.texture_scale_m;
  double acc = 0.0;
  double amp = 1.0;
  double total = 0.0;
  for (int o = 0; o < spec_.texture_octaves; ++o) {
    const double freq = base * std::pow(2.0, o);
    acc += amp * value_noise(mix_seed(texture_seed_, o), p * freq);
    total += amp;
    amp *= 0.55;
  }
  const double noise = acc / total;
  const double cell = 0.5;
  const auto parity = static_cast<std::int64_t>(std::floor(p.x() / cell)) +
                      static_cast<std::int64_t>(std::floor(p.y() / cell)) +
                      static_cast<std::int64_t>(std::floor(p.z() / cell));
  const double checker = (parity & 1) ? 1.0 : 0.0;
  return std::clamp(0.12 + 0.5 * noise + 0.28 * checker, 0.0, 1.0);
}

double SceneModel::sky(const Vec3& direction) const {
  return 0.75 + 0.2 * std::clamp(direction.z(), 0.0, 1.0);
}

bool SceneModel::raycast(const Intrinsics& K, const PoseSE3& pose, double px, double py,
                         Vec3* world_point, double* depth) const {
  const double yc = (py - K.cy) / K.fy;
  const double xc = (px - K.cx - K.skew * yc) / K.fx;
  const Vec3 dir_cam(xc, yc, 1.0);  // z component 1: ray parameter equals depth
  const Vec3 origin = pose.center();
  const Vec3 dir = pose.rotation().transpose() * dir_cam;

  double best = std::numeric_limits<double>::infinity();
  if (dir.z() < -1e-12 && origin.z() > 0.0) {
    best = -origin.z() / dir.z();
  }
  for (const Box& box : boxes_) {
    best = std::min(best, intersect_box(box, origin, dir));
  }
  if (!std::isfinite(best)) return false;
  if (world_point) *world_point = origin + best * dir;
  if (depth) *depth = best;
  return true;
}

GrayImage SceneModel::raycast_image(const Intrinsics& K, const PoseSE3& pose, int width,
                                    int height) const {
  GrayImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      Vec3 hit;
      if (raycast(K, pose, x, y, &hit, nullptr)) {
        img.at(x, y) = texture(hit);
      } else {
        const double yc = (y - K.cy) / K.fy;
        const double xc = (x - K.cx - K.skew * yc) / K.fx;
        const Vec3 dir = (pose.rotation().transpose() * Vec3(xc, yc, 1.0)).normalized();
        img.at(x, y) = sky(dir);
      }
    }
  }
  return quantize8(img);
}

bool SceneModel::on_surface(const Vec3& p, double tolerance) const {
  if (std::abs(p.z()) <= tolerance) return true;
  for (const Box& box : boxes_) {
    const Vec3 clamped(std::clamp(p.x(), box.min.x(), box.max.x()),
                       std::clamp(p.y(), box.min.y(), box.max.y()),
                       std::clamp(p.z(), box.min.z(), box.max.z()));
    if ((p - clamped).norm() <= tolerance) {
      // near the box volume; require proximity to an actual face
      const double dx = std::min(std::abs(p.x() - box.min.x()), std::abs(p.x() - box.max.x()));
      const double dy = std::min(std::abs(p.y() - box.min.y()), std::abs(p.y() - box.max.y()));
      const double dz = std::min(std::abs(p.z() - box.min.z()), std::abs(p.z() - box.max.z()));
      if (std::min({dx, dy, dz}) <= tolerance) return true;
    }
  }
  return false;
}

PoseSE3 trajectory_pose(const SceneSpec& spec, double u) {
  const double x = (u - 0.5) * spec.path_length_m;
  const double omega = 2.0 * kPi * 0.7 / std::max(spec.path_length_m, 1e-9);
  const double y = spec.curve_amplitude_m * std::sin(omega * x);
  const Vec3 center(x, y, spec.camera_height_m);

  Vec3 forward_h(1.0, spec.curve_amplitude_m * omega * std::cos(omega * x), 0.0);
  forward_h.normalize();
  const Vec3 up(0.0, 0.0, 1.0);
  const double pitch = deg2rad(spec.pitch_down_deg);
  const Vec3 forward = std::cos(pitch) * forward_h - std::sin(pitch) * up;
  const Vec3 right = forward_h.cross(up).normalized();
  const Vec3 down = forward.cross(right);

  Mat3 r_cw;
  r_cw.col(0) = right;
  r_cw.col(1) = down;
  r_cw.col(2) = forward;
  // orthonormalize against accumulated trig round-off
  Eigen::JacobiSVD<Mat3> svd(r_cw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r_cw = svd.matrixU() * svd.matrixV().transpose();
  return PoseSE3(r_cw.transpose(), -(r_cw.transpose() * center));
}

DatasetIndex generate_synthetic_dataset(const SceneSpec& spec, std::uint64_t seed) {
  const SceneModel model(spec, seed);
  DatasetIndex dataset;
  const double cx = (spec.image_width - 1) / 2.0;
  const double cy = (spec.image_height - 1) / 2.0;
  dataset.intrinsics = Intrinsics(spec.focal_px, spec.focal_px, cx, cy, 0.0);
  const Intrinsics& K = dataset.intrinsics;

  for (int f = 0; f < spec.frame_count; ++f) {
    const double u = spec.frame_count > 1
                         ? static_cast<double>(f) / (spec.frame_count - 1)
                         : 0.0;
    const PoseSE3 pose = trajectory_pose(spec, u);

    DatasetFrame frame;
    frame.ref.id = f;
    frame.ref.pose = pose;
    frame.ref.image = model.raycast_image(K, pose, spec.image_width, spec.image_height);
    for (int y = 0; y < spec.image_height; y += spec.cloud_stride) {
      for (int x = 0; x < spec.image_width; x += spec.cloud_stride) {
        Vec3 hit;
        if (model.raycast(K, pose, x, y, &hit, nullptr)) {
          frame.ref.cloud.points.push_back(snap_to_float(hit));
        }
      }
    }
    const Vec3 c = pose.center();
    frame.ground_position = Vec2(c.x(), c.y());
    dataset.frames.push_back(std::move(frame));
  }
  return dataset;
}

}  // namespace camreloc
