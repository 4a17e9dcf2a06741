#include "camreloc/direct_align.hpp"

#include <cmath>
#include <limits>

namespace camreloc {

const char* to_string(CostKind k) {
  return k == CostKind::Photometric ? "photometric" : "mutual_information";
}

Vec3 axis_vector(CameraAxis a) {
  switch (a) {
    case CameraAxis::Right: return Vec3(1.0, 0.0, 0.0);
    case CameraAxis::Down: return Vec3(0.0, 1.0, 0.0);
    case CameraAxis::Forward: return Vec3(0.0, 0.0, 1.0);
    case CameraAxis::Up: return Vec3(0.0, -1.0, 0.0);
  }
  return Vec3::Zero();
}

PoseSE3 offset_camera(const PoseSE3& pose, CameraAxis axis_a, double amount_a,
                      CameraAxis axis_b, double amount_b) {
  // Moving the center by d (camera frame) keeps R and maps t -> t - d.
  const Vec3 d = amount_a * axis_vector(axis_a) + amount_b * axis_vector(axis_b);
  return PoseSE3(pose.rotation(), pose.translation() - d);
}

PoseSE3 rotate_camera(const PoseSE3& pose, CameraAxis axis, double angle_deg) {
  const Mat3 a = rotation_about_axis(axis_vector(axis), deg2rad(angle_deg));
  // Center stays fixed: M' = [A R | A t].
  return PoseSE3(a * pose.rotation(), a * pose.translation());
}

double evaluate_cost(CostKind kind, const GrayImage& query, const ColoredPointCloud& cloud,
                     const Intrinsics& K, const PoseSE3& M, const DirectConfig& cfg) {
  const SyntheticView view =
      render(cloud, K, M, query.width(), query.height(), cfg.splat_radius_px);
  try {
    if (kind == CostKind::Photometric) {
      return robust_rse(query, view.image);
    }
    return 1.0 - nmi(query, view.image, cfg.histogram_bins);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyOverlap || e.code() == ErrorCode::DegenerateImage) {
      return std::numeric_limits<double>::infinity();
    }
    throw;
  }
}

namespace {

struct GridBest {
  double cost = std::numeric_limits<double>::infinity();
  PoseSE3 pose;
  bool found = false;
};

// Lattice i*step for i in [-n, n]; scan order gives the deterministic
// lexicographic tie-break (strictly-smaller cost wins).
void scan_translation(CostKind kind, const GrayImage& query, const ColoredPointCloud& cloud,
                      const Intrinsics& K, const PoseSE3& center, const DirectConfig& cfg,
                      double half_width, double step, int pass, GridBest& best,
                      EvaluationLog* log) {
  const int n = static_cast<int>(std::floor(half_width / step + 1e-9));
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      const double da = i * step;
      const double db = j * step;
      const PoseSE3 pose =
          offset_camera(center, cfg.grid.trans_axis_a, da, cfg.grid.trans_axis_b, db);
      const double cost = evaluate_cost(kind, query, cloud, K, pose, cfg);
      if (log) log->push_back(CostSample{pass, da, db, cost});
      if (cost < best.cost) {
        best.cost = cost;
        best.pose = pose;
        best.found = true;
      }
    }
  }
}

void scan_yaw(CostKind kind, const GrayImage& query, const ColoredPointCloud& cloud,
              const Intrinsics& K, const PoseSE3& center, const DirectConfig& cfg,
              double half_range_deg, int pass, GridBest& best, EvaluationLog* log) {
  const int n = cfg.grid.steps_per_side;
  const double step = half_range_deg / (n - 1);  // 2N-1 samples across 2*alpha
  for (int k = -(n - 1); k <= n - 1; ++k) {
    const double angle = k * step;
    const PoseSE3 pose = rotate_camera(center, cfg.grid.yaw_axis, angle);
    const double cost = evaluate_cost(kind, query, cloud, K, pose, cfg);
    if (log) log->push_back(CostSample{pass, angle, 0.0, cost});
    if (cost < best.cost) {
      best.cost = cost;
      best.pose = pose;
      best.found = true;
    }
  }
}

}  // namespace

SearchResult coarse_to_fine_translation(CostKind kind, const GrayImage& query,
                                        const ColoredPointCloud& cloud, const Intrinsics& K,
                                        const PoseSE3& M0, const DirectConfig& cfg,
                                        EvaluationLog* log) {
  GridBest coarse;
  scan_translation(kind, query, cloud, K, M0, cfg, cfg.grid.extent_m, cfg.grid.step1_m, 0,
                   coarse, log);
  SearchResult res;
  if (!coarse.found) {
    res.all_infinite = true;
    res.pose = M0;
    res.cost = std::numeric_limits<double>::infinity();
    return res;
  }
  GridBest fine = coarse;  // keep the coarse winner unless the fine pass improves it
  scan_translation(kind, query, cloud, K, coarse.pose, cfg, cfg.grid.step1_m, cfg.grid.step2_m,
                   1, fine, log);
  res.pose = fine.pose;
  res.cost = fine.cost;
  return res;
}

SearchResult coarse_to_fine_yaw(CostKind kind, const GrayImage& query,
                                const ColoredPointCloud& cloud, const Intrinsics& K,
                                const PoseSE3& M1, const DirectConfig& cfg,
                                EvaluationLog* log) {
  GridBest coarse;
  scan_yaw(kind, query, cloud, K, M1, cfg, cfg.grid.alpha1_deg, 2, coarse, log);
  SearchResult res;
  if (!coarse.found) {
    res.all_infinite = true;
    res.pose = M1;
    res.cost = std::numeric_limits<double>::infinity();
    return res;
  }
  GridBest fine = coarse;
  scan_yaw(kind, query, cloud, K, coarse.pose, cfg, cfg.grid.alpha2_deg, 3, fine, log);
  res.pose = fine.pose;
  res.cost = fine.cost;
  return res;
}

PoseEstimate estimate_direct(CostKind kind, const GrayImage& query, const ReferenceTuple& ref,
                             const Intrinsics& K, const DirectConfig& cfg, EvaluationLog* log) {
  const Method method = kind == CostKind::Photometric ? Method::PM : Method::MI;
  ColoredPointCloud colored;
  try {
    colored = colorize(ref, K);
  } catch (const Error&) {
    return PoseEstimate::failure(method, FailureReason::SearchDiverged);
  }
  const GrayImage smoothed = gaussian_smooth(query, cfg.smoothing_sigma);

  const SearchResult trans =
      coarse_to_fine_translation(kind, smoothed, colored, K, ref.pose, cfg, log);
  if (trans.all_infinite) {
    return PoseEstimate::failure(method, FailureReason::SearchDiverged);
  }
  const SearchResult yaw = coarse_to_fine_yaw(kind, smoothed, colored, K, trans.pose, cfg, log);
  if (yaw.all_infinite) {
    return PoseEstimate::failure(method, FailureReason::SearchDiverged);
  }

  const double ceiling =
      kind == CostKind::Photometric ? cfg.ceiling_photometric : cfg.ceiling_mi;
  PoseEstimate est;
  est.method = method;
  est.pose = yaw.pose;
  est.final_cost = yaw.cost;
  if (!(yaw.cost <= ceiling)) {
    est.success = false;
    est.reason = FailureReason::SearchDiverged;
    return est;
  }
  est.success = true;
  return est;
}

}  // namespace camreloc
