#pragma once

#include <vector>

#include "camreloc/pnp.hpp"
#include "camreloc/scene.hpp"
#include "camreloc/similarity.hpp"

namespace camreloc {

enum class CostKind { Photometric, MutualInformation };
const char* to_string(CostKind k);

/// Camera-frame axes the search grids move along. Up is the negative of the
/// image down axis, matching a camera whose +y looks at the ground.
enum class CameraAxis { Right, Down, Forward, Up };
Vec3 axis_vector(CameraAxis a);

struct GridSearchConfig {
  double extent_m = 15.0;       // half-width of the coarse translation grid
  double step1_m = 1.0;         // coarse translation step
  double step2_m = 0.2;         // fine translation step
  double alpha1_deg = 10.0;     // coarse yaw half-range
  double alpha2_deg = 2.0;      // fine yaw half-range
  int steps_per_side = 5;       // N; each yaw pass takes 2N-1 samples
  CameraAxis trans_axis_a = CameraAxis::Right;
  CameraAxis trans_axis_b = CameraAxis::Forward;
  CameraAxis yaw_axis = CameraAxis::Up;
};

struct DirectConfig {
  GridSearchConfig grid;
  double smoothing_sigma = 1.0;   // applied to the query before matching
  int histogram_bins = 64;
  double splat_radius_px = 1.0;
  double ceiling_photometric = 0.05;  // accept only final costs at or below
  double ceiling_mi = 0.5;
};

/// One evaluated grid cell, for debugging dumps and coverage checks.
struct CostSample {
  int pass = 0;         // 0 coarse translation, 1 fine translation, 2 coarse yaw, 3 fine yaw
  double offset_a = 0.0;  // meters along axis a, or yaw degrees for yaw passes
  double offset_b = 0.0;  // meters along axis b; unused for yaw passes
  double cost = 0.0;
};
using EvaluationLog = std::vector<CostSample>;

/// Move the camera center along its own axes, keeping the orientation.
PoseSE3 offset_camera(const PoseSE3& pose, CameraAxis axis_a, double amount_a,
                      CameraAxis axis_b, double amount_b);

/// Rotate the camera in place about one of its own axes.
PoseSE3 rotate_camera(const PoseSE3& pose, CameraAxis axis, double angle_deg);

/// Render the colored cloud at M and compare against the (pre-smoothed) query:
/// robust RSE for Photometric, 1 - NMI for MutualInformation. Degenerate
/// hypotheses (no overlap, constant view) evaluate to +infinity.
double evaluate_cost(CostKind kind, const GrayImage& query, const ColoredPointCloud& cloud,
                     const Intrinsics& K, const PoseSE3& M, const DirectConfig& cfg);

/// Two-pass grid search over the two translation axes, centered on M0.
/// Throws Error(AllInfinite-like EmptyResult) never; returns status through
/// the infinite-cost sentinel: callers check the returned cost.
struct SearchResult {
  PoseSE3 pose;
  double cost = 0.0;
  bool all_infinite = false;
};

SearchResult coarse_to_fine_translation(CostKind kind, const GrayImage& query,
                                        const ColoredPointCloud& cloud, const Intrinsics& K,
                                        const PoseSE3& M0, const DirectConfig& cfg,
                                        EvaluationLog* log = nullptr);

SearchResult coarse_to_fine_yaw(CostKind kind, const GrayImage& query,
                                const ColoredPointCloud& cloud, const Intrinsics& K,
                                const PoseSE3& M1, const DirectConfig& cfg,
                                EvaluationLog* log = nullptr);

/// Full direct pipeline for one reference tuple: colorize, smooth the query,
/// translation search from the reference pose, then yaw search. The estimate
/// reports the achieved cost; SearchDiverged when every hypothesis was
/// rejected or the final cost exceeds the configured ceiling.
PoseEstimate estimate_direct(CostKind kind, const GrayImage& query, const ReferenceTuple& ref,
                             const Intrinsics& K, const DirectConfig& cfg,
                             EvaluationLog* log = nullptr);

}  // namespace camreloc
