#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "camreloc/features.hpp"
#include "camreloc/geometry.hpp"

namespace camreloc {

enum class Method { FB, PM, MI, HY };
const char* to_string(Method m);

enum class FailureReason {
  None,
  InsufficientCorrespondences,
  NoConsensus,
  SearchDiverged,
  NoReferenceInRadius,
  NoCandidates,
  AllEstimatesFailed,
};
const char* to_string(FailureReason r);

/// Pose result with method tag and diagnostics. `pose` maps the solver's
/// source frame to the query camera frame; pipelines compose it into a world
/// pose before reporting.
struct PoseEstimate {
  PoseSE3 pose;
  Method method = Method::FB;
  int inlier_count = 0;
  double final_cost = 0.0;
  bool success = false;
  FailureReason reason = FailureReason::None;
  bool used_fallback = false;              // hybrid: true when MI stood in for FB
  FailureReason fb_reason = FailureReason::None;  // hybrid diagnostic

  static PoseEstimate failure(Method m, FailureReason r) {
    PoseEstimate e;
    e.method = m;
    e.success = false;
    e.reason = r;
    return e;
  }
};

struct RansacConfig {
  int max_iterations = 1000;
  double inlier_threshold_px = 2.0;
  double confidence = 0.99;
  std::uint64_t seed = 0;
  int refine_iterations = 10;
};

/// Minimal three-point pose (Grunert's quartic): camera poses mapping the
/// 3D-point frame into the query camera frame, up to four of them, each
/// reprojecting the three inputs to within 1e-6 px. Throws
/// DegenerateConfiguration for collinear points or no real solution.
std::vector<PoseSE3> p3p_solve(const std::array<Correspondence2D3D, 3>& corrs,
                               const Intrinsics& K);

/// Candidate with the smallest squared reprojection error of the 4th
/// correspondence; ties go to the lowest candidate index.
PoseSE3 disambiguate(const std::vector<PoseSE3>& candidates,
                     const Correspondence2D3D& fourth, const Intrinsics& K);

/// MLESAC loop over P3P hypotheses scored by truncated squared reprojection
/// error, followed by Gauss-Newton refinement on the consensus set. Never
/// throws for data failures; the estimate carries the status.
PoseEstimate mlesac_pnp(const CorrespondenceSet2D3D& corrs, const Intrinsics& K,
                        const RansacConfig& cfg);

/// Squared reprojection error of one correspondence; +inf when behind camera.
double reprojection_error2(const PoseSE3& pose, const Correspondence2D3D& c,
                           const Intrinsics& K);

}  // namespace camreloc
