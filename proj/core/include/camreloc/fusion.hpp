#pragma once

#include <vector>

#include "camreloc/pnp.hpp"

namespace camreloc {

struct WeightedPose {
  PoseEstimate estimate;
  double weight = 0.0;  // match count for feature-derived weights
  int source_id = -1;
};

/// Weighted chordal-mean rotation: dominant eigenvector of sum w_i q_i q_i^T.
/// Insensitive to the sign of each input quaternion. Throws AllZeroWeights.
UnitQuaternion average_rotations(const std::vector<UnitQuaternion>& quaternions,
                                 const std::vector<double>& weights);

/// Uniform average of the successful estimates. Throws NoSuccessfulEstimates.
PoseSE3 fuse_avg(const std::vector<PoseEstimate>& estimates);

/// Weighted average over successful estimates; rotation by quaternion
/// averaging, translation by the weighted mean of translation vectors.
PoseSE3 fuse_wavg(const std::vector<WeightedPose>& weighted);

/// The estimate of the reference with the most matched features; ties go to
/// the lowest source id. Forwards that reference's failure as an Error.
PoseSE3 fuse_maxf(const std::vector<WeightedPose>& weighted);

/// Robust weighted average: keep references whose match count is at least
/// half of the maximum count, then weighted-average those.
PoseSE3 fuse_rwavg(const std::vector<WeightedPose>& weighted);

}  // namespace camreloc
