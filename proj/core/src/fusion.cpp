#include "camreloc/fusion.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace camreloc {

UnitQuaternion average_rotations(const std::vector<UnitQuaternion>& quaternions,
                                 const std::vector<double>& weights) {
  if (quaternions.empty() || quaternions.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "need matching, nonempty quaternion/weight lists");
  }
  double total = 0.0;
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  for (std::size_t i = 0; i < quaternions.size(); ++i) {
    if (weights[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "weights must be non-negative");
    }
    total += weights[i];
    const Eigen::Vector4d q = quaternions[i].coeffs_wxyz();
    acc += weights[i] * (q * q.transpose());
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::AllZeroWeights, "all rotation weights are zero");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(acc);
  const Eigen::Vector4d v = eig.eigenvectors().col(3);  // largest eigenvalue
  return UnitQuaternion::normalized(v[0], v[1], v[2], v[3]).canonical();
}

namespace {

PoseSE3 weighted_mean_pose(const std::vector<const PoseEstimate*>& estimates,
                           const std::vector<double>& raw_weights) {
  if (estimates.size() == 1) return estimates[0]->pose;  // exact, no round-trip
  bool all_same = true;
  for (std::size_t i = 1; i < estimates.size() && all_same; ++i) {
    all_same = estimates[i]->pose == estimates[0]->pose;
  }
  if (all_same) return estimates[0]->pose;

  // Scale-invariant weights: proportional inputs give identical output.
  double w_max = 0.0;
  for (const double w : raw_weights) w_max = std::max(w_max, w);
  if (!(w_max > 0.0)) {
    throw Error(ErrorCode::AllZeroWeights, "all fusion weights are zero");
  }
  std::vector<double> weights(raw_weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = raw_weights[i] / w_max;

  std::vector<UnitQuaternion> quats;
  quats.reserve(estimates.size());
  Vec3 t_acc = Vec3::Zero();
  double total = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    quats.push_back(rotation_to_quaternion(estimates[i]->pose.rotation()));
    t_acc += weights[i] * estimates[i]->pose.translation();
    total += weights[i];
  }
  const UnitQuaternion q = average_rotations(quats, weights);
  return PoseSE3(quaternion_to_rotation(q), t_acc / total);
}

}  // namespace

PoseSE3 fuse_avg(const std::vector<PoseEstimate>& estimates) {
  std::vector<const PoseEstimate*> ok;
  for (const auto& e : estimates) {
    if (e.success) ok.push_back(&e);
  }
  if (ok.empty()) {
    throw Error(ErrorCode::NoSuccessfulEstimates, "nothing to average");
  }
  const std::vector<double> weights(ok.size(), 1.0);
  return weighted_mean_pose(ok, weights);
}

PoseSE3 fuse_wavg(const std::vector<WeightedPose>& weighted) {
  bool any_success = false;
  std::vector<const PoseEstimate*> ok;
  std::vector<double> weights;
  for (const auto& w : weighted) {
    if (!w.estimate.success) continue;
    any_success = true;
    if (w.weight == 0.0) continue;  // zero weight contributes nothing, drop it
    ok.push_back(&w.estimate);
    weights.push_back(w.weight);
  }
  if (!any_success) {
    throw Error(ErrorCode::NoSuccessfulEstimates, "nothing to average");
  }
  if (ok.empty()) {
    throw Error(ErrorCode::AllZeroWeights, "all fusion weights are zero");
  }
  return weighted_mean_pose(ok, weights);
}

PoseSE3 fuse_maxf(const std::vector<WeightedPose>& weighted) {
  if (weighted.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no references to choose from");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < weighted.size(); ++i) {
    if (weighted[i].weight > weighted[best].weight) best = i;
    // ties keep the earlier (lowest source id) entry
  }
  const PoseEstimate& chosen = weighted[best].estimate;
  if (!chosen.success) {
    throw Error(ErrorCode::NoSuccessfulEstimates,
                "reference with most matches failed to localize");
  }
  return chosen.pose;
}

PoseSE3 fuse_rwavg(const std::vector<WeightedPose>& weighted) {
  if (weighted.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no references to choose from");
  }
  double k_max = 0.0;
  for (const auto& w : weighted) k_max = std::max(k_max, w.weight);
  std::vector<WeightedPose> selected;
  for (const auto& w : weighted) {
    if (w.weight >= k_max / 2.0) selected.push_back(w);
  }
  return fuse_wavg(selected);
}

}  // namespace camreloc
