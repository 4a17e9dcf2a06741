#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "camreloc/dataset.hpp"
#include "camreloc/direct_align.hpp"
#include "camreloc/fusion.hpp"
#include "camreloc/metrics.hpp"
#include "camreloc/retrieval.hpp"

namespace camreloc {

enum class FusionStrategy { MaxF, Avg, WAvg, RWAvg };
const char* to_string(FusionStrategy s);
std::optional<FusionStrategy> parse_fusion(const std::string& name);
std::optional<Method> parse_method(const std::string& name);

struct PipelineConfig {
  DetectorConfig detector;
  double match_ratio = 0.8;
  double lift_gate_px = 3.0;
  RansacConfig ransac;
  DirectConfig direct;
};

/// Feature-based estimate. The relative pose from PnP lives in the reference
/// camera frame; the returned pose is the query's world-to-camera transform.
PoseEstimate estimate_fb(const GrayImage& query, const ReferenceTuple& ref,
                         const Intrinsics& K, const PipelineConfig& cfg);

PoseEstimate estimate_pm(const GrayImage& query, const ReferenceTuple& ref,
                         const Intrinsics& K, const PipelineConfig& cfg);

PoseEstimate estimate_mi(const GrayImage& query, const ReferenceTuple& ref,
                         const Intrinsics& K, const PipelineConfig& cfg);

/// FB first; on FB failure (too few correspondences or no consensus) fall
/// back to MI. The winning branch's pose is returned unchanged, tagged HY.
PoseEstimate estimate_hybrid(const GrayImage& query, const ReferenceTuple& ref,
                             const Intrinsics& K, const PipelineConfig& cfg);

PoseEstimate estimate(Method method, const GrayImage& query, const ReferenceTuple& ref,
                      const Intrinsics& K, const PipelineConfig& cfg);

/// One query into the runners: the image may be corruption-transformed, the
/// ground truth never is.
struct QueryInput {
  int id = -1;
  const GrayImage* image = nullptr;
  PoseSE3 ground_truth;  // world-to-camera
  Vec2 ground_position = Vec2::Zero();
};

/// Shared reference pool with precomputed reference features, so FB matching
/// and match-count weights do not re-detect per query. Immutable after
/// construction; safe for concurrent queries.
class PipelineRunner {
 public:
  PipelineRunner(const DatasetIndex& dataset, std::vector<int> reference_ids,
                 PipelineConfig cfg);

  /// Uniformly pick one reference inside the uncertainty radius (seeded) and
  /// estimate. No reference in range yields a NoReferenceInRadius record.
  ResultRecord run_single_reference(const QueryInput& query, double radius_m, Method method,
                                    std::uint64_t seed) const;

  /// Sample k references without replacement inside the radius (fewer than k
  /// available degrades to all, visible in the record), estimate per
  /// reference and fuse with the chosen strategy.
  ResultRecord run_multi_reference(const QueryInput& query, double radius_m, Method method,
                                   int k, FusionStrategy fusion, std::uint64_t seed) const;

  /// Retrieval-driven pipeline: rank references by bag-of-words similarity
  /// (restricted to the prior radius when one is given), take the top k,
  /// estimate per reference and fuse with the robust weighted average.
  ResultRecord run_large_uncertainty(const QueryInput& query, const InvertedIndex& index,
                                     std::optional<double> prior_radius_m, Method method,
                                     int k, std::uint64_t seed) const;

  const std::vector<const DatasetFrame*>& references() const { return references_; }
  const Intrinsics& intrinsics() const { return intrinsics_; }
  const PipelineConfig& config() const { return config_; }
  const FeatureSet& reference_features(int id) const { return reference_features_.at(id); }

 private:
  struct Estimated {
    WeightedPose weighted;
    const DatasetFrame* frame = nullptr;
  };

  PoseEstimate estimate_for(Method method, const GrayImage& query,
                            const FeatureSet& query_features, const DatasetFrame& frame,
                            std::uint64_t seed) const;
  ResultRecord finish_record(const QueryInput& query, Method method,
                             const PoseEstimate& estimate,
                             std::vector<int> reference_ids) const;

  Intrinsics intrinsics_;
  std::vector<const DatasetFrame*> references_;  // ordered by frame id
  PipelineConfig config_;
  std::unordered_map<int, FeatureSet> reference_features_;
};

}  // namespace camreloc
