#include "camreloc/pipelines.hpp"

#include <algorithm>
#include <limits>

#include "camreloc/rng.hpp"

namespace camreloc {

const char* to_string(FusionStrategy s) {
  switch (s) {
    case FusionStrategy::MaxF: return "maxf";
    case FusionStrategy::Avg: return "avg";
    case FusionStrategy::WAvg: return "wavg";
    case FusionStrategy::RWAvg: return "rwavg";
  }
  return "?";
}

std::optional<FusionStrategy> parse_fusion(const std::string& name) {
  if (name == "maxf") return FusionStrategy::MaxF;
  if (name == "avg") return FusionStrategy::Avg;
  if (name == "wavg") return FusionStrategy::WAvg;
  if (name == "rwavg" || name == "r-wavg") return FusionStrategy::RWAvg;
  return std::nullopt;
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "fb") return Method::FB;
  if (name == "pm") return Method::PM;
  if (name == "mi") return Method::MI;
  if (name == "hy") return Method::HY;
  return std::nullopt;
}

namespace {

PoseEstimate estimate_fb_impl(const FeatureSet& query_features,
                              const FeatureSet& reference_features, const GrayImage&,
                              const ReferenceTuple& ref, const Intrinsics& K,
                              const PipelineConfig& cfg) {
  MatchSet2D2D matches =
      match_ratio(query_features.descriptors, reference_features.descriptors, cfg.match_ratio);
  CorrespondenceSet2D3D corrs;
  try {
    corrs = build_2d3d(matches, query_features.keypoints, reference_features.keypoints, ref, K,
                       cfg.lift_gate_px);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoCorrespondences) {
      return PoseEstimate::failure(Method::FB, FailureReason::InsufficientCorrespondences);
    }
    throw;
  }
  PoseEstimate est = mlesac_pnp(corrs, K, cfg.ransac);
  if (!est.success) return est;
  // relative (reference camera -> query camera) composed onto the world pose
  est.pose = compose(est.pose, ref.pose);
  return est;
}

PoseEstimate tag_hybrid(PoseEstimate inner, bool fell_back, FailureReason fb_reason) {
  inner.method = Method::HY;
  inner.used_fallback = fell_back;
  inner.fb_reason = fb_reason;
  return inner;
}

}  // namespace

PoseEstimate estimate_fb(const GrayImage& query, const ReferenceTuple& ref, const Intrinsics& K,
                         const PipelineConfig& cfg) {
  const FeatureSet qf = detect_and_describe(query, cfg.detector);
  const FeatureSet rf = detect_and_describe(ref.image, cfg.detector);
  return estimate_fb_impl(qf, rf, query, ref, K, cfg);
}

PoseEstimate estimate_pm(const GrayImage& query, const ReferenceTuple& ref, const Intrinsics& K,
                         const PipelineConfig& cfg) {
  return estimate_direct(CostKind::Photometric, query, ref, K, cfg.direct);
}

PoseEstimate estimate_mi(const GrayImage& query, const ReferenceTuple& ref, const Intrinsics& K,
                         const PipelineConfig& cfg) {
  return estimate_direct(CostKind::MutualInformation, query, ref, K, cfg.direct);
}

PoseEstimate estimate_hybrid(const GrayImage& query, const ReferenceTuple& ref,
                             const Intrinsics& K, const PipelineConfig& cfg) {
  const PoseEstimate fb = estimate_fb(query, ref, K, cfg);
  if (fb.success) return tag_hybrid(fb, false, FailureReason::None);
  const PoseEstimate mi = estimate_mi(query, ref, K, cfg);
  return tag_hybrid(mi, true, fb.reason);
}

PoseEstimate estimate(Method method, const GrayImage& query, const ReferenceTuple& ref,
                      const Intrinsics& K, const PipelineConfig& cfg) {
  switch (method) {
    case Method::FB: return estimate_fb(query, ref, K, cfg);
    case Method::PM: return estimate_pm(query, ref, K, cfg);
    case Method::MI: return estimate_mi(query, ref, K, cfg);
    case Method::HY: return estimate_hybrid(query, ref, K, cfg);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

PipelineRunner::PipelineRunner(const DatasetIndex& dataset, std::vector<int> reference_ids,
                               PipelineConfig cfg)
    : intrinsics_(dataset.intrinsics), config_(std::move(cfg)) {
  std::sort(reference_ids.begin(), reference_ids.end());
  for (const int id : reference_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= dataset.size()) {
      throw Error(ErrorCode::InvalidArgument, "reference id out of range");
    }
    references_.push_back(&dataset.frames[id]);
  }
  for (const DatasetFrame* frame : references_) {
    reference_features_.emplace(frame->ref.id,
                                detect_and_describe(frame->ref.image, config_.detector));
  }
}

PoseEstimate PipelineRunner::estimate_for(Method method, const GrayImage& query,
                                          const FeatureSet& query_features,
                                          const DatasetFrame& frame,
                                          std::uint64_t seed) const {
  PipelineConfig cfg = config_;
  // One seed per (query, reference) pair; independent of the method so the
  // hybrid FB branch reproduces the standalone FB estimate bit for bit.
  cfg.ransac.seed = seed;
  const FeatureSet& rf = reference_features_.at(frame.ref.id);
  switch (method) {
    case Method::FB:
      return estimate_fb_impl(query_features, rf, query, frame.ref, intrinsics_, cfg);
    case Method::PM:
      return estimate_direct(CostKind::Photometric, query, frame.ref, intrinsics_, cfg.direct);
    case Method::MI:
      return estimate_direct(CostKind::MutualInformation, query, frame.ref, intrinsics_,
                             cfg.direct);
    case Method::HY: {
      const PoseEstimate fb =
          estimate_fb_impl(query_features, rf, query, frame.ref, intrinsics_, cfg);
      if (fb.success) return tag_hybrid(fb, false, FailureReason::None);
      const PoseEstimate mi =
          estimate_direct(CostKind::MutualInformation, query, frame.ref, intrinsics_, cfg.direct);
      return tag_hybrid(mi, true, fb.reason);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

ResultRecord PipelineRunner::finish_record(const QueryInput& query, Method method,
                                           const PoseEstimate& estimate,
                                           std::vector<int> reference_ids) const {
  ResultRecord rec;
  rec.query_id = query.id;
  rec.method = method;
  rec.success = estimate.success;
  rec.reason = estimate.reason;
  rec.inlier_count = estimate.inlier_count;
  rec.final_cost = estimate.final_cost;
  rec.reference_count = static_cast<int>(reference_ids.size());
  rec.reference_ids = std::move(reference_ids);
  if (estimate.success) {
    rec.translation_error_m = translation_error(query.ground_truth, estimate.pose);
    rec.orientation_error_deg = max_orientation_error(query.ground_truth, estimate.pose);
  }
  return rec;
}

namespace {

std::vector<const DatasetFrame*> within_radius(const std::vector<const DatasetFrame*>& pool,
                                               const Vec2& center, double radius_m) {
  std::vector<const DatasetFrame*> out;
  for (const DatasetFrame* f : pool) {
    if ((f->ground_position - center).norm() <= radius_m) out.push_back(f);
  }
  return out;
}

std::uint64_t pair_seed(std::uint64_t seed, int query_id, int ref_id) {
  return mix_seed(mix_seed(seed, static_cast<std::uint64_t>(query_id) + 1),
                  static_cast<std::uint64_t>(ref_id) + 0x9e37);
}

}  // namespace

ResultRecord PipelineRunner::run_single_reference(const QueryInput& query, double radius_m,
                                                  Method method, std::uint64_t seed) const {
  const auto candidates = within_radius(references_, query.ground_position, radius_m);
  if (candidates.empty()) {
    return finish_record(query, method,
                         PoseEstimate::failure(method, FailureReason::NoReferenceInRadius), {});
  }
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(query.id) * 2 + 1));
  const DatasetFrame* chosen = candidates[rng.uniform_index(candidates.size())];
  const FeatureSet qf = (method == Method::PM || method == Method::MI)
                            ? FeatureSet{}
                            : detect_and_describe(*query.image, config_.detector);
  const PoseEstimate est = estimate_for(method, *query.image, qf, *chosen,
                                        pair_seed(seed, query.id, chosen->ref.id));
  return finish_record(query, method, est, {chosen->ref.id});
}

ResultRecord PipelineRunner::run_multi_reference(const QueryInput& query, double radius_m,
                                                 Method method, int k, FusionStrategy fusion,
                                                 std::uint64_t seed) const {
  if (k < 1) {
    throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  }
  const auto candidates = within_radius(references_, query.ground_position, radius_m);
  if (candidates.empty()) {
    return finish_record(query, method,
                         PoseEstimate::failure(method, FailureReason::NoReferenceInRadius), {});
  }
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(query.id) * 2 + 1));
  const std::size_t k_eff = std::min<std::size_t>(k, candidates.size());
  const auto picks = rng.sample_without_replacement(candidates.size(), k_eff);
  std::vector<const DatasetFrame*> sampled;
  sampled.reserve(k_eff);
  for (const std::size_t p : picks) sampled.push_back(candidates[p]);
  std::sort(sampled.begin(), sampled.end(),
            [](const DatasetFrame* a, const DatasetFrame* b) { return a->ref.id < b->ref.id; });

  const FeatureSet qf = detect_and_describe(*query.image, config_.detector);
  std::vector<double> counts(sampled.size(), 0.0);
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    counts[i] = static_cast<double>(
        match_ratio(qf.descriptors, reference_features_.at(sampled[i]->ref.id).descriptors,
                    config_.match_ratio)
            .size());
  }

  std::vector<int> used_ids;
  for (const DatasetFrame* f : sampled) used_ids.push_back(f->ref.id);

  const auto estimate_at = [&](std::size_t i) {
    return estimate_for(method, *query.image, qf, *sampled[i],
                        pair_seed(seed, query.id, sampled[i]->ref.id));
  };

  PoseEstimate fused;
  fused.method = method;
  try {
    switch (fusion) {
      case FusionStrategy::MaxF: {
        std::size_t best = 0;
        for (std::size_t i = 1; i < sampled.size(); ++i) {
          if (counts[i] > counts[best]) best = i;
        }
        fused = estimate_at(best);  // success or that reference's failure as-is
        break;
      }
      case FusionStrategy::Avg:
      case FusionStrategy::WAvg: {
        std::vector<WeightedPose> weighted;
        int inliers = 0;
        double min_cost = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sampled.size(); ++i) {
          WeightedPose wp;
          wp.estimate = estimate_at(i);
          wp.weight = fusion == FusionStrategy::Avg ? 1.0 : counts[i];
          wp.source_id = sampled[i]->ref.id;
          if (wp.estimate.success) {
            inliers += wp.estimate.inlier_count;
            min_cost = std::min(min_cost, wp.estimate.final_cost);
          }
          weighted.push_back(std::move(wp));
        }
        fused.pose = fuse_wavg(weighted);
        fused.success = true;
        fused.inlier_count = inliers;
        fused.final_cost = std::isfinite(min_cost) ? min_cost : 0.0;
        break;
      }
      case FusionStrategy::RWAvg: {
        double k_max = 0.0;
        for (const double c : counts) k_max = std::max(k_max, c);
        std::vector<WeightedPose> selected;
        int inliers = 0;
        double min_cost = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < sampled.size(); ++i) {
          if (counts[i] < k_max / 2.0) continue;
          WeightedPose wp;
          wp.estimate = estimate_at(i);
          wp.weight = counts[i];
          wp.source_id = sampled[i]->ref.id;
          if (wp.estimate.success) {
            inliers += wp.estimate.inlier_count;
            min_cost = std::min(min_cost, wp.estimate.final_cost);
          }
          selected.push_back(std::move(wp));
        }
        fused.pose = fuse_rwavg(selected);
        fused.success = true;
        fused.inlier_count = inliers;
        fused.final_cost = std::isfinite(min_cost) ? min_cost : 0.0;
        break;
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoSuccessfulEstimates || e.code() == ErrorCode::AllZeroWeights) {
      fused = PoseEstimate::failure(method, FailureReason::AllEstimatesFailed);
    } else {
      throw;
    }
  }
  return finish_record(query, method, fused, std::move(used_ids));
}

ResultRecord PipelineRunner::run_large_uncertainty(const QueryInput& query,
                                                   const InvertedIndex& index,
                                                   std::optional<double> prior_radius_m,
                                                   Method method, int k,
                                                   std::uint64_t seed) const {
  if (index.size() == 0) {
    throw Error(ErrorCode::EmptyIndex, "retrieval index is empty");
  }
  const FeatureSet qf = detect_and_describe(*query.image, config_.detector);
  const auto ranked = query_top_k(index, qf.descriptors, static_cast<int>(index.size()));

  std::unordered_map<int, const DatasetFrame*> by_id;
  for (const DatasetFrame* f : references_) by_id.emplace(f->ref.id, f);

  std::vector<const DatasetFrame*> chosen;
  for (const auto& hit : ranked) {
    if (static_cast<int>(chosen.size()) >= k) break;
    const auto it = by_id.find(hit.image_id);
    if (it == by_id.end()) continue;
    if (prior_radius_m &&
        (it->second->ground_position - query.ground_position).norm() > *prior_radius_m) {
      continue;  // prior restricts the candidate set before the top-k cut
    }
    chosen.push_back(it->second);
  }
  if (chosen.empty()) {
    return finish_record(query, method,
                         PoseEstimate::failure(method, FailureReason::NoCandidates), {});
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const DatasetFrame* a, const DatasetFrame* b) { return a->ref.id < b->ref.id; });

  std::vector<int> used_ids;
  std::vector<WeightedPose> weighted;
  int inliers = 0;
  double min_cost = std::numeric_limits<double>::infinity();
  for (const DatasetFrame* frame : chosen) {
    used_ids.push_back(frame->ref.id);
    WeightedPose wp;
    wp.weight = static_cast<double>(
        match_ratio(qf.descriptors, reference_features_.at(frame->ref.id).descriptors,
                    config_.match_ratio)
            .size());
    wp.estimate = estimate_for(method, *query.image, qf, *frame,
                               pair_seed(seed, query.id, frame->ref.id));
    wp.source_id = frame->ref.id;
    if (wp.estimate.success) {
      inliers += wp.estimate.inlier_count;
      min_cost = std::min(min_cost, wp.estimate.final_cost);
    }
    weighted.push_back(std::move(wp));
  }

  PoseEstimate fused;
  fused.method = method;
  try {
    fused.pose = fuse_rwavg(weighted);
    fused.success = true;
    fused.inlier_count = inliers;
    fused.final_cost = std::isfinite(min_cost) ? min_cost : 0.0;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoSuccessfulEstimates || e.code() == ErrorCode::AllZeroWeights) {
      fused = PoseEstimate::failure(method, FailureReason::AllEstimatesFailed);
    } else {
      throw;
    }
  }
  return finish_record(query, method, fused, std::move(used_ids));
}

}  // namespace camreloc
