#pragma once

#include <string>
#include <vector>

#include "camreloc/pnp.hpp"

namespace camreloc {

/// Euclidean distance between the two camera centers, meters.
double translation_error(const PoseSE3& ground_truth, const PoseSE3& estimate);

/// Largest absolute Euler angle (degrees, Z-Y-X convention) of the relative
/// rotation R_gt * R_est^T.
double max_orientation_error(const PoseSE3& ground_truth, const PoseSE3& estimate);

struct ResultRecord {
  int query_id = -1;
  Method method = Method::FB;
  bool success = false;                       // self-reported by the estimator
  FailureReason reason = FailureReason::None;
  double translation_error_m = 0.0;           // valid when success
  double orientation_error_deg = 0.0;
  int inlier_count = 0;
  double final_cost = 0.0;
  int reference_count = 0;
  std::vector<int> reference_ids;
  double time_ms = 0.0;
};

struct MethodSummary {
  Method method = Method::FB;
  int total = 0;
  int succeeded = 0;        // self-reported success AND error within threshold
  double success_rate_pct = 0.0;
  double median_translation_error_m = 0.0;
  double median_orientation_error_deg = 0.0;
  double rmse_translation_error_m = 0.0;
  double rmse_orientation_error_deg = 0.0;
};

struct SummaryReport {
  double failure_threshold_m = 0.0;
  std::vector<MethodSummary> methods;  // ordered fb, pm, mi, hy as present
};

/// A record counts as success iff its estimator reported success and the
/// translation error is at or below the threshold. Failures are excluded
/// from the error statistics. Throws NoRecords.
SummaryReport summarize(const std::vector<ResultRecord>& records, double failure_threshold_m);

}  // namespace camreloc
