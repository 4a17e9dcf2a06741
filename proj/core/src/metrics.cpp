#include "camreloc/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace camreloc {

double translation_error(const PoseSE3& ground_truth, const PoseSE3& estimate) {
  return (ground_truth.center() - estimate.center()).norm();
}

double max_orientation_error(const PoseSE3& ground_truth, const PoseSE3& estimate) {
  const Mat3 rel = ground_truth.rotation() * estimate.rotation().transpose();
  const EulerZYX e = rotation_to_euler(rel);
  return std::max({std::abs(e.yaw_deg), std::abs(e.pitch_deg), std::abs(e.roll_deg)});
}

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    m = 0.5 * (lower + m);
  }
  return m;
}

double rmse(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double acc = 0.0;
  for (const double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

}  // namespace

SummaryReport summarize(const std::vector<ResultRecord>& records, double failure_threshold_m) {
  if (records.empty()) {
    throw Error(ErrorCode::NoRecords, "nothing to summarize");
  }
  SummaryReport report;
  report.failure_threshold_m = failure_threshold_m;
  const Method order[4] = {Method::FB, Method::PM, Method::MI, Method::HY};
  for (const Method m : order) {
    MethodSummary s;
    s.method = m;
    std::vector<double> terr, oerr;
    for (const auto& r : records) {
      if (r.method != m) continue;
      ++s.total;
      const bool ok = r.success && r.translation_error_m <= failure_threshold_m;
      if (ok) {
        ++s.succeeded;
        terr.push_back(r.translation_error_m);
        oerr.push_back(r.orientation_error_deg);
      }
    }
    if (s.total == 0) continue;
    s.success_rate_pct = 100.0 * static_cast<double>(s.succeeded) / s.total;
    s.median_translation_error_m = median(terr);
    s.median_orientation_error_deg = median(oerr);
    s.rmse_translation_error_m = rmse(terr);
    s.rmse_orientation_error_deg = rmse(oerr);
    report.methods.push_back(s);
  }
  return report;
}

}  // namespace camreloc
