#include "camreloc/pnp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

#include "camreloc/rng.hpp"

namespace camreloc {

const char* to_string(Method m) {
  switch (m) {
    case Method::FB: return "fb";
    case Method::PM: return "pm";
    case Method::MI: return "mi";
    case Method::HY: return "hy";
  }
  return "?";
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::None: return "none";
    case FailureReason::InsufficientCorrespondences: return "insufficient_correspondences";
    case FailureReason::NoConsensus: return "no_consensus";
    case FailureReason::SearchDiverged: return "search_diverged";
    case FailureReason::NoReferenceInRadius: return "no_reference_in_radius";
    case FailureReason::NoCandidates: return "no_candidates";
    case FailureReason::AllEstimatesFailed: return "all_estimates_failed";
  }
  return "?";
}

double reprojection_error2(const PoseSE3& pose, const Correspondence2D3D& c,
                           const Intrinsics& K) {
  const Vec3 cam = pose.apply(c.reference_camera_point);
  if (!(cam.z() > 0.0)) return std::numeric_limits<double>::infinity();
  const double inv_z = 1.0 / cam.z();
  const double u = (K.fx * cam.x() + K.skew * cam.y()) * inv_z + K.cx;
  const double v = K.fy * cam.y() * inv_z + K.cy;
  const double du = u - c.query_pixel.x();
  const double dv = v - c.query_pixel.y();
  return du * du + dv * dv;
}

namespace {

using Poly = std::vector<double>;  // coefficients, ascending powers

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_scale(const Poly& a, double s) {
  Poly out = a;
  for (double& v : out) v *= s;
  return out;
}

double poly_eval(const Poly& p, double x) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

double poly_eval_deriv(const Poly& p, double x) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 1;) acc = acc * x + p[i] * static_cast<double>(i);
  return acc;
}

// Real roots via companion-matrix eigenvalues, Newton-polished.
std::vector<double> real_roots(const Poly& poly) {
  Poly p = poly;
  double max_coeff = 0.0;
  for (const double c : p) max_coeff = std::max(max_coeff, std::abs(c));
  if (max_coeff > 0.0) {
    for (double& c : p) c /= max_coeff;
  }
  while (p.size() > 1 && std::abs(p.back()) < 1e-12) p.pop_back();
  std::vector<double> roots;
  const std::size_t deg = p.size() - 1;
  if (deg == 0) return roots;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (std::size_t i = 0; i < deg; ++i) {
    companion(0, i) = -p[deg - 1 - i] / p[deg];
    if (i + 1 < deg) companion(i + 1, i) = 1.0;
  }
  const Eigen::VectorXcd eig = companion.eigenvalues();
  for (int i = 0; i < eig.size(); ++i) {
    if (std::abs(eig[i].imag()) > 1e-6 * (1.0 + std::abs(eig[i].real()))) continue;
    double x = eig[i].real();
    for (int it = 0; it < 3; ++it) {
      const double f = poly_eval(p, x);
      const double df = poly_eval_deriv(p, x);
      if (df == 0.0) break;
      x -= f / df;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Rigid transform X = R * P + t fitting three point pairs exactly (Kabsch).
PoseSE3 absolute_orientation3(const std::array<Vec3, 3>& src, const std::array<Vec3, 3>& dst) {
  const Vec3 src_c = (src[0] + src[1] + src[2]) / 3.0;
  const Vec3 dst_c = (dst[0] + dst[1] + dst[2]) / 3.0;
  Mat3 h = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    h += (src[i] - src_c) * (dst[i] - dst_c).transpose();
  }
  const Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixV() * svd.matrixU().transpose();
  if (r.determinant() < 0.0) {
    Mat3 d = Mat3::Identity();
    d(2, 2) = -1.0;
    r = svd.matrixV() * d * svd.matrixU().transpose();
  }
  // Re-orthonormalize against SVD round-off before the strict pose gate.
  const Eigen::JacobiSVD<Mat3> polish(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r = polish.matrixU() * polish.matrixV().transpose();
  return PoseSE3(r, dst_c - r * src_c);
}

Vec3 bearing(const Intrinsics& K, const Vec2& pixel) {
  const double y = (pixel.y() - K.cy) / K.fy;
  const double x = (pixel.x() - K.cx - K.skew * y) / K.fx;
  return Vec3(x, y, 1.0).normalized();
}

struct GaussNewtonResult {
  PoseSE3 pose;
  double cost = 0.0;
  bool ok = false;
};

double total_reprojection_cost(const PoseSE3& pose, const std::vector<Correspondence2D3D>& corrs,
                               const Intrinsics& K) {
  double acc = 0.0;
  for (const auto& c : corrs) {
    const double e = reprojection_error2(pose, c, K);
    if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    acc += e;
  }
  return acc;
}

// Minimize total squared reprojection error over SE(3), left-multiplied
// so(3) update on the rotation. Falls back (ok=false) if the cost diverges.
GaussNewtonResult refine_pose(const PoseSE3& initial,
                              const std::vector<Correspondence2D3D>& corrs,
                              const Intrinsics& K, int iterations) {
  GaussNewtonResult res;
  res.pose = initial;
  res.cost = total_reprojection_cost(initial, corrs, K);
  res.ok = std::isfinite(res.cost);
  if (!res.ok) return res;

  PoseSE3 cur = initial;
  double cur_cost = res.cost;
  for (int it = 0; it < iterations; ++it) {
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& c : corrs) {
      const Vec3 cam = cur.apply(c.reference_camera_point);
      if (!(cam.z() > 0.0)) continue;
      const double inv_z = 1.0 / cam.z();
      const double u = (K.fx * cam.x() + K.skew * cam.y()) * inv_z + K.cx;
      const double v = K.fy * cam.y() * inv_z + K.cy;
      Eigen::Matrix<double, 2, 3> duv_dcam;
      duv_dcam << K.fx * inv_z, K.skew * inv_z,
          -(K.fx * cam.x() + K.skew * cam.y()) * inv_z * inv_z, 0.0, K.fy * inv_z,
          -K.fy * cam.y() * inv_z * inv_z;
      Eigen::Matrix<double, 3, 6> dcam_dxi;
      Mat3 skew_cam;
      skew_cam << 0.0, -cam.z(), cam.y(), cam.z(), 0.0, -cam.x(), -cam.y(), cam.x(), 0.0;
      // cam' = exp(w) * cam + dt  =>  d(cam)/dw = -[cam]x, d(cam)/dt = I
      // (translation update applied after rotation, both in camera frame)
      dcam_dxi.leftCols<3>() = skew_cam * -1.0;
      dcam_dxi.rightCols<3>() = Mat3::Identity();
      const Eigen::Matrix<double, 2, 6> jac = duv_dcam * dcam_dxi;
      const Vec2 residual(u - c.query_pixel.x(), v - c.query_pixel.y());
      jtj += jac.transpose() * jac;
      jtr += jac.transpose() * residual;
    }
    const Eigen::Matrix<double, 6, 1> delta = jtj.ldlt().solve(-jtr);
    if (!delta.allFinite()) break;
    const Vec3 w = delta.head<3>();
    const Vec3 dt = delta.tail<3>();
    Mat3 dr;
    const double angle = w.norm();
    if (angle < 1e-14) {
      dr = Mat3::Identity();
    } else {
      dr = Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
    }
    PoseSE3 next;
    try {
      next = PoseSE3(dr * cur.rotation(), dr * cur.translation() + dt);
    } catch (const Error&) {
      break;
    }
    const double next_cost = total_reprojection_cost(next, corrs, K);
    if (!(next_cost < cur_cost)) break;
    cur = next;
    cur_cost = next_cost;
    if (cur_cost < 1e-20) break;
  }
  res.pose = cur;
  res.cost = cur_cost;
  res.ok = true;
  return res;
}

}  // namespace

std::vector<PoseSE3> p3p_solve(const std::array<Correspondence2D3D, 3>& corrs,
                               const Intrinsics& K) {
  const Vec3& p1 = corrs[0].reference_camera_point;
  const Vec3& p2 = corrs[1].reference_camera_point;
  const Vec3& p3 = corrs[2].reference_camera_point;
  const double scale = std::max({(p2 - p1).norm(), (p3 - p1).norm(), (p3 - p2).norm()});
  if (!(scale > 0.0) ||
      ((p2 - p1).cross(p3 - p1)).norm() <= 1e-9 * scale * scale) {
    throw Error(ErrorCode::DegenerateConfiguration, "collinear 3D points");
  }

  const Vec3 f1 = bearing(K, corrs[0].query_pixel);
  const Vec3 f2 = bearing(K, corrs[1].query_pixel);
  const Vec3 f3 = bearing(K, corrs[2].query_pixel);

  // Grunert's formulation: distances s_i from the camera center obey the law
  // of cosines on the known triangle side lengths.
  const double a2 = (p2 - p3).squaredNorm();
  const double b2 = (p1 - p3).squaredNorm();
  const double c2 = (p1 - p2).squaredNorm();
  const double p = 2.0 * f2.dot(f3);
  const double q = 2.0 * f1.dot(f3);
  const double r = 2.0 * f1.dot(f2);
  const double ab = a2 / b2;
  const double cb = c2 / b2;

  // With u = s2/s1, v = s3/s1 and w(v) = 1 + v^2 - q v:
  //   I:  u^2 - u v p + v^2 - ab*w(v) = 0
  //   II: u^2 - u r + 1 - cb*w(v) = 0
  // Subtracting gives u = G(v)/H(v); substituting into II yields a quartic.
  const Poly wv = {1.0, -q, 1.0};
  const Poly g = poly_add({1.0, 0.0, -1.0}, poly_scale(wv, ab - cb));
  const Poly hh = {r, -p};
  const Poly ii_const = poly_add({1.0}, poly_scale(wv, -cb));
  // G^2 - r G H + H^2 (1 - cb w) = 0
  const Poly quartic =
      poly_add(poly_add(poly_mul(g, g), poly_scale(poly_mul(g, hh), -r)),
               poly_mul(poly_mul(hh, hh), ii_const));

  std::vector<PoseSE3> out;
  const double b_len = std::sqrt(b2);
  for (const double v : real_roots(quartic)) {
    if (!(v > 0.0)) continue;
    const double hv = poly_eval(hh, v);
    if (std::abs(hv) < 1e-12) continue;
    const double u = poly_eval(g, v) / hv;
    if (!(u > 0.0)) continue;
    const double w_val = poly_eval(wv, v);
    if (!(w_val > 0.0)) continue;
    const double s1 = b_len / std::sqrt(w_val);
    const double s2 = u * s1;
    const double s3 = v * s1;
    const std::array<Vec3, 3> cam_pts = {s1 * f1, s2 * f2, s3 * f3};
    const std::array<Vec3, 3> world_pts = {p1, p2, p3};
    PoseSE3 candidate;
    try {
      candidate = absolute_orientation3(world_pts, cam_pts);
    } catch (const Error&) {
      continue;
    }
    bool exact = true;
    for (int i = 0; i < 3 && exact; ++i) {
      const double e2 = reprojection_error2(candidate, corrs[i], K);
      if (!(e2 < 1e-12)) exact = false;  // 1e-6 px contract
    }
    if (exact) out.push_back(candidate);
  }
  if (out.empty()) {
    throw Error(ErrorCode::DegenerateConfiguration, "no real P3P solution");
  }
  return out;
}

PoseSE3 disambiguate(const std::vector<PoseSE3>& candidates, const Correspondence2D3D& fourth,
                     const Intrinsics& K) {
  if (candidates.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no candidates to disambiguate");
  }
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double e = reprojection_error2(candidates[i], fourth, K);
    if (e < best_err) {
      best_err = e;
      best = i;
    }
  }
  return candidates[best];
}

PoseEstimate mlesac_pnp(const CorrespondenceSet2D3D& corrs, const Intrinsics& K,
                        const RansacConfig& cfg) {
  PoseEstimate est;
  est.method = Method::FB;
  const std::size_t m = corrs.size();
  if (m < 4) {
    return PoseEstimate::failure(Method::FB, FailureReason::InsufficientCorrespondences);
  }

  const double tau2 = cfg.inlier_threshold_px * cfg.inlier_threshold_px;
  Rng rng(cfg.seed);
  double best_score = std::numeric_limits<double>::infinity();
  std::optional<PoseSE3> best_pose;
  int max_iters = cfg.max_iterations;

  for (int iter = 0; iter < max_iters; ++iter) {
    const auto sample = rng.sample_without_replacement(m, 4);
    const std::array<Correspondence2D3D, 3> minimal = {
        corrs.items[sample[0]], corrs.items[sample[1]], corrs.items[sample[2]]};
    std::vector<PoseSE3> candidates;
    try {
      candidates = p3p_solve(minimal, K);
    } catch (const Error&) {
      continue;  // degenerate minimal sample, draw again
    }
    const PoseSE3 model = disambiguate(candidates, corrs.items[sample[3]], K);

    double score = 0.0;
    std::size_t inliers = 0;
    for (const auto& c : corrs.items) {
      const double e2 = reprojection_error2(model, c, K);
      score += std::min(e2, tau2);
      if (e2 <= tau2) ++inliers;
    }
    if (score < best_score) {
      best_score = score;
      best_pose = model;
      // Adaptive termination from the current inlier ratio.
      const double w = static_cast<double>(inliers) / static_cast<double>(m);
      const double p_all = std::pow(w, 4);
      if (p_all > 0.0 && p_all < 1.0) {
        const int needed = static_cast<int>(
            std::ceil(std::log(1.0 - cfg.confidence) / std::log(1.0 - p_all)));
        max_iters = std::min(max_iters, std::max(iter + 1, needed));
      } else if (p_all >= 1.0) {
        max_iters = iter + 1;
      }
    }
  }

  if (!best_pose) {
    return PoseEstimate::failure(Method::FB, FailureReason::NoConsensus);
  }

  std::vector<Correspondence2D3D> inlier_set;
  for (const auto& c : corrs.items) {
    if (reprojection_error2(*best_pose, c, K) <= tau2) inlier_set.push_back(c);
  }
  if (inlier_set.size() < 4) {
    return PoseEstimate::failure(Method::FB, FailureReason::NoConsensus);
  }

  PoseSE3 final_pose = *best_pose;
  const GaussNewtonResult refined = refine_pose(final_pose, inlier_set, K, cfg.refine_iterations);
  if (refined.ok) {
    // Keep the refined pose only if it does not hurt the truncated score and
    // still owns a valid consensus set.
    double refined_score = 0.0;
    int refined_inliers = 0;
    for (const auto& c : corrs.items) {
      const double e2 = reprojection_error2(refined.pose, c, K);
      refined_score += std::min(e2, tau2);
      if (e2 <= tau2) ++refined_inliers;
    }
    if (refined_score <= best_score && refined_inliers >= 4) {
      final_pose = refined.pose;
      best_score = refined_score;
    }
  }

  est.pose = final_pose;
  est.success = true;
  est.reason = FailureReason::None;
  est.final_cost = best_score;
  int count = 0;
  for (const auto& c : corrs.items) {
    if (reprojection_error2(final_pose, c, K) <= tau2) ++count;
  }
  est.inlier_count = count;
  return est;
}

}  // namespace camreloc
