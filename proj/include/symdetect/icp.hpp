/*
 * Copyright (c) 2026, the symdetect authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "symdetect/core.hpp"
#include "symdetect/random.hpp"
#include "symdetect/sampling.hpp"
#include "symdetect/spatial_index.hpp"

namespace symdetect {

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }

  std::vector<Vec3> apply(std::span<const Vec3> pts) const {
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (const Vec3& p : pts) out.push_back(apply(p));
    return out;
  }
};

struct IcpConfig {
  std::size_t restarts = 30;
  std::size_t max_iters = 100;
  std::size_t fps_points = 512;
  double convergence_tol = 1e-7;
  std::uint64_t seed = 0;

  void validate() const {
    if (restarts < 1 || max_iters < 1 || fps_points < 1) throw BadCount("ICP counts must be >= 1");
    if (!(convergence_tol >= 0.0)) throw BadCount("ICP tolerance must be >= 0");
  }

  // Identifies every parameter that affects computed distances.
  std::uint64_t fingerprint() const {
    Fnv1a h;
    h.add(std::string("icp/v1")).add(std::uint64_t{restarts}).add(std::uint64_t{max_iters});
    h.add(std::uint64_t{fps_points}).add(convergence_tol).add(seed);
    return h.value();
  }
};

struct IcpResult {
  RigidTransform transform;
  double chamfer = kInf;
  std::size_t iterations = 0;
};

namespace detail {

inline double one_sided(std::span<const Vec3> from, const SpatialIndex& to) {
  double sum = 0.0;
  for (const Vec3& p : from) sum += to.nearest(p).sq_dist;
  return sum / static_cast<double>(from.size());
}

// Rejects clouds whose points are (nearly) collinear: no unique rotation.
inline bool is_degenerate(std::span<const Vec3> pts) {
  if (pts.size() < 3) return true;
  const Vec3 c = centroid(pts);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov, Eigen::EigenvaluesOnly);
  const Vec3 ev = es.eigenvalues();  // ascending
  return !(ev[2] > 0.0) || ev[1] <= 1e-12 * ev[2];
}

// Least-squares rotation and translation mapping src onto dst (Kabsch),
// determinant corrected to +1, no scaling.
inline RigidTransform fit_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
  const Vec3 cs = centroid(src), cd = centroid(dst);
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - cs) * (dst[i] - cd).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU(), v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform t;
  t.rotation = v * d * u.transpose();
  t.translation = cd - t.rotation * cs;
  return t;
}

// Point-to-point ICP of `src` (already in its starting pose) onto `dst`.
// `src_index` indexes src_base; src = pre * src_base with `pre` orthogonal,
// which lets the reverse Chamfer pass reuse one index across restarts.
inline IcpResult register_points(std::span<const Vec3> src, const SpatialIndex& dst_index,
                                 const SpatialIndex& src_index, const Mat3& pre,
                                 std::size_t max_iters, double tol) {
  const auto& dst = dst_index.points();
  const std::size_t na = src.size(), nb = dst.size();
  std::vector<Vec3> moved(src.begin(), src.end());
  std::vector<Vec3> matched(na);

  RigidTransform pose;
  auto evaluate = [&](const RigidTransform& t) {
    double sum_a = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      moved[i] = t.apply(src[i]);
      const Neighbor nn = dst_index.nearest(moved[i]);
      matched[i] = dst[nn.index];
      sum_a += nn.sq_dist;
    }
    const Mat3 back = pre.transpose() * t.rotation.transpose();
    double sum_b = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      // dst[j] mapped into the frame of src_base
      const Vec3 q = back * (dst[j] - t.translation);
      sum_b += src_index.nearest(q).sq_dist;
    }
    return sum_a / static_cast<double>(na) + sum_b / static_cast<double>(nb);
  };

  IcpResult result;
  double cd = evaluate(pose);
  std::size_t it = 0;
  while (it < max_iters) {
    const RigidTransform next = fit_rigid(src, matched);
    ++it;
    const double cd_next = evaluate(next);
    const double prev = cd;
    pose = next;
    cd = cd_next;
    if (!(prev > 0.0) || prev - cd_next < tol * prev) break;
  }
  result.transform = pose;
  result.chamfer = cd;
  result.iterations = it;
  return result;
}

}  // namespace detail

// Two-sided Chamfer distance with exact nearest neighbors:
// mean_a min_b |a-b|^2 + mean_b min_a |a-b|^2.
inline double chamfer(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw EmptyCloud("chamfer distance of an empty cloud");
  const SpatialIndex ia(a), ib(b);
  return detail::one_sided(a, ib) + detail::one_sided(b, ia);
}

inline double chamfer(const PointCloud& a, const PointCloud& b) { return chamfer(a.points, b.points); }

// Registers a onto b. Stops after max_iters or when the relative Chamfer
// improvement of an iteration falls below tol.
inline IcpResult icp_register(std::span<const Vec3> a, std::span<const Vec3> b,
                              std::size_t max_iters = 100, double tol = 1e-7) {
  if (a.size() < 3 || b.size() < 3) throw DegenerateInput("ICP needs at least 3 points per cloud");
  if (detail::is_degenerate(a) || detail::is_degenerate(b))
    throw DegenerateInput("collinear input has no unique rotation");
  if (max_iters < 1) throw BadCount("max_iters must be >= 1");
  const SpatialIndex ia(a), ib(b);
  return detail::register_points(a, ib, ia, Mat3::Identity(), max_iters, tol);
}

inline IcpResult icp_register(const PointCloud& a, const PointCloud& b, std::size_t max_iters = 100,
                              double tol = 1e-7) {
  return icp_register(a.points, b.points, max_iters, tol);
}

// FPS-downsampled to at most `fps_points` and centered at the mean.
inline std::vector<Vec3> icp_normalize(std::span<const Vec3> pts, std::size_t fps_points, std::uint64_t seed) {
  std::vector<Vec3> out;
  if (pts.size() <= fps_points) {
    // FPS of every point is a permutation; the order does not affect Chamfer.
    out.assign(pts.begin(), pts.end());
  } else {
    out.reserve(fps_points);
    for (Index i : farthest_point_sampling(pts, fps_points, seed)) out.push_back(pts[i]);
  }
  const Vec3 c = centroid(out);
  for (Vec3& p : out) p -= c;
  return out;
}

struct IcpDistanceTrace {
  double distance = kInf;
  std::vector<double> per_restart;  // Chamfer after each restart
};

// Minimum over restarts of the Chamfer distance after registering a randomly
// rotated (and, half the time, reflected) copy of normalized A onto
// normalized B. Deterministic for a fixed cfg.seed.
inline IcpDistanceTrace icp_distance_trace(std::span<const Vec3> a, std::span<const Vec3> b,
                                           const IcpConfig& cfg) {
  if (a.empty() || b.empty()) throw EmptyCloud("ICP distance of an empty cloud");
  cfg.validate();
  const std::uint64_t fps_seed = derive_seed(cfg.seed, 0);
  const std::vector<Vec3> an = icp_normalize(a, cfg.fps_points, fps_seed);
  const std::vector<Vec3> bn = icp_normalize(b, cfg.fps_points, fps_seed);
  const SpatialIndex ia(an), ib(bn);
  const bool degenerate = detail::is_degenerate(an) || detail::is_degenerate(bn);

  Rng rng(derive_seed(cfg.seed, 1));
  IcpDistanceTrace trace;
  trace.per_restart.reserve(cfg.restarts);
  std::vector<Vec3> start(an.size());
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    const Mat3 g = random_orthogonal(rng);
    for (std::size_t i = 0; i < an.size(); ++i) start[i] = g * an[i];
    double cd;
    if (degenerate) {
      // No well-defined registration; score the random orientation as is.
      cd = chamfer(start, bn);
    } else {
      cd = detail::register_points(start, ib, ia, g, cfg.max_iters, cfg.convergence_tol).chamfer;
    }
    trace.per_restart.push_back(cd);
    trace.distance = std::min(trace.distance, cd);
  }
  return trace;
}

inline double icp_distance(std::span<const Vec3> a, std::span<const Vec3> b, const IcpConfig& cfg) {
  return icp_distance_trace(a, b, cfg).distance;
}

inline double icp_distance(const PointCloud& a, const PointCloud& b, const IcpConfig& cfg) {
  return icp_distance(a.points, b.points, cfg);
}

}  // namespace symdetect
