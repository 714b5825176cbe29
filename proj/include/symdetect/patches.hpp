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
#include <filesystem>
#include <numeric>
#include <vector>

#include "symdetect/binary_io.hpp"
#include "symdetect/graph.hpp"
#include "symdetect/random.hpp"
#include "symdetect/sampling.hpp"
#include "symdetect/shape.hpp"

namespace symdetect {

inline constexpr std::size_t kNormalizedPatchPoints = 512;

enum class SizeMode : std::uint8_t { count = 0, radius = 1 };
enum class PatchMetric : std::uint8_t { geodesic = 0, euclidean = 1 };

// Patch size: a point count (delta_n) or a radius in model units (delta_d).
struct PatchSize {
  SizeMode mode = SizeMode::count;
  double value = 512;

  static PatchSize points(std::size_t n) { return {SizeMode::count, static_cast<double>(n)}; }
  static PatchSize radius(double r) { return {SizeMode::radius, r}; }
};

struct Patch {
  Index center = 0;
  // Sorted by (distance from center, index); the center comes first.
  IndexList point_indices;
  PatchSize size;
  PatchMetric metric = PatchMetric::geodesic;
  // Largest distance from the center among the patch points.
  double radius = 0.0;
};

struct NormalizedPatch {
  std::vector<Vec3> points;  // kNormalizedPatchPoints entries
  double scale = 1.0;
  Vec3 centroid = Vec3::Zero();
};

struct PatchPair {
  NormalizedPatch patch_a, patch_b;
  Index center_a = 0, center_b = 0;
  double offset = 0.0;  // geodesic distance between the two centers
};

namespace detail {

inline Patch take_nearest(Index center, std::vector<std::pair<double, Index>>& ranked, PatchSize size,
                          PatchMetric metric) {
  std::sort(ranked.begin(), ranked.end());
  Patch patch;
  patch.center = center;
  patch.size = size;
  patch.metric = metric;
  std::size_t keep = ranked.size();
  if (size.mode == SizeMode::count) keep = std::min(keep, static_cast<std::size_t>(size.value));
  patch.point_indices.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) patch.point_indices.push_back(ranked[i].second);
  patch.radius = keep ? ranked[keep - 1].first : 0.0;
  // The center sorts first unless a coincident point with a lower index exists.
  auto it = std::find(patch.point_indices.begin(), patch.point_indices.end(), center);
  if (it != patch.point_indices.begin() && it != patch.point_indices.end())
    std::rotate(patch.point_indices.begin(), it, it + 1);
  return patch;
}

inline Patch extract_geodesic(const SampledShape& shape, Index center, PatchSize size) {
  const Index sources[] = {center};
  GeodesicOptions opts;
  if (size.mode == SizeMode::radius) {
    opts.max_distance = size.value;
    const GeodesicField f = geodesic_field(shape.graph, shape.points(), sources, {}, opts);
    std::vector<std::pair<double, Index>> ranked;
    for (Index i = 0; i < f.dist.size(); ++i)
      if (f.dist[i] <= size.value) ranked.emplace_back(f.dist[i], i);
    return take_nearest(center, ranked, size, PatchMetric::geodesic);
  }

  const auto want = static_cast<std::size_t>(size.value);
  // Grow the search radius until enough points are settled inside it.
  double r = std::max(shape.graph.mean_edge_length(), 1e-12) * std::sqrt(static_cast<double>(want));
  while (true) {
    opts.max_distance = r;
    const GeodesicField f = geodesic_field(shape.graph, shape.points(), sources, {}, opts);
    std::vector<std::pair<double, Index>> ranked;
    for (Index i = 0; i < f.dist.size(); ++i)
      if (f.dist[i] <= r) ranked.emplace_back(f.dist[i], i);
    if (ranked.size() >= want) return take_nearest(center, ranked, size, PatchMetric::geodesic);
    if (!f.truncated)
      throw IslandCenter("center " + std::to_string(center) + " reaches only " +
                         std::to_string(ranked.size()) + " of " + std::to_string(want) + " points");
    r *= 2.0;
  }
}

inline Patch extract_euclidean(const SampledShape& shape, Index center, PatchSize size) {
  const Vec3& c = shape.cloud.points[center];
  std::vector<std::pair<double, Index>> ranked;
  if (size.mode == SizeMode::radius) {
    for (Index i : shape.index->radius(c, size.value))
      ranked.emplace_back(std::sqrt(squared_distance(c, shape.cloud.points[i])), i);
  } else {
    for (const Neighbor& nb : shape.index->knn(c, static_cast<std::size_t>(size.value)))
      ranked.emplace_back(std::sqrt(nb.sq_dist), nb.index);
  }
  return take_nearest(center, ranked, size, PatchMetric::euclidean);
}

}  // namespace detail

// Geodesic neighborhood of a center: the delta_n geodesically nearest points
// (ties by index) or every point within geodesic radius delta_d. The
// Euclidean metric reproduces plain ball queries and exists for comparison.
inline Patch extract_patch(const SampledShape& shape, Index center, PatchSize size,
                           PatchMetric metric = PatchMetric::geodesic) {
  if (center >= shape.size()) throw BadCount("patch center out of range");
  if (size.mode == SizeMode::count) {
    if (size.value < 1 || size.value > static_cast<double>(shape.size()))
      throw BadCount("patch point count outside [1, |cloud|]");
  } else if (!(size.value > 0)) {
    throw BadCount("patch radius must be positive");
  }
  return metric == PatchMetric::geodesic ? detail::extract_geodesic(shape, center, size)
                                         : detail::extract_euclidean(shape, center, size);
}

// Resamples to exactly 512 points (FPS when larger, cyclic repetition when
// smaller), centers at the mean and scales to the unit sphere.
inline NormalizedPatch normalize_points(std::span<const Vec3> pts, std::uint64_t seed) {
  if (pts.empty()) throw DegeneratePatch("empty patch");
  std::vector<Vec3> picked;
  picked.reserve(kNormalizedPatchPoints);
  if (pts.size() >= kNormalizedPatchPoints) {
    for (Index i : farthest_point_sampling(pts, kNormalizedPatchPoints, seed)) picked.push_back(pts[i]);
  } else {
    for (std::size_t i = 0; i < kNormalizedPatchPoints; ++i) picked.push_back(pts[i % pts.size()]);
  }
  NormalizedPatch out;
  out.centroid = centroid(picked);
  double max_norm = 0.0;
  for (Vec3& p : picked) {
    p -= out.centroid;
    max_norm = std::max(max_norm, p.norm());
  }
  if (!(max_norm > 0.0)) throw DegeneratePatch("all patch points coincide");
  for (Vec3& p : picked) p /= max_norm;
  out.scale = max_norm;
  out.points = std::move(picked);
  return out;
}

inline NormalizedPatch normalize_patch(const Patch& patch, const SampledShape& shape, std::uint64_t seed) {
  if (patch.point_indices.empty()) throw DegeneratePatch("empty patch");
  const PointCloud pts = subset(shape.cloud, patch.point_indices);
  return normalize_points(pts.points, seed);
}

struct PatchSetResult {
  std::vector<Patch> patches;
  std::size_t skipped = 0;  // centers rejected as IslandCenter
  IndexList skipped_centers;
};

// For each size, takes patches at the shape's FPS-ordered centers until the
// requested count is reached, skipping centers whose component is too small.
// Centers are drawn with `seed` when the shape carries none.
inline PatchSetResult sample_patch_set(const SampledShape& shape, std::span<const std::size_t> sizes,
                                       std::span<const std::size_t> counts, std::uint64_t seed,
                                       PatchMetric metric = PatchMetric::geodesic) {
  if (sizes.size() != counts.size()) throw SizeMismatch("sizes and counts differ in length");
  IndexList centers = shape.centers;
  if (centers.empty()) {
    std::size_t need = 0;
    for (std::size_t c : counts) need = std::max(need, c);
    if (need > 0) centers = farthest_point_sampling(shape.cloud, std::min(need, shape.size()), seed);
  }
  PatchSetResult out;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::size_t taken = 0;
    for (std::size_t c = 0; c < centers.size() && taken < counts[s]; ++c) {
      try {
        out.patches.push_back(extract_patch(shape, centers[c], PatchSize::points(sizes[s]), metric));
        ++taken;
      } catch (const IslandCenter&) {
        ++out.skipped;
        out.skipped_centers.push_back(centers[c]);
      }
    }
  }
  return out;
}

struct ExportPairsResult {
  std::vector<PatchPair> pairs;
  std::size_t skipped = 0;
};

// Positive training pairs: each base patch is paired with a patch extracted at
// a center displaced by a uniform random geodesic distance in
// [0, offset_fraction * base radius]. Both sides are normalized.
inline ExportPairsResult export_pairs(const SampledShape& shape, std::span<const Patch> base,
                                      double offset_fraction, std::uint64_t seed) {
  if (!(offset_fraction >= 0.0 && offset_fraction <= 1.0))
    throw BadCount("offset fraction must lie in [0, 1]");
  ExportPairsResult out;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const Patch& p = base[i];
    Rng rng(derive_seed(seed, 3 * i));
    const double max_offset = offset_fraction * p.radius;
    const double target = rng.uniform() * max_offset;
    Index partner_center = p.center;
    double offset = 0.0;
    if (max_offset > 0.0) {
      const Index sources[] = {p.center};
      GeodesicOptions opts;
      opts.max_distance = max_offset;
      const GeodesicField f = geodesic_field(shape.graph, shape.points(), sources, {}, opts);
      std::vector<std::pair<double, Index>> cands;
      for (Index j = 0; j < f.dist.size(); ++j)
        if (f.dist[j] <= max_offset) cands.emplace_back(std::abs(f.dist[j] - target), j);
      std::sort(cands.begin(), cands.end());
      // Pick among the few points closest to the target distance so the
      // direction of the offset varies.
      const std::size_t pool = std::min<std::size_t>(8, cands.size());
      partner_center = cands[rng.below(pool)].second;
      offset = f.dist[partner_center];
    }
    try {
      Patch partner = extract_patch(shape, partner_center, p.size, p.metric);
      PatchPair pair;
      pair.center_a = p.center;
      pair.center_b = partner_center;
      pair.offset = offset;
      pair.patch_a = normalize_patch(p, shape, derive_seed(seed, 3 * i + 1));
      pair.patch_b = normalize_patch(partner, shape, derive_seed(seed, 3 * i + 2));
      out.pairs.push_back(std::move(pair));
    } catch (const IslandCenter&) {
      ++out.skipped;
    } catch (const DegeneratePatch&) {
      ++out.skipped;
    }
  }
  return out;
}

// SYMP container: magic, u32 version, u64 patch count; per patch u64 center,
// u8 size mode (bit 0: radius mode, bit 1: Euclidean metric), f64 size,
// u64 index count, u64 indices.
inline void write_symp(const std::filesystem::path& path, std::span<const Patch> patches) {
  io::Writer w(path);
  w.magic("SYMP");
  w.put<std::uint32_t>(1);
  w.put<std::uint64_t>(patches.size());
  for (const Patch& p : patches) {
    w.put<std::uint64_t>(p.center);
    const auto mode = static_cast<std::uint8_t>(static_cast<std::uint8_t>(p.size.mode) |
                                                (static_cast<std::uint8_t>(p.metric) << 1));
    w.put<std::uint8_t>(mode);
    w.put<double>(p.size.value);
    w.put<std::uint64_t>(p.point_indices.size());
    for (Index i : p.point_indices) w.put<std::uint64_t>(i);
  }
  w.close();
}

// Reads patches. The radius is not stored; callers needing it re-extract
// from the center and size.
inline std::vector<Patch> read_symp(const std::filesystem::path& path, std::size_t point_limit = ~std::size_t{0}) {
  io::Reader r(path);
  r.expect_magic("SYMP");
  if (const auto v = r.get<std::uint32_t>(); v != 1)
    throw ParseError("unsupported SYMP version " + std::to_string(v));
  const auto n = r.get<std::uint64_t>();
  r.check_remaining(n, 25);
  std::vector<Patch> out(n);
  for (auto& p : out) {
    const auto c = r.get<std::uint64_t>();
    const auto mode = r.get<std::uint8_t>();
    if (mode > 3) throw ParseError("bad SYMP size mode");
    p.size.mode = static_cast<SizeMode>(mode & 1);
    p.metric = static_cast<PatchMetric>(mode >> 1);
    p.size.value = r.get<double>();
    const auto m = r.get<std::uint64_t>();
    r.check_remaining(m, 8);
    for (std::uint64_t k = 0; k < m; ++k) {
      const auto i = r.get<std::uint64_t>();
      if (i >= point_limit) throw ParseError("SYMP point index out of range");
      p.point_indices.push_back(static_cast<Index>(i));
    }
    if (c >= point_limit) throw ParseError("SYMP center out of range");
    p.center = static_cast<Index>(c);
  }
  r.expect_end();
  return out;
}

// SYMB container: magic, u32 version, u64 count, then 512 f32 xyz per patch.
inline void write_symb(const std::filesystem::path& path, std::span<const NormalizedPatch> patches) {
  io::Writer w(path);
  w.magic("SYMB");
  w.put<std::uint32_t>(1);
  w.put<std::uint64_t>(patches.size());
  for (const NormalizedPatch& p : patches) {
    if (p.points.size() != kNormalizedPatchPoints) throw Error("normalized patch must hold 512 points");
    for (const Vec3& q : p.points) w.put_vec3f(q);
  }
  w.close();
}

inline std::vector<NormalizedPatch> read_symb(const std::filesystem::path& path) {
  io::Reader r(path);
  r.expect_magic("SYMB");
  if (const auto v = r.get<std::uint32_t>(); v != 1)
    throw ParseError("unsupported SYMB version " + std::to_string(v));
  const auto n = r.get<std::uint64_t>();
  r.check_remaining(n, kNormalizedPatchPoints * 12);
  std::vector<NormalizedPatch> out(n);
  for (auto& p : out) {
    p.points.reserve(kNormalizedPatchPoints);
    for (std::size_t k = 0; k < kNormalizedPatchPoints; ++k) p.points.push_back(r.get_vec3f());
  }
  r.expect_end();
  return out;
}

// Pairs are stored as a SYMB batch with partners interleaved (a0, b0, a1, ...).
inline void write_pairs_symb(const std::filesystem::path& path, std::span<const PatchPair> pairs) {
  std::vector<NormalizedPatch> flat;
  flat.reserve(2 * pairs.size());
  for (const PatchPair& p : pairs) {
    flat.push_back(p.patch_a);
    flat.push_back(p.patch_b);
  }
  write_symb(path, flat);
}

}  // namespace symdetect
