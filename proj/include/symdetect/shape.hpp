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

#include <filesystem>
#include <memory>

#include "symdetect/binary_io.hpp"
#include "symdetect/graph.hpp"
#include "symdetect/sampling.hpp"
#include "symdetect/spatial_index.hpp"

namespace symdetect {

inline constexpr std::size_t kDefaultPointCount = std::size_t{1} << 16;
inline constexpr std::size_t kDefaultCenterCount = std::size_t{1} << 11;
inline constexpr std::size_t kDefaultNeighborK = 8;

// Dense point cloud of a shape with its neighbor graph and FPS patch centers.
// Immutable once built; the spatial index is shared between copies.
struct SampledShape {
  PointCloud cloud;
  NeighborGraph graph;
  IndexList centers;
  std::uint64_t rng_seed = 0;
  std::shared_ptr<const SpatialIndex> index;

  std::size_t size() const { return cloud.size(); }
  std::span<const Vec3> points() const { return cloud.points; }
};

// Builds graph, index and centers for an existing cloud.
inline SampledShape make_sampled_shape(PointCloud cloud, std::size_t center_count,
                                       std::uint64_t seed, std::size_t k = kDefaultNeighborK) {
  if (cloud.empty()) throw EmptyCloud("cannot build a shape from an empty cloud");
  for (const Vec3& p : cloud.points)
    if (!p.allFinite()) throw InputError("non-finite point coordinate");
  SampledShape shape;
  shape.rng_seed = seed;
  shape.cloud = std::move(cloud);
  shape.index = std::make_shared<SpatialIndex>(shape.cloud.points);
  shape.graph = build_neighbor_graph(shape.cloud.points, k, shape.index.get());
  if (center_count > 0)
    shape.centers = farthest_point_sampling(shape.cloud, center_count, derive_seed(seed, 1));
  return shape;
}

inline SampledShape sample_shape(const Mesh& mesh, std::size_t point_count, std::size_t center_count,
                                 std::uint64_t seed, std::size_t k = kDefaultNeighborK) {
  return make_sampled_shape(sample_surface(mesh, point_count, seed), center_count, seed, k);
}

inline SampledShape with_centers(SampledShape shape, IndexList centers) {
  for (Index c : centers)
    if (c >= shape.size()) throw BadCount("center index out of range");
  shape.centers = std::move(centers);
  return shape;
}

// SYMS container: magic, u32 version, u64 point count, f32 xyz per point,
// u64 center count, u64 center indices, u64 seed.
inline void write_syms(const std::filesystem::path& path, const SampledShape& shape) {
  io::Writer w(path);
  w.magic("SYMS");
  w.put<std::uint32_t>(1);
  w.put<std::uint64_t>(shape.cloud.size());
  for (const Vec3& p : shape.cloud.points) w.put_vec3f(p);
  w.put<std::uint64_t>(shape.centers.size());
  for (Index c : shape.centers) w.put<std::uint64_t>(c);
  w.put<std::uint64_t>(shape.rng_seed);
  w.close();
}

struct SymsContents {
  PointCloud cloud;
  IndexList centers;
  std::uint64_t seed = 0;
};

inline SymsContents read_syms_raw(const std::filesystem::path& path) {
  io::Reader r(path);
  r.expect_magic("SYMS");
  if (const auto v = r.get<std::uint32_t>(); v != 1)
    throw ParseError("unsupported SYMS version " + std::to_string(v));
  SymsContents out;
  const auto n = r.get<std::uint64_t>();
  r.check_remaining(n, 12);
  out.cloud.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.cloud.points.push_back(r.get_vec3f());
  const auto m = r.get<std::uint64_t>();
  r.check_remaining(m, 8);
  for (std::uint64_t i = 0; i < m; ++i) {
    const auto c = r.get<std::uint64_t>();
    if (c >= n) throw ParseError("SYMS center index out of range");
    out.centers.push_back(static_cast<Index>(c));
  }
  out.seed = r.get<std::uint64_t>();
  r.expect_end();
  return out;
}

// Reads a SYMS file and rebuilds the neighbor graph from the stored points.
inline SampledShape read_syms(const std::filesystem::path& path, std::size_t k = kDefaultNeighborK) {
  SymsContents raw = read_syms_raw(path);
  SampledShape shape = make_sampled_shape(std::move(raw.cloud), 0, raw.seed, k);
  shape.centers = std::move(raw.centers);
  return shape;
}

// Rounds coordinates to f32 so an in-memory shape matches what a SYMS round
// trip produces.
inline PointCloud round_to_float(PointCloud cloud) {
  for (Vec3& p : cloud.points) p = p.cast<float>().cast<double>();
  return cloud;
}

}  // namespace symdetect
