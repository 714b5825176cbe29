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

#include "symdetect/core.hpp"
#include "symdetect/mesh_io.hpp"
#include "symdetect/random.hpp"

namespace symdetect {

// Area-uniform surface sample: faces drawn proportionally to area, points
// uniform in barycentric coordinates within the face.
inline PointCloud sample_surface(const Mesh& mesh, std::size_t n, std::uint64_t seed) {
  if (mesh.faces.empty()) throw EmptyGeometry("mesh has no faces");
  if (n == 0) throw BadCount("sample count must be >= 1");
  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    total += face_area(mesh, mesh.faces[f]);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) throw EmptyGeometry("mesh has zero surface area");

  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(n);
  cloud.source_face.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto f = static_cast<Index>(it - cumulative.begin());
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Face& face = mesh.faces[f];
    const Vec3& a = mesh.vertices[face[0]];
    const Vec3& b = mesh.vertices[face[1]];
    const Vec3& c = mesh.vertices[face[2]];
    cloud.points.push_back(a + u * (b - a) + v * (c - a));
    cloud.source_face.push_back(f);
  }
  return cloud;
}

// Greedy farthest point sampling under the Euclidean metric. The first index
// is drawn uniformly from the seed; every later index maximizes the distance
// to the selected set, ties going to the lowest index. The result for m' < m
// is a prefix of the result for m.
inline IndexList farthest_point_sampling(std::span<const Vec3> points, std::size_t m,
                                         std::uint64_t seed) {
  const std::size_t n = points.size();
  if (m < 1 || m > n) throw BadCount("fps count " + std::to_string(m) + " outside [1, " +
                                     std::to_string(n) + "]");
  Rng rng(seed);
  IndexList selected;
  selected.reserve(m);
  selected.push_back(static_cast<Index>(rng.below(n)));
  std::vector<double> min_d(n, kInf);
  min_d[selected.back()] = -1.0;  // selected points are never candidates again
  for (std::size_t step = 1; step < m; ++step) {
    const Vec3& last = points[selected.back()];
    double best = -1.0;
    Index best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = squared_distance(points[i], last);
      if (d < min_d[i]) min_d[i] = d;
      if (min_d[i] > best) {
        best = min_d[i];
        best_i = static_cast<Index>(i);
      }
    }
    selected.push_back(best_i);
    min_d[best_i] = -1.0;
  }
  return selected;
}

inline IndexList farthest_point_sampling(const PointCloud& cloud, std::size_t m, std::uint64_t seed) {
  return farthest_point_sampling(std::span<const Vec3>(cloud.points), m, seed);
}

}  // namespace symdetect
