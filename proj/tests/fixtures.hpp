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

#include <cmath>
#include <filesystem>
#include <string>
#include <numbers>
#include <vector>

#include "symdetect/core.hpp"
#include "symdetect/detect.hpp"
#include "symdetect/mesh_io.hpp"
#include "symdetect/random.hpp"
#include "symdetect/sampling.hpp"
#include "symdetect/shape.hpp"

namespace symdetect::fixtures {

inline std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "symdetect_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Rows are normalized to unit length.
inline EmbeddingSet embeddings_from(const std::vector<std::vector<double>>& rows) {
  EmbeddingSet e;
  e.dim = rows.at(0).size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double n = 0;
    for (double v : rows[i]) n += v * v;
    for (double v : rows[i]) e.values.push_back(v / std::sqrt(n));
    e.patch_ids.push_back(i);
  }
  return e;
}

inline std::vector<double> basis(std::size_t dim, std::size_t k) {
  std::vector<double> v(dim, 0.0);
  v[k] = 1.0;
  return v;
}

// Axis-aligned box; faces can be left out where boxes touch.
inline Mesh box(const Vec3& lo, const Vec3& hi, bool top = true, bool bottom = true) {
  Mesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  auto quad = [&](Index a, Index b, Index c, Index d) {
    m.faces.push_back({a, b, c});
    m.faces.push_back({a, c, d});
  };
  if (bottom) quad(0, 2, 3, 1);
  if (top) quad(4, 5, 7, 6);
  quad(0, 1, 5, 4);
  quad(2, 6, 7, 3);
  quad(0, 4, 6, 2);
  quad(1, 3, 7, 5);
  return m;
}

inline Mesh merge(const std::vector<Mesh>& parts) {
  Mesh out;
  for (const Mesh& p : parts) {
    const auto base = static_cast<Index>(out.vertices.size());
    out.vertices.insert(out.vertices.end(), p.vertices.begin(), p.vertices.end());
    for (Face f : p.faces) out.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  }
  return out;
}

inline double mesh_area(const Mesh& m) {
  double a = 0.0;
  for (const Face& f : m.faces) a += face_area(m, f);
  return a;
}

inline PointCloud translated(const PointCloud& c, const Vec3& t) {
  PointCloud out = c;
  for (Vec3& p : out.points) p += t;
  return out;
}

inline PointCloud transformed(const PointCloud& c, const Mat3& r, const Vec3& t) {
  PointCloud out = c;
  for (Vec3& p : out.points) p = r * p + t;
  return out;
}

inline void append(PointCloud& dst, const PointCloud& src) {
  dst.points.insert(dst.points.end(), src.points.begin(), src.points.end());
}

// Table: one top slab and four legs. The legs are translated copies of one
// sampled leg, so congruent leg pieces are exactly congruent point sets.
struct TableFixture {
  PointCloud cloud;
  IndexList top;
  std::vector<IndexList> legs;
  Mesh top_mesh, leg_mesh;
  std::vector<Vec3> leg_offsets;
};

inline constexpr double kTableLegHeight = 0.7;
inline constexpr double kTableLegWidth = 0.08;

inline TableFixture make_table(std::size_t n, std::uint64_t seed) {
  TableFixture t;
  const double h = kTableLegHeight, w = kTableLegWidth;
  t.top_mesh = box({-0.5, -0.3, h}, {0.5, 0.3, h + 0.04});
  t.leg_mesh = box({-w / 2, -w / 2, 0.0}, {w / 2, w / 2, h}, false, true);
  const double a_top = mesh_area(t.top_mesh), a_leg = mesh_area(t.leg_mesh);
  const auto n_leg = static_cast<std::size_t>(std::llround(static_cast<double>(n) * a_leg / (a_top + 4 * a_leg)));
  const std::size_t n_top = n - 4 * n_leg;
  t.cloud = sample_surface(t.top_mesh, n_top, derive_seed(seed, 1));
  t.cloud.source_face.clear();
  for (std::size_t i = 0; i < n_top; ++i) t.top.push_back(static_cast<Index>(i));
  const PointCloud leg = sample_surface(t.leg_mesh, n_leg, derive_seed(seed, 2));
  const double x = 0.5 - 0.1, y = 0.3 - 0.08;
  t.leg_offsets = {{-x, -y, 0.0}, {x, -y, 0.0}, {-x, y, 0.0}, {x, y, 0.0}};
  for (const Vec3& off : t.leg_offsets) {
    IndexList ids;
    for (std::size_t i = 0; i < n_leg; ++i) ids.push_back(static_cast<Index>(t.cloud.size() + i));
    append(t.cloud, translated(leg, off));
    t.legs.push_back(std::move(ids));
  }
  return t;
}

// Generic point set with no symmetry: anisotropic Gaussian with a skewed tail.
inline PointCloud asymmetric_cloud(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal(), b = rng.normal(), d = rng.normal();
    c.points.emplace_back(0.5 * a + 0.15 * a * a, 0.3 * b + 0.1 * a * b, 0.15 * d + 0.05 * b * b);
  }
  return c;
}

inline Mesh uv_sphere(double r, int rings, int segments) {
  Mesh m;
  m.vertices.emplace_back(0, 0, r);
  for (int i = 1; i < rings; ++i) {
    const double th = std::numbers::pi * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double ph = 2 * std::numbers::pi * j / segments;
      m.vertices.emplace_back(r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th));
    }
  }
  m.vertices.emplace_back(0, 0, -r);
  const auto south = static_cast<Index>(m.vertices.size() - 1);
  auto at = [&](int ring, int seg) { return static_cast<Index>(1 + (ring - 1) * segments + (seg % segments)); };
  for (int j = 0; j < segments; ++j) {
    m.faces.push_back({0, at(1, j), at(1, j + 1)});
    m.faces.push_back({south, at(rings - 1, j + 1), at(rings - 1, j)});
  }
  for (int i = 1; i < rings - 1; ++i)
    for (int j = 0; j < segments; ++j) {
      m.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      m.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  return m;
}

}  // namespace symdetect::fixtures
