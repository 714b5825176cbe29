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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "symdetect/core.hpp"
#include "symdetect/detect.hpp"
#include "symdetect/distance_matrix.hpp"
#include "symdetect/graph.hpp"
#include "symdetect/icp.hpp"
#include "symdetect/shape.hpp"

namespace symdetect {

struct Assignment {
  IndexList region;           // nearest region per point, kNoRegion if unreachable
  std::vector<double> dist;   // geodesic distance to that region, +inf if unreachable
  std::size_t unreachable = 0;
  static constexpr Index kNoRegion = GeodesicField::kNoLabel;
};

// Multi-source shortest paths from every region point (distance 0); each point
// takes the region of its nearest source, ties to the lower region id.
inline Assignment assign_points(const Hypothesis& h, const SampledShape& shape) {
  IndexList sources, labels;
  for (std::size_t r = 0; r < h.regions.size(); ++r) {
    if (h.regions[r].points.empty()) throw InputError("hypothesis has an empty region");
    for (Index i : h.regions[r].points) {
      sources.push_back(i);
      labels.push_back(static_cast<Index>(r));
    }
  }
  if (sources.empty()) throw InputError("hypothesis has no regions");
  GeodesicField f = geodesic_field(shape.graph, shape.cloud.points, sources, labels);
  Assignment a;
  a.region = std::move(f.label);
  a.dist = std::move(f.dist);
  a.unreachable = static_cast<std::size_t>(std::count(a.region.begin(), a.region.end(), Assignment::kNoRegion));
  return a;
}

struct GrowConfig {
  std::size_t steps = 100;
  // Step values within this of the minimum count as equal; the largest such
  // step is selected.
  double tie_tolerance = 1e-9;
};

struct GrowthProfile {
  std::vector<double> grid;          // delta_d per step, strictly increasing
  std::vector<double> max_distance;  // max pairwise ICP distance per step
  std::vector<std::vector<std::size_t>> sizes;  // region sizes per step
  std::size_t selected = 0;          // argmin step
  Assignment assignment;
  std::size_t region_count = 0;

  std::size_t steps() const { return grid.size(); }
  double selected_delta() const { return grid[selected]; }
  // Regions at a step: points assigned to region r within grid[step].
  std::vector<Region> regions_at(std::size_t step) const {
    std::vector<Region> out(region_count);
    const double limit = grid.at(step);
    for (std::size_t i = 0; i < assignment.region.size(); ++i) {
      const Index r = assignment.region[i];
      if (r != Assignment::kNoRegion && assignment.dist[i] <= limit) out[r].points.push_back(static_cast<Index>(i));
    }
    return out;
  }
};

// Grows all regions together along the geodesic field and records the max
// pairwise ICP distance for each of `steps` linear thresholds up to the
// farthest assigned point. Pair seeds match filter_hypotheses.
inline GrowthProfile grow_hypothesis(const Hypothesis& h, const SampledShape& shape, const IcpConfig& icp,
                                     const GrowConfig& cfg = {}, std::size_t parallelism = 1) {
  if (cfg.steps < 1) throw BadCount("growth needs at least one step");
  icp.validate();
  GrowthProfile p;
  p.assignment = assign_points(h, shape);
  p.region_count = h.regions.size();
  double dmax = 0.0;
  for (std::size_t i = 0; i < p.assignment.dist.size(); ++i)
    if (p.assignment.region[i] != Assignment::kNoRegion) dmax = std::max(dmax, p.assignment.dist[i]);
  const std::size_t steps = dmax > 0.0 ? cfg.steps : 1;
  for (std::size_t t = 0; t < steps; ++t)
    p.grid.push_back(steps == 1 ? 0.0 : dmax * static_cast<double>(t) / static_cast<double>(steps - 1));
  p.grid.back() = dmax;

  std::vector<std::vector<Region>> snaps(steps);
  p.sizes.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    snaps[t] = p.regions_at(t);
    for (const Region& r : snaps[t]) p.sizes[t].push_back(r.points.size());
  }
  // Steps whose regions repeat the previous step reuse its distance.
  std::vector<std::size_t> owner(steps);
  std::vector<std::size_t> unique;
  for (std::size_t t = 0; t < steps; ++t) {
    owner[t] = t > 0 && p.sizes[t] == p.sizes[t - 1] ? owner[t - 1] : t;
    if (owner[t] == t) unique.push_back(t);
  }
  std::vector<double> value(steps, kInf);
  parallel_for(unique.size(), parallelism, [&](std::size_t u) {
    const std::size_t t = unique[u];
    std::vector<PointCloud> clouds;
    for (const Region& r : snaps[t]) clouds.push_back(subset(shape.cloud, r.points));
    value[t] = max_region_distance(clouds, icp);
  });
  p.max_distance.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) p.max_distance[t] = value[owner[t]];

  double best = kInf;
  for (double v : p.max_distance) best = std::min(best, v);
  p.selected = 0;
  for (std::size_t t = 0; t < steps; ++t)
    if (p.max_distance[t] <= best + cfg.tie_tolerance) p.selected = t;
  return p;
}

// Largest step whose max pairwise distance is at most delta.
inline std::size_t select_by_threshold(const GrowthProfile& p, double delta) {
  if (p.grid.empty()) throw InputError("empty growth profile");
  for (std::size_t t = p.steps(); t-- > 0;)
    if (p.max_distance[t] <= delta) return t;
  throw NoFeasibleStep("no growth step has max distance <= threshold");
}

// CSV: step, delta_d, max_d_icp, then one size column per region.
inline void write_growth_csv(const std::filesystem::path& path, const GrowthProfile& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "step,delta_d,max_d_icp";
  for (std::size_t r = 0; r < p.region_count; ++r) out << ",region_" << r;
  out << '\n';
  char buf[64];
  for (std::size_t t = 0; t < p.steps(); ++t) {
    out << t;
    std::snprintf(buf, sizeof buf, ",%.17g", p.grid[t]);
    out << buf;
    if (std::isfinite(p.max_distance[t])) std::snprintf(buf, sizeof buf, ",%.17g", p.max_distance[t]);
    else std::snprintf(buf, sizeof buf, ",inf");
    out << buf;
    for (std::size_t s : p.sizes[t]) out << ',' << s;
    out << '\n';
  }
}

// Colored PLY of the regions at `step`: initial points dark, grown points light.
inline void write_growth_ply(const std::filesystem::path& path, const GrowthProfile& p, std::size_t step,
                             const PointCloud& cloud) {
  std::vector<Rgb> colors(cloud.size(), Rgb{180, 180, 180});
  const double limit = p.grid.at(step);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Index r = p.assignment.region[i];
    if (r == Assignment::kNoRegion || p.assignment.dist[i] > limit) continue;
    colors[i] = region_color(r, p.assignment.dist[i] == 0.0 ? 0.5 : 0.95);
  }
  write_colored_ply(path, cloud.points, colors);
}

}  // namespace symdetect
