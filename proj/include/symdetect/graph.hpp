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
#include <queue>
#include <span>
#include <vector>

#include "symdetect/core.hpp"
#include "symdetect/spatial_index.hpp"

namespace symdetect {

// Symmetric weighted adjacency in CSR form. Neighbors of each node are sorted
// by index; weights are Euclidean edge lengths.
class NeighborGraph {
 public:
  NeighborGraph() = default;

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  std::size_t k() const { return k_; }
  double mean_edge_length() const { return mean_edge_; }

  std::span<const Index> neighbors(Index i) const {
    return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
  }
  std::span<const double> weights(Index i) const {
    return {weights_.data() + offsets_[i], weights_.data() + offsets_[i + 1]};
  }

  // Builds from an undirected edge list; duplicates are merged.
  static NeighborGraph from_edges(std::size_t n, std::vector<std::pair<Index, Index>> edges,
                                  std::span<const Vec3> points, std::size_t k) {
    for (auto& e : edges)
      if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    NeighborGraph g;
    g.k_ = k;
    std::vector<std::size_t> degree(n, 0);
    for (const auto& [a, b] : edges) {
      ++degree[a];
      ++degree[b];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + degree[i];
    g.neighbors_.resize(g.offsets_[n]);
    g.weights_.resize(g.offsets_[n]);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    double total = 0.0;
    for (const auto& [a, b] : edges) {
      const double w = std::sqrt(squared_distance(points[a], points[b]));
      total += w;
      g.neighbors_[fill[a]] = b;
      g.weights_[fill[a]++] = w;
      g.neighbors_[fill[b]] = a;
      g.weights_[fill[b]++] = w;
    }
    // Edges were visited in (min, max) order, so each row is already sorted
    // except for entries contributed as the larger endpoint; sort rows.
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = g.offsets_[i], hi = g.offsets_[i + 1];
      std::vector<std::pair<Index, double>> row;
      row.reserve(hi - lo);
      for (std::size_t e = lo; e < hi; ++e) row.emplace_back(g.neighbors_[e], g.weights_[e]);
      std::sort(row.begin(), row.end());
      for (std::size_t e = lo; e < hi; ++e) {
        g.neighbors_[e] = row[e - lo].first;
        g.weights_[e] = row[e - lo].second;
      }
    }
    g.mean_edge_ = edges.empty() ? 0.0 : total / static_cast<double>(edges.size());
    return g;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Index> neighbors_;
  std::vector<double> weights_;
  std::size_t k_ = 0;
  double mean_edge_ = 0.0;
};

// Symmetric closure of the k-nearest-neighbor digraph. Coincident points are
// not joined (edge weights stay strictly positive).
inline NeighborGraph build_neighbor_graph(std::span<const Vec3> points, std::size_t k,
                                          const SpatialIndex* index = nullptr) {
  const std::size_t n = points.size();
  if (k < 1 || k >= n) throw BadCount("neighbor count k must satisfy 1 <= k < |cloud|");
  SpatialIndex local;
  if (index == nullptr) {
    local = SpatialIndex(points);
    index = &local;
  }
  std::vector<std::pair<Index, Index>> edges;
  edges.reserve(n * k);
  for (Index i = 0; i < n; ++i) {
    std::size_t want = k + 1, taken = 0;
    while (true) {
      const auto nn = index->knn(points[i], want);
      taken = 0;
      std::size_t used = 0;
      for (const Neighbor& nb : nn) {
        if (nb.index == i || nb.sq_dist == 0.0) continue;
        ++used;
        if (used > k) break;
        ++taken;
      }
      if (taken >= k || nn.size() == n) {
        used = 0;
        for (const Neighbor& nb : nn) {
          if (nb.index == i || nb.sq_dist == 0.0) continue;
          if (used++ == k) break;
          edges.emplace_back(i, nb.index);
        }
        break;
      }
      want *= 2;
    }
  }
  return NeighborGraph::from_edges(n, std::move(edges), points, k);
}

// Component label per node, labels numbered by lowest member index.
inline IndexList connected_components(const NeighborGraph& g, std::size_t* count = nullptr) {
  const std::size_t n = g.node_count();
  IndexList label(n, 0xffffffffu);
  Index next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (label[s] != 0xffffffffu) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index v : g.neighbors(u))
        if (label[v] == 0xffffffffu) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

struct GeodesicField {
  IndexList sources;
  std::vector<double> dist;  // +inf where unreachable
  // Source label per node (index into the caller's label list), or kNoLabel.
  IndexList label;
  // True when max_distance stopped the search before the component was exhausted.
  bool truncated = false;
  static constexpr Index kNoLabel = 0xffffffffu;
};

struct GeodesicOptions {
  // Nodes farther than this are left at +inf and not expanded.
  double max_distance = kInf;
  // Line-of-sight shortcut radius as a multiple of the mean edge length;
  // 0 disables shortcuts (plain graph Dijkstra).
  double shortcut_factor = 10.0;
};

// Multi-source shortest paths over the neighbor graph with any-angle
// relaxation: when node v is reached from u, the straight segment from u's
// predecessor to v is also tried if it is shorter than the shortcut radius.
// This removes most of the metrication error of a k-NN graph on flat and
// gently curved regions. The search is label-correcting, so at exit every
// edge satisfies dist[v] <= dist[u] + w(u, v).
//
// source_labels, when non-empty, gives a label per source; each node takes the
// label of the source its shortest path starts from (ties: lower label).
inline GeodesicField geodesic_field(const NeighborGraph& graph, std::span<const Vec3> points,
                                    std::span<const Index> sources,
                                    std::span<const Index> source_labels = {},
                                    const GeodesicOptions& opts = {}) {
  const std::size_t n = graph.node_count();
  if (sources.empty()) throw BadCount("geodesic field needs at least one source");
  GeodesicField field;
  field.sources.assign(sources.begin(), sources.end());
  field.dist.assign(n, kInf);
  field.label.assign(n, GeodesicField::kNoLabel);
  std::vector<Index> anchor(n, 0xffffffffu);

  const double shortcut = opts.shortcut_factor * graph.mean_edge_length();
  const double shortcut2 = shortcut * shortcut;

  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const Index i = sources[s];
    if (i >= n) throw BadCount("geodesic source index out of range");
    const Index lab = source_labels.empty() ? 0 : source_labels[s];
    if (field.dist[i] == 0.0 && field.label[i] <= lab) continue;
    field.dist[i] = 0.0;
    field.label[i] = lab;
    anchor[i] = i;
    heap.emplace(0.0, i);
  }

  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > field.dist[u]) continue;
    const Index a = anchor[u];
    const auto nbrs = graph.neighbors(u);
    const auto ws = graph.weights(u);
    for (std::size_t e = 0; e < nbrs.size(); ++e) {
      const Index v = nbrs[e];
      double nd = du + ws[e];
      Index nanchor = u;
      if (shortcut2 > 0.0 && a != u) {
        const double sq = squared_distance(points[a], points[v]);
        if (sq <= shortcut2) {
          const double cand = field.dist[a] + std::sqrt(sq);
          if (cand < nd) {
            nd = cand;
            nanchor = a;
          }
        }
      }
      if (nd > opts.max_distance) {
        if (field.dist[v] == kInf) field.truncated = true;
        continue;
      }
      const Index lab = field.label[u];
      if (nd < field.dist[v] || (nd == field.dist[v] && lab < field.label[v])) {
        field.dist[v] = nd;
        field.label[v] = lab;
        anchor[v] = nanchor;
        heap.emplace(nd, v);
      }
    }
  }
  return field;
}

}  // namespace symdetect
