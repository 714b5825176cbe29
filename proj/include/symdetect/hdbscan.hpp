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
#include <functional>
#include <numeric>
#include <vector>

#include "symdetect/core.hpp"
#include "symdetect/distance_matrix.hpp"

namespace symdetect {

struct ClusterParams {
  std::size_t min_cluster_size = 4;
  // Neighbor count for core distances (counting the point itself); 0 means
  // "same as min_cluster_size".
  std::size_t min_samples = 0;
};

struct Clustering {
  std::vector<int> labels;  // -1 is noise
  std::size_t cluster_count = 0;
};

namespace detail {

struct CondensedEntry {
  std::size_t parent;  // cluster id
  std::size_t child;   // point index (< n) or n + cluster id
  double lambda;
  std::size_t size;
};

}  // namespace detail

// HDBSCAN over a precomputed dissimilarity: core distances, mutual
// reachability, minimum spanning tree (Prim), single-linkage hierarchy,
// condensation by min_cluster_size and excess-of-mass cluster selection. The
// root is never selected, except that an input with all distances zero is one
// cluster. Pure function of the matrix; ties resolve by index.
inline Clustering hdbscan(const DistanceMatrix& d, const ClusterParams& params) {
  const std::size_t n = d.size();
  const std::size_t mcs = params.min_cluster_size;
  const std::size_t ms = params.min_samples == 0 ? mcs : params.min_samples;
  if (mcs < 2) throw BadCount("min_cluster_size must be >= 2");
  if (n < mcs || n < 2) throw TooFewItems("not enough items for min_cluster_size");
  if (ms < 1 || ms > n) throw BadCount("min_samples outside [1, n]");

  Clustering out;
  out.labels.assign(n, -1);

  // Core distance: distance to the ms-th nearest item, the item itself first.
  std::vector<double> core(n);
  std::vector<double> row(n);
  double max_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = i == j ? 0.0 : d(i, j);
      if (std::isfinite(row[j])) max_d = std::max(max_d, row[j]);
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(ms - 1), row.end());
    core[i] = row[ms - 1];
  }
  if (max_d == 0.0) {
    std::fill(out.labels.begin(), out.labels.end(), 0);
    out.cluster_count = 1;
    return out;
  }
  auto mreach = [&](std::size_t i, std::size_t j) { return std::max({core[i], core[j], d(i, j)}); };

  // Prim's MST on the dense mutual reachability graph.
  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> mst;
  mst.reserve(n - 1);
  {
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, kInf);
    std::vector<std::size_t> from(n, 0);
    std::size_t cur = 0;
    in_tree[0] = true;
    for (std::size_t step = 1; step < n; ++step) {
      for (std::size_t j = 0; j < n; ++j) {
        if (in_tree[j]) continue;
        const double w = mreach(cur, j);
        if (w < best[j]) {
          best[j] = w;
          from[j] = cur;
        }
      }
      std::size_t next = n;
      for (std::size_t j = 0; j < n; ++j)
        if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
      mst.push_back({std::min(from[next], next), std::max(from[next], next), best[next]});
      in_tree[next] = true;
      cur = next;
    }
  }
  std::sort(mst.begin(), mst.end(), [](const Edge& x, const Edge& y) {
    return x.w < y.w || (x.w == y.w && (x.a < y.a || (x.a == y.a && x.b < y.b)));
  });

  // Single-linkage dendrogram: node n + k is the k-th merge.
  const std::size_t nodes = 2 * n - 1;
  std::vector<std::size_t> left(nodes, 0), right(nodes, 0), size(nodes, 1);
  std::vector<double> height(nodes, 0.0);
  {
    std::vector<std::size_t> parent(nodes);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t k = 0; k < mst.size(); ++k) {
      const std::size_t ra = find(mst[k].a), rb = find(mst[k].b);
      const std::size_t node = n + k;
      left[node] = std::min(ra, rb);
      right[node] = std::max(ra, rb);
      size[node] = size[ra] + size[rb];
      height[node] = mst[k].w;
      parent[ra] = parent[rb] = node;
    }
  }

  const double lambda_cap = 1.0 / (1e-12 * max_d);
  auto lambda_of = [&](double h) { return h > 0.0 ? std::min(1.0 / h, lambda_cap) : lambda_cap; };

  // Condense the hierarchy.
  std::vector<detail::CondensedEntry> tree;
  std::vector<std::size_t> relabel(nodes, 0);
  std::size_t next_cluster = 1;  // cluster 0 is the root
  auto leaves_of = [&](std::size_t node, std::vector<std::size_t>& acc) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x < n) acc.push_back(x);
      else {
        stack.push_back(left[x]);
        stack.push_back(right[x]);
      }
    }
  };
  {
    std::vector<std::size_t> queue{nodes - 1};
    relabel[nodes - 1] = 0;
    std::vector<std::size_t> leaves;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t node = queue[q];
      if (node < n) continue;
      const std::size_t l = left[node], r = right[node];
      const double lam = lambda_of(height[node]);
      const std::size_t cl = relabel[node];
      const bool big_l = size[l] >= mcs, big_r = size[r] >= mcs;
      if (big_l && big_r) {
        for (std::size_t c : {l, r}) {
          relabel[c] = next_cluster++;
          tree.push_back({cl, n + relabel[c], lam, size[c]});
          queue.push_back(c);
        }
      } else {
        for (std::size_t c : {l, r}) {
          if (size[c] >= mcs) {
            relabel[c] = cl;
            queue.push_back(c);
          } else {
            leaves.clear();
            leaves_of(c, leaves);
            std::sort(leaves.begin(), leaves.end());
            for (std::size_t p : leaves) tree.push_back({cl, p, lam, 1});
          }
        }
      }
    }
  }

  const std::size_t clusters = next_cluster;
  std::vector<double> birth(clusters, 0.0), stability(clusters, 0.0);
  std::vector<std::size_t> cluster_parent(clusters, 0);
  std::vector<std::vector<std::size_t>> children(clusters);
  for (const auto& e : tree)
    if (e.child >= n) {
      const std::size_t c = e.child - n;
      birth[c] = e.lambda;
      cluster_parent[c] = e.parent;
      children[e.parent].push_back(c);
    }
  for (const auto& e : tree) stability[e.parent] += (e.lambda - birth[e.parent]) * static_cast<double>(e.size);

  // Excess of mass; children always carry larger ids than their parent.
  std::vector<bool> selected(clusters, true);
  selected[0] = false;
  std::function<void(std::size_t)> deselect_below = [&](std::size_t c) {
    for (std::size_t ch : children[c]) {
      selected[ch] = false;
      deselect_below(ch);
    }
  };
  for (std::size_t c = clusters; c-- > 1;) {
    if (children[c].empty()) continue;
    double sub = 0.0;
    for (std::size_t ch : children[c]) sub += stability[ch];
    if (sub > stability[c]) {
      selected[c] = false;
      stability[c] = sub;
    } else {
      deselect_below(c);
    }
  }

  // Points take the selected cluster on their path to the root.
  std::vector<long> final_label(clusters, -1);
  std::vector<std::size_t> point_cluster(n, 0);
  for (const auto& e : tree)
    if (e.child < n) point_cluster[e.child] = e.parent;
  std::vector<std::size_t> owner(n, 0);
  std::vector<bool> has_owner(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t c = point_cluster[p];
    while (c != 0 && !selected[c]) c = cluster_parent[c];
    if (c != 0) {
      owner[p] = c;
      has_owner[p] = true;
    }
  }
  // Number selected clusters by their lowest member.
  int next_label = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!has_owner[p]) continue;
    if (final_label[owner[p]] < 0) final_label[owner[p]] = next_label++;
    out.labels[p] = static_cast<int>(final_label[owner[p]]);
  }
  out.cluster_count = static_cast<std::size_t>(next_label);
  return out;
}

}  // namespace symdetect
