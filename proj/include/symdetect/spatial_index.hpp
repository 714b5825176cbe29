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
#include <array>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "symdetect/core.hpp"

namespace symdetect {

struct Neighbor {
  Index index = 0;
  double sq_dist = kInf;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.index < b.index);
  }
};

// Exact nearest-neighbor index over a fixed point set. Small sets are scanned
// linearly; larger ones use a median-split kd-tree. Ties resolve to the lowest
// point index in every query.
class SpatialIndex {
 public:
  static constexpr std::size_t kBruteForceBelow = 256;

  SpatialIndex() = default;

  explicit SpatialIndex(std::span<const Vec3> points)
      : points_(points.begin(), points.end()) {
    if (points_.size() >= kBruteForceBelow) {
      order_.resize(points_.size());
      std::iota(order_.begin(), order_.end(), Index{0});
      nodes_.reserve(2 * points_.size() / kLeafSize + 2);
      build(0, static_cast<Index>(points_.size()));
    }
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  Neighbor nearest(const Vec3& q) const {
    Neighbor best;
    if (nodes_.empty()) {
      for (Index i = 0; i < points_.size(); ++i) consider(best, i, squared_distance(q, points_[i]));
      return best;
    }
    nearest_rec(0, q, best);
    return best;
  }

  // The k nearest points sorted by (distance, index).
  std::vector<Neighbor> knn(const Vec3& q, std::size_t k) const {
    k = std::min(k, points_.size());
    std::vector<Neighbor> heap;
    heap.reserve(k + 1);
    if (k == 0) return heap;
    if (nodes_.empty()) {
      for (Index i = 0; i < points_.size(); ++i) push_knn(heap, k, {i, squared_distance(q, points_[i])});
    } else {
      knn_rec(0, q, k, heap);
    }
    std::sort_heap(heap.begin(), heap.end());
    return heap;
  }

  // Indices of all points with distance <= radius, ascending.
  IndexList radius(const Vec3& q, double r) const {
    IndexList out;
    const double r2 = r * r;
    if (nodes_.empty()) {
      for (Index i = 0; i < points_.size(); ++i)
        if (squared_distance(q, points_[i]) <= r2) out.push_back(i);
      return out;
    }
    radius_rec(0, q, r2, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr Index kLeafSize = 12;
  static constexpr Index kNoChild = 0xffffffffu;

  struct Node {
    Index begin = 0, end = 0;  // range into order_ for leaves
    Index left = kNoChild, right = kNoChild;
    int axis = -1;
    double split = 0.0;
    Vec3 lo, hi;  // bounding box
  };

  static void consider(Neighbor& best, Index i, double d) {
    if (d < best.sq_dist || (d == best.sq_dist && i < best.index)) best = {i, d};
  }

  static void push_knn(std::vector<Neighbor>& heap, std::size_t k, Neighbor n) {
    if (heap.size() < k) {
      heap.push_back(n);
      std::push_heap(heap.begin(), heap.end());
    } else if (n < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = n;
      std::push_heap(heap.begin(), heap.end());
    }
  }

  static double box_sq_dist(const Node& node, const Vec3& q) {
    double d = 0.0;
    for (int a = 0; a < 3; ++a) {
      double diff = 0.0;
      if (q[a] < node.lo[a]) diff = node.lo[a] - q[a];
      else if (q[a] > node.hi[a]) diff = q[a] - node.hi[a];
      d += diff * diff;
    }
    return d;
  }

  Index build(Index begin, Index end) {
    const Index id = static_cast<Index>(nodes_.size());
    nodes_.emplace_back();
    Vec3 lo = points_[order_[begin]], hi = lo;
    for (Index i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    nodes_[id].lo = lo;
    nodes_[id].hi = hi;
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= kLeafSize) return id;

    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const Index mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Index a, Index b) {
                       const double pa = points_[a][axis], pb = points_[b][axis];
                       return pa < pb || (pa == pb && a < b);
                     });
    const double split = points_[order_[mid]][axis];
    const Index left = build(begin, mid);
    const Index right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void nearest_rec(Index id, const Vec3& q, Neighbor& best) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        const Index p = order_[i];
        consider(best, p, squared_distance(q, points_[p]));
      }
      return;
    }
    const bool go_left = q[node.axis] < node.split;
    const Index first = go_left ? node.left : node.right;
    const Index second = go_left ? node.right : node.left;
    if (box_sq_dist(nodes_[first], q) <= best.sq_dist) nearest_rec(first, q, best);
    if (box_sq_dist(nodes_[second], q) <= best.sq_dist) nearest_rec(second, q, best);
  }

  void knn_rec(Index id, const Vec3& q, std::size_t k, std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        const Index p = order_[i];
        push_knn(heap, k, {p, squared_distance(q, points_[p])});
      }
      return;
    }
    const bool go_left = q[node.axis] < node.split;
    const Index first = go_left ? node.left : node.right;
    const Index second = go_left ? node.right : node.left;
    auto worst = [&] { return heap.size() < k ? kInf : heap.front().sq_dist; };
    if (box_sq_dist(nodes_[first], q) <= worst()) knn_rec(first, q, k, heap);
    if (box_sq_dist(nodes_[second], q) <= worst()) knn_rec(second, q, k, heap);
  }

  void radius_rec(Index id, const Vec3& q, double r2, IndexList& out) const {
    const Node& node = nodes_[id];
    if (box_sq_dist(node, q) > r2) return;
    if (node.axis < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        const Index p = order_[i];
        if (squared_distance(q, points_[p]) <= r2) out.push_back(p);
      }
      return;
    }
    radius_rec(node.left, q, r2, out);
    radius_rec(node.right, q, r2, out);
  }

  std::vector<Vec3> points_;
  IndexList order_;
  std::vector<Node> nodes_;
};

}  // namespace symdetect
