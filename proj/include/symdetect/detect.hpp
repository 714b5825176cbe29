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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "symdetect/binary_io.hpp"
#include "symdetect/core.hpp"
#include "symdetect/distance_matrix.hpp"
#include "symdetect/graph.hpp"
#include "symdetect/hdbscan.hpp"
#include "symdetect/icp.hpp"
#include "symdetect/mesh_io.hpp"
#include "symdetect/patches.hpp"
#include "symdetect/shape.hpp"
#include "symdetect/spatial_index.hpp"

namespace symdetect {

inline constexpr std::size_t kDefaultEmbeddingDim = 32;

struct EmbeddingSet {
  std::size_t dim = kDefaultEmbeddingDim;
  std::vector<double> values;  // row-major, size() * dim
  std::vector<std::uint64_t> patch_ids;

  std::size_t size() const { return patch_ids.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  void validate(double tol = 1e-5) const;
};

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw SizeMismatch("vector widths differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine similarity of a zero vector");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

inline void EmbeddingSet::validate(double tol) const {
  if (values.size() != size() * dim) throw SizeMismatch("embedding values do not match n * dim");
  for (std::size_t i = 0; i < size(); ++i) {
    double sq = 0.0;
    for (double v : row(i)) sq += v * v;
    if (std::abs(std::sqrt(sq) - 1.0) > tol) throw InputError("embedding " + std::to_string(i) + " is not unit length");
  }
}

// SYME container: magic, u32 version, u64 n, u64 dim, n * dim f32, n u64 patch ids.
inline void write_syme(const std::filesystem::path& path, const EmbeddingSet& e) {
  io::Writer w(path);
  w.magic("SYME");
  w.put<std::uint32_t>(1);
  w.put<std::uint64_t>(e.size());
  w.put<std::uint64_t>(e.dim);
  for (double v : e.values) w.put<float>(static_cast<float>(v));
  for (std::uint64_t id : e.patch_ids) w.put<std::uint64_t>(id);
  w.close();
}

inline EmbeddingSet read_syme(const std::filesystem::path& path) {
  io::Reader r(path);
  r.expect_magic("SYME");
  if (r.get<std::uint32_t>() != 1) throw ParseError("unsupported SYME version");
  EmbeddingSet e;
  const auto n = r.get<std::uint64_t>();
  e.dim = r.get<std::uint64_t>();
  if (e.dim == 0) throw ParseError("SYME dim is zero");
  r.check_remaining(n, e.dim * 4 + 8);
  e.values.resize(n * e.dim);
  for (double& v : e.values) v = r.get<float>();
  e.patch_ids.resize(n);
  for (auto& id : e.patch_ids) id = r.get<std::uint64_t>();
  r.expect_end();
  e.validate();
  return e;
}

// 1 - cosine similarity, clamped at zero.
inline DistanceMatrix cosine_distances(const EmbeddingSet& e) {
  DistanceMatrix m(e.size(), DistanceKind::cosine, 0);
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j)
      m.set(i, j, std::max(0.0, 1.0 - cosine_similarity(e.row(i), e.row(j))));
  return m;
}

struct Region {
  IndexList points;   // sorted
  IndexList core;     // sorted; points the region was built from, before refinement
  IndexList patches;  // sorted ids into the patch list (part ids for part-level sets)
};

struct Hypothesis {
  std::vector<Region> regions;
  double max_distance = kInf;
  long cluster_id = -1;
};

enum class RegionDomain { points, parts };

struct SymmetrySet {
  std::vector<Hypothesis> hypotheses;
  std::string shape_ref;
  std::uint64_t fingerprint = 0;
  RegionDomain domain = RegionDomain::points;
};

struct DetectConfig {
  std::size_t min_patch_count = 1024;
  ClusterParams cluster{};
  double alpha = 2.0;
  // Refinement radius in model units; unset means half the mean center spacing.
  std::optional<double> epsilon;
  double delta_sim = 0.005;
  std::size_t max_regions = 30;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(delta_sim > 0.0)) throw InputError("delta_sim must be positive");
    if (epsilon && !(*epsilon > 0.0)) throw InputError("epsilon must be positive");
    if (!(alpha > 0.0)) throw InputError("alpha must be positive");
    if (max_regions < 2) throw InputError("max_regions must be at least 2");
  }
  std::uint64_t fingerprint() const {
    Fnv1a h;
    h.add(min_patch_count).add(cluster.min_cluster_size).add(cluster.min_samples).add(alpha);
    h.add(epsilon.value_or(-1.0)).add(delta_sim).add(max_regions).add(seed);
    return h.value();
  }
};

inline Clustering cluster_features(const DistanceMatrix& m, const DetectConfig& cfg) {
  return hdbscan(m, cfg.cluster);
}

inline Clustering cluster_features(const EmbeddingSet& e, const DetectConfig& cfg) {
  if (e.size() < cfg.cluster.min_cluster_size) throw TooFewItems("fewer embeddings than min_cluster_size");
  return hdbscan(cosine_distances(e), cfg.cluster);
}

// Mean Euclidean distance from each center to its nearest other center.
inline double mean_center_spacing(const PointCloud& cloud, std::span<const Index> centers) {
  IndexList uniq(centers.begin(), centers.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  if (uniq.size() < 2) return 0.0;
  const PointCloud pts = subset(cloud, uniq);
  const SpatialIndex index(pts.points);
  double sum = 0.0;
  for (const Vec3& p : pts.points) sum += std::sqrt(index.knn(p, 2).back().sq_dist);
  return sum / static_cast<double>(uniq.size());
}

inline IndexList distinct_centers(std::span<const Patch> patches) {
  IndexList c;
  for (const Patch& p : patches) c.push_back(p.center);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

namespace detail {

inline IndexList sorted_union(const IndexList& a, const IndexList& b) {
  IndexList out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

// Groups member patches whose centers are within geodesic distance `threshold`
// and merges each group into one region. Regions come out ordered by their
// lowest patch id.
inline std::vector<Region> split_components(std::span<const std::size_t> members, std::span<const Patch> patches,
                                            const SampledShape& shape, double threshold) {
  const std::size_t m = members.size();
  detail::UnionFind uf(m);
  std::map<Index, std::vector<std::size_t>> by_center;
  for (std::size_t a = 0; a < m; ++a) by_center[patches[members[a]].center].push_back(a);
  GeodesicOptions opts;
  opts.max_distance = threshold;
  for (const auto& [center, group] : by_center) {
    for (std::size_t g = 1; g < group.size(); ++g) uf.unite(group[0], group[g]);
    const Index src[] = {center};
    const GeodesicField f = geodesic_field(shape.graph, shape.cloud.points, src, {}, opts);
    for (const auto& [other, og] : by_center)
      if (other != center && f.dist[other] <= threshold) uf.unite(group[0], og[0]);
  }
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t a = 0; a < m; ++a) comps[uf.find(a)].push_back(a);
  std::vector<Region> out;
  for (const auto& [root, list] : comps) {
    Region r;
    for (std::size_t a : list) {
      r.patches.push_back(static_cast<Index>(members[a]));
      IndexList pts = patches[members[a]].point_indices;
      std::sort(pts.begin(), pts.end());
      r.points = detail::sorted_union(r.points, pts);
    }
    std::sort(r.patches.begin(), r.patches.end());
    r.core = r.points;
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const Region& a, const Region& b) { return a.patches < b.patches; });
  return out;
}

inline std::vector<Region> split_components(std::span<const std::size_t> members, std::span<const Patch> patches,
                                            const SampledShape& shape, double alpha, double spacing) {
  return split_components(members, patches, shape, alpha * spacing);
}

// Adds every point within Euclidean epsilon of the region's core. Working from
// the core keeps the operation idempotent.
inline Region refine_region(const Region& region, const SampledShape& shape, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  Region out = region;
  if (out.core.empty()) out.core = out.points;
  std::vector<bool> in(shape.size(), false);
  for (Index i : out.core) in[i] = true;
  for (Index i : out.core)
    for (Index j : shape.index->radius(shape.cloud.points[i], epsilon)) in[j] = true;
  out.points.clear();
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) out.points.push_back(static_cast<Index>(i));
  return out;
}

// Restricts a region to the connected piece (in the induced neighbor graph)
// holding the most core points.
inline Region connected_part(const Region& region, const SampledShape& shape) {
  if (region.points.empty()) return region;
  std::vector<int> local(shape.size(), -1);
  for (std::size_t k = 0; k < region.points.size(); ++k) local[region.points[k]] = static_cast<int>(k);
  std::vector<int> comp(region.points.size(), -1);
  int comps = 0;
  for (std::size_t s = 0; s < region.points.size(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = comps;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      for (Index v : shape.graph.neighbors(region.points[k])) {
        const int lv = local[v];
        if (lv >= 0 && comp[lv] < 0) {
          comp[lv] = comps;
          stack.push_back(static_cast<std::size_t>(lv));
        }
      }
    }
    ++comps;
  }
  if (comps == 1) return region;
  std::vector<std::size_t> core_count(comps, 0), size(comps, 0);
  for (std::size_t k = 0; k < region.points.size(); ++k) ++size[comp[k]];
  for (Index i : region.core)
    if (local[i] >= 0) ++core_count[comp[local[i]]];
  int best = 0;
  for (int c = 1; c < comps; ++c)
    if (core_count[c] > core_count[best] || (core_count[c] == core_count[best] && size[c] > size[best])) best = c;
  Region out;
  out.patches = region.patches;
  for (std::size_t k = 0; k < region.points.size(); ++k)
    if (comp[k] == best) out.points.push_back(region.points[k]);
  std::set_intersection(region.core.begin(), region.core.end(), out.points.begin(), out.points.end(),
                        std::back_inserter(out.core));
  return out;
}

// Makes the regions of one hypothesis pairwise disjoint: a point claimed by
// several regions goes to the one with the nearer member patch center (ties:
// lower region), then each region is cut back to a connected piece.
inline void resolve_overlaps(std::vector<Region>& regions, std::span<const Patch> patches, const SampledShape& shape) {
  const std::size_t n = shape.size();
  std::vector<int> owner(n, -1);
  std::vector<bool> contested(n, false);
  for (std::size_t r = 0; r < regions.size(); ++r)
    for (Index i : regions[r].points) {
      if (owner[i] >= 0) contested[i] = true;
      else owner[i] = static_cast<int>(r);
    }
  auto center_dist = [&](std::size_t r, Index i) {
    double best = kInf;
    for (Index p : regions[r].patches)
      if (p < patches.size())
        best = std::min(best, squared_distance(shape.cloud.points[patches[p].center], shape.cloud.points[i]));
    return best;
  };
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!contested[i]) continue;
    any = true;
    double best = kInf;
    int pick = -1;
    for (std::size_t r = 0; r < regions.size(); ++r) {
      if (!std::binary_search(regions[r].points.begin(), regions[r].points.end(), static_cast<Index>(i))) continue;
      const double d = center_dist(r, static_cast<Index>(i));
      if (pick < 0 || d < best) {
        best = d;
        pick = static_cast<int>(r);
      }
    }
    owner[i] = pick;
  }
  if (!any) return;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    auto keep = [&](Index i) { return owner[i] == static_cast<int>(r); };
    IndexList pts, core;
    std::copy_if(regions[r].points.begin(), regions[r].points.end(), std::back_inserter(pts), keep);
    std::copy_if(regions[r].core.begin(), regions[r].core.end(), std::back_inserter(core), keep);
    regions[r].points = std::move(pts);
    regions[r].core = std::move(core);
    regions[r] = connected_part(regions[r], shape);
  }
  std::erase_if(regions, [](const Region& r) { return r.points.empty(); });
}

// Seed for the ICP distance between regions i and j of one hypothesis; growth
// uses the same seeds so its first step reproduces the stored distance.
inline std::uint64_t region_pair_seed(std::uint64_t seed, std::size_t i, std::size_t j) {
  return pair_seed(seed, i, j);
}

// Max pairwise ICP distance over the regions, stopping early once `stop_above`
// is exceeded.
inline double max_region_distance(const std::vector<PointCloud>& clouds, const IcpConfig& icp,
                                  double stop_above = kInf) {
  double worst = 0.0;
  for (std::size_t i = 0; i < clouds.size(); ++i)
    for (std::size_t j = i + 1; j < clouds.size(); ++j) {
      IcpConfig pc = icp;
      pc.seed = region_pair_seed(icp.seed, i, j);
      double d = kInf;
      try {
        d = icp_distance(clouds[i], clouds[j], pc);
      } catch (const Error&) {
        d = kInf;
      }
      worst = std::max(worst, d);
      if (worst > stop_above) return worst;
    }
  return worst;
}

struct FilterStats {
  std::size_t singular = 0, too_many = 0, dissimilar = 0;
};

// Keeps hypotheses with 2..max_regions regions whose max pairwise ICP distance
// is at most delta_sim.
inline std::vector<Hypothesis> filter_hypotheses(std::vector<Hypothesis> candidates, const SampledShape& shape,
                                                 const DetectConfig& cfg, const IcpConfig& icp,
                                                 std::size_t parallelism = 1, FilterStats* stats = nullptr) {
  FilterStats local;
  std::vector<char> keep(candidates.size(), 0);
  std::vector<std::size_t> todo;
  for (std::size_t h = 0; h < candidates.size(); ++h) {
    const std::size_t r = candidates[h].regions.size();
    if (r < 2) ++local.singular;
    else if (r > cfg.max_regions) ++local.too_many;
    else todo.push_back(h);
  }
  parallel_for(todo.size(), parallelism, [&](std::size_t t) {
    Hypothesis& h = candidates[todo[t]];
    std::vector<PointCloud> clouds;
    for (const Region& r : h.regions) clouds.push_back(subset(shape.cloud, r.points));
    h.max_distance = max_region_distance(clouds, icp, cfg.delta_sim);
    keep[todo[t]] = h.max_distance <= cfg.delta_sim;
  });
  std::vector<Hypothesis> out;
  for (std::size_t t : todo) {
    if (keep[t]) out.push_back(std::move(candidates[t]));
    else ++local.dissimilar;
  }
  if (stats) *stats = local;
  return out;
}

struct DetectResult {
  SymmetrySet set;
  Clustering clustering;
  std::vector<Hypothesis> candidates;  // before filtering, for diagnostics
  FilterStats stats;
  double spacing = 0.0;
  double epsilon = 0.0;
  std::vector<std::string> warnings;
};

// Cluster features, split each cluster into contiguous regions, refine, make
// regions disjoint, then filter by ICP distance. features(i) belongs to patches[i].
inline DetectResult detect_symmetries(const SampledShape& shape, std::span<const Patch> patches,
                                      const DistanceMatrix& features, const DetectConfig& cfg, const IcpConfig& icp,
                                      std::size_t parallelism = 1) {
  cfg.validate();
  icp.validate();
  if (features.size() != patches.size()) throw SizeMismatch("feature count differs from patch count");
  DetectResult out;
  if (patches.size() < cfg.min_patch_count)
    out.warnings.push_back("only " + std::to_string(patches.size()) + " patches, fewer than " +
                           std::to_string(cfg.min_patch_count));
  out.clustering = cluster_features(features, cfg);
  const IndexList centers = distinct_centers(patches);
  out.spacing = mean_center_spacing(shape.cloud, centers);
  out.epsilon = cfg.epsilon.value_or(out.spacing / 2.0);
  const double link = cfg.alpha * out.spacing;

  std::vector<std::vector<std::size_t>> members(out.clustering.cluster_count);
  for (std::size_t i = 0; i < patches.size(); ++i)
    if (out.clustering.labels[i] >= 0) members[out.clustering.labels[i]].push_back(i);

  out.candidates.resize(members.size());
  parallel_for(members.size(), parallelism, [&](std::size_t c) {
    Hypothesis& h = out.candidates[c];
    h.cluster_id = static_cast<long>(c);
    h.regions = split_components(members[c], patches, shape, link);
    if (out.epsilon > 0.0)
      for (Region& r : h.regions) r = refine_region(r, shape, out.epsilon);
    for (Region& r : h.regions) r = connected_part(r, shape);
    resolve_overlaps(h.regions, patches, shape);
  });
  out.set.fingerprint = cfg.fingerprint() ^ splitmix64(icp.fingerprint());
  out.set.hypotheses = filter_hypotheses(out.candidates, shape, cfg, icp, parallelism, &out.stats);
  return out;
}

inline DetectResult detect_symmetries(const SampledShape& shape, std::span<const Patch> patches,
                                      const EmbeddingSet& features, const DetectConfig& cfg, const IcpConfig& icp,
                                      std::size_t parallelism = 1) {
  features.validate();
  return detect_symmetries(shape, patches, cosine_distances(features), cfg, icp, parallelism);
}

// Part-level detection: parts i and j are linked when 1 - sim(z_i, z_j) <=
// delta_sym; each linked group of two or more parts is a hypothesis with one
// region per part.
inline SymmetrySet pspsb_detect(std::size_t part_count, const EmbeddingSet& embeddings, double delta_sym) {
  if (part_count < 2) throw TooFewItems("part-level detection needs at least 2 parts");
  if (embeddings.size() != part_count) throw SizeMismatch("one embedding per part expected");
  detail::UnionFind uf(part_count);
  for (std::size_t i = 0; i < part_count; ++i)
    for (std::size_t j = i + 1; j < part_count; ++j)
      if (1.0 - cosine_similarity(embeddings.row(i), embeddings.row(j)) <= delta_sym) uf.unite(i, j);
  std::map<std::size_t, IndexList> groups;
  for (std::size_t i = 0; i < part_count; ++i) groups[uf.find(i)].push_back(static_cast<Index>(i));
  SymmetrySet set;
  set.domain = RegionDomain::parts;
  for (const auto& [root, parts] : groups) {
    if (parts.size() < 2) continue;
    Hypothesis h;
    h.cluster_id = static_cast<long>(set.hypotheses.size());
    h.max_distance = 0.0;
    double worst = 0.0;
    for (std::size_t a = 0; a < parts.size(); ++a) {
      Region r;
      r.patches = {parts[a]};
      h.regions.push_back(r);
      for (std::size_t b = a + 1; b < parts.size(); ++b)
        worst = std::max(worst, 1.0 - cosine_similarity(embeddings.row(parts[a]), embeddings.row(parts[b])));
    }
    h.max_distance = worst;
    set.hypotheses.push_back(std::move(h));
  }
  return set;
}

inline SymmetrySet pspsb_detect(std::span<const PointCloud> parts, const EmbeddingSet& embeddings, double delta_sym) {
  return pspsb_detect(parts.size(), embeddings, delta_sym);
}

// JSON form with sorted keys; +inf distances serialize as null.
inline nlohmann::json to_json(const SymmetrySet& s) {
  nlohmann::json hyps = nlohmann::json::array();
  for (const Hypothesis& h : s.hypotheses) {
    nlohmann::json regions = nlohmann::json::array();
    for (const Region& r : h.regions) regions.push_back({{"patches", r.patches}, {"points", r.points}});
    nlohmann::json jh = {{"cluster", h.cluster_id}, {"regions", regions}};
    jh["max_distance"] = std::isfinite(h.max_distance) ? nlohmann::json(h.max_distance) : nlohmann::json(nullptr);
    hyps.push_back(jh);
  }
  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(s.fingerprint));
  return {{"config_fingerprint", fp},
          {"domain", s.domain == RegionDomain::parts ? "parts" : "points"},
          {"hypotheses", hyps},
          {"shape", s.shape_ref}};
}

inline SymmetrySet symmetry_set_from_json(const nlohmann::json& j) {
  try {
    SymmetrySet s;
    s.shape_ref = j.value("shape", std::string());
    s.fingerprint = std::stoull(j.value("config_fingerprint", std::string("0")), nullptr, 16);
    s.domain = j.value("domain", std::string("points")) == "parts" ? RegionDomain::parts : RegionDomain::points;
    for (const auto& jh : j.at("hypotheses")) {
      Hypothesis h;
      h.cluster_id = jh.value("cluster", -1L);
      h.max_distance = jh.contains("max_distance") && jh["max_distance"].is_number()
                           ? jh["max_distance"].get<double>()
                           : kInf;
      for (const auto& jr : jh.at("regions")) {
        Region r;
        r.points = jr.value("points", IndexList{});
        r.patches = jr.value("patches", IndexList{});
        std::sort(r.points.begin(), r.points.end());
        r.core = r.points;
        h.regions.push_back(std::move(r));
      }
      s.hypotheses.push_back(std::move(h));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad symmetry set JSON: ") + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void write_symmetry_set(const std::filesystem::path& path, const SymmetrySet& s) {
  write_json_file(path, to_json(s));
}

inline SymmetrySet read_symmetry_set(const std::filesystem::path& path) {
  return symmetry_set_from_json(read_json_file(path));
}

// Distinct, deterministic colors from golden-ratio hue steps.
inline Rgb region_color(std::size_t k, double value = 0.9) {
  const double h = std::fmod(0.11 + 0.618033988749895 * static_cast<double>(k), 1.0) * 6.0;
  const double s = 0.75, v = value;
  const int i = static_cast<int>(h);
  const double f = h - i, p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = v, g = t, b = p;
  switch (i % 6) {
    case 1: r = q, g = v, b = p; break;
    case 2: r = p, g = v, b = t; break;
    case 3: r = p, g = q, b = v; break;
    case 4: r = t, g = p, b = v; break;
    case 5: r = v, g = p, b = q; break;
    default: break;
  }
  auto u8 = [](double x) { return static_cast<unsigned char>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)); };
  return {u8(r), u8(g), u8(b)};
}

// One PLY per hypothesis, named hypothesis_<k>.ply, regions colored, rest gray.
inline void write_hypothesis_plys(const std::filesystem::path& dir, const SymmetrySet& s, const PointCloud& cloud) {
  std::filesystem::create_directories(dir);
  for (std::size_t h = 0; h < s.hypotheses.size(); ++h) {
    std::vector<Rgb> colors(cloud.size(), Rgb{180, 180, 180});
    for (std::size_t r = 0; r < s.hypotheses[h].regions.size(); ++r)
      for (Index i : s.hypotheses[h].regions[r].points)
        if (i < colors.size()) colors[i] = region_color(r);
    write_colored_ply(dir / ("hypothesis_" + std::to_string(h) + ".ply"), cloud.points, colors);
  }
}

}  // namespace symdetect
