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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "symdetect/detect.hpp"

using namespace symdetect;

namespace {

using fixtures::basis;
using fixtures::embeddings_from;
using fixtures::temp_path;

// Thin rod along x, closed at both ends.
SampledShape rod_shape() {
  return make_sampled_shape(sample_surface(fixtures::box({0, 0, 0}, {10, 0.1, 0.1}), 8000, 3), 0, 0, 8);
}

Index nearest_point(const SampledShape& s, const Vec3& q) { return s.index->nearest(q).index; }

struct TableScene {
  fixtures::TableFixture table;
  SampledShape shape;
  std::vector<Patch> patches;
  // patch -> (leg, local class), leg = -1 for top patches
  std::vector<std::pair<int, int>> tags;
};

// Three patch positions repeated on every leg, plus eight patches on the top.
TableScene table_scene() {
  TableScene sc;
  sc.table = fixtures::make_table(1 << 13, 5);
  sc.shape = make_sampled_shape(sc.table.cloud, 0, 5, 8);
  const std::vector<Vec3> local{{0.04, 0.0, 0.06}, {0.0, -0.04, 0.3}, {-0.04, 0.01, 0.45}};
  const auto& leg0 = sc.table.legs[0];
  for (std::size_t c = 0; c < local.size(); ++c) {
    // Same leg-local point on every leg, so patches are exact translates.
    Index best = leg0[0];
    for (Index i : leg0)
      if ((sc.shape.cloud[i] - sc.table.leg_offsets[0] - local[c]).norm() <
          (sc.shape.cloud[best] - sc.table.leg_offsets[0] - local[c]).norm())
        best = i;
    for (int leg = 0; leg < 4; ++leg) {
      const Index center = sc.table.legs[leg][best - leg0[0]];
      sc.patches.push_back(extract_patch(sc.shape, center, PatchSize::points(96)));
      sc.tags.emplace_back(leg, static_cast<int>(c));
    }
  }
  for (int k = 0; k < 8; ++k) {
    const Vec3 q(-0.45 + 0.13 * k, 0.1 * std::sin(k), 0.74);
    sc.patches.push_back(extract_patch(sc.shape, nearest_point(sc.shape, q), PatchSize::points(96)));
    sc.tags.emplace_back(-1, k);
  }
  return sc;
}

EmbeddingSet table_embeddings(const TableScene& sc) {
  std::vector<std::vector<double>> rows;
  for (const auto& [leg, c] : sc.tags) rows.push_back(basis(16, leg < 0 ? 3 + c : c));
  return embeddings_from(rows);
}

int leg_of(const TableScene& sc, Index i) {
  for (int leg = 0; leg < 4; ++leg)
    if (i >= sc.table.legs[leg].front() && i <= sc.table.legs[leg].back()) return leg;
  return -1;
}

}  // namespace

TEST(Cosine, HandValues) {
  const std::vector<double> x{1, 0}, y{0, 1}, d{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  EXPECT_DOUBLE_EQ(cosine_similarity(x, x), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(x, y), 0.0);
  EXPECT_NEAR(cosine_similarity(x, d), std::sqrt(2.0) / 2, 1e-15);
  EXPECT_THROW(cosine_similarity(x, std::vector<double>{0, 0}), ZeroVector);
  EXPECT_THROW(cosine_similarity(x, std::vector<double>{1, 0, 0}), SizeMismatch);
  const EmbeddingSet e = embeddings_from({{1, 0}, {1, 1}, {1, 0}, {-1, 0}});
  const DistanceMatrix m = cosine_distances(e);
  EXPECT_EQ(m.kind(), DistanceKind::cosine);
  EXPECT_EQ(m(0, 2), 0.0);
  EXPECT_NEAR(m(0, 1), 1 - std::sqrt(2.0) / 2, 1e-15);
  EXPECT_DOUBLE_EQ(m(0, 3), 2.0);
}

TEST(Embeddings, SymeRoundTripAndValidation) {
  Rng rng(1);
  std::vector<std::vector<double>> rows(7, std::vector<double>(32));
  for (auto& r : rows)
    for (double& v : r) v = rng.normal();
  EmbeddingSet e = embeddings_from(rows);
  e.patch_ids = {3, 1, 4, 1, 5, 9, 2};
  write_syme(temp_path("e.syme"), e);
  const EmbeddingSet back = read_syme(temp_path("e.syme"));
  ASSERT_EQ(back.size(), 7u);
  EXPECT_EQ(back.dim, 32u);
  EXPECT_EQ(back.patch_ids, e.patch_ids);
  for (std::size_t i = 0; i < e.values.size(); ++i) EXPECT_EQ(back.values[i], static_cast<float>(e.values[i]));
  EXPECT_EQ(std::filesystem::file_size(temp_path("e.syme")), 4u + 4 + 8 + 8 + 7 * 32 * 4 + 7 * 8);
  e.values[0] *= 2;
  EXPECT_THROW(e.validate(), InputError);
  write_syme(temp_path("bad.syme"), e);
  EXPECT_THROW(read_syme(temp_path("bad.syme")), InputError);
}

TEST(ClusterFeatures, ThreeTightBlobs) {
  Rng rng(2);
  std::vector<std::vector<double>> rows;
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < 50; ++i) {
      std::vector<double> v = basis(8, static_cast<std::size_t>(2 * b));
      for (double& x : v) x += 0.01 * rng.normal();
      rows.push_back(v);
    }
  const EmbeddingSet e = embeddings_from(rows);
  // Intra-blob cosine distances stay well below a tenth of inter-blob ones.
  const DistanceMatrix m = cosine_distances(e);
  double intra = 0, inter = kInf;
  for (std::size_t i = 0; i < 150; ++i)
    for (std::size_t j = i + 1; j < 150; ++j) (i / 50 == j / 50 ? intra = std::max(intra, m(i, j)) : inter = std::min(inter, m(i, j)));
  ASSERT_LT(10 * intra, inter);
  DetectConfig cfg;
  const Clustering c = cluster_features(e, cfg);
  ASSERT_EQ(c.cluster_count, 3u);
  for (std::size_t i = 0; i < 150; ++i) EXPECT_EQ(c.labels[i], static_cast<int>(i / 50));
}

TEST(ClusterFeatures, IdenticalVectors) {
  const EmbeddingSet e = embeddings_from(std::vector<std::vector<double>>(12, {0.3, 0.4, 0.5}));
  const Clustering c = cluster_features(e, DetectConfig{});
  EXPECT_EQ(c.cluster_count, 1u);
  for (int l : c.labels) EXPECT_EQ(l, 0);
}

TEST(ClusterFeatures, UniformVectorsAreMostlyNoise) {
  Rng rng(3);
  std::vector<std::vector<double>> rows(100, std::vector<double>(32));
  for (auto& r : rows)
    for (double& v : r) v = rng.normal();
  DetectConfig cfg;
  cfg.cluster.min_cluster_size = 25;
  const Clustering c = cluster_features(embeddings_from(rows), cfg);
  const auto noise = std::count(c.labels.begin(), c.labels.end(), -1);
  // Frozen from the first run: 100 of 100 points were noise.
  EXPECT_GE(noise, 100);
  cfg.cluster.min_cluster_size = 200;
  EXPECT_THROW(cluster_features(embeddings_from(rows), cfg), TooFewItems);
}

TEST(SplitComponents, RodEndsAndOverlap) {
  const SampledShape rod = rod_shape();
  std::vector<Patch> patches{extract_patch(rod, nearest_point(rod, {0.2, 0.05, 0.1}), PatchSize::points(100)),
                             extract_patch(rod, nearest_point(rod, {9.8, 0.05, 0.1}), PatchSize::points(100)),
                             extract_patch(rod, nearest_point(rod, {0.25, 0.05, 0.1}), PatchSize::points(100))};
  const double spacing = mean_center_spacing(rod.cloud, distinct_centers(patches));
  const std::vector<std::size_t> ends{0, 1};
  const auto two = split_components(ends, patches, rod, 2.0, 0.1);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].patches, IndexList{0});
  EXPECT_EQ(two[1].patches, IndexList{1});
  const std::vector<std::size_t> near{0, 2};
  const auto one = split_components(near, patches, rod, 2.0, spacing);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].patches, (IndexList{0, 2}));
  std::set<Index> want(patches[0].point_indices.begin(), patches[0].point_indices.end());
  want.insert(patches[2].point_indices.begin(), patches[2].point_indices.end());
  EXPECT_EQ(std::set<Index>(one[0].points.begin(), one[0].points.end()), want);
  EXPECT_TRUE(std::is_sorted(one[0].points.begin(), one[0].points.end()));
  EXPECT_EQ(one[0].core, one[0].points);
}

TEST(SplitComponents, TableLegs) {
  const TableScene sc = table_scene();
  // Every leg patch in one member list: components must be the four legs.
  std::vector<std::size_t> members;
  for (std::size_t p = 0; p < 12; ++p) members.push_back(p);
  const double spacing = mean_center_spacing(sc.shape.cloud, distinct_centers(sc.patches));
  const auto regions = split_components(members, sc.patches, sc.shape, 2.0, spacing);
  ASSERT_EQ(regions.size(), 4u);
  std::set<Index> seen;
  for (const Region& r : regions) {
    ASSERT_EQ(r.patches.size(), 3u);
    const int leg = sc.tags[r.patches[0]].first;
    for (Index p : r.patches) {
      EXPECT_EQ(sc.tags[p].first, leg);
      EXPECT_TRUE(seen.insert(p).second);
    }
  }
  EXPECT_EQ(seen.size(), members.size());
}

TEST(RefineRegion, LimitsAndIdempotence) {
  const TableScene sc = table_scene();
  Region r;
  r.points = sc.patches[0].point_indices;
  std::sort(r.points.begin(), r.points.end());
  r.core = r.points;
  EXPECT_EQ(refine_region(r, sc.shape, 1e-9).points, r.points);
  EXPECT_EQ(refine_region(r, sc.shape, 10.0).points.size(), sc.shape.size());
  const Region once = refine_region(r, sc.shape, 0.05);
  EXPECT_GT(once.points.size(), r.points.size());
  EXPECT_TRUE(std::includes(once.points.begin(), once.points.end(), r.points.begin(), r.points.end()));
  const Region twice = refine_region(once, sc.shape, 0.05);
  EXPECT_EQ(twice.points, once.points);
  EXPECT_EQ(twice.core, r.core);
  EXPECT_THROW(refine_region(r, sc.shape, 0.0), InputError);
}

TEST(ConnectedPart, KeepsPieceWithMostCore) {
  const SampledShape rod = rod_shape();
  Region r;
  const Patch a = extract_patch(rod, nearest_point(rod, {0.5, 0.05, 0.1}), PatchSize::points(50));
  const Patch b = extract_patch(rod, nearest_point(rod, {5.0, 0.05, 0.1}), PatchSize::points(200));
  r.points = detail::sorted_union(IndexList(a.point_indices), IndexList(b.point_indices));
  IndexList sa = a.point_indices, sb = b.point_indices;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  r.points = detail::sorted_union(sa, sb);
  r.core = sa;
  const Region kept = connected_part(r, rod);
  EXPECT_EQ(kept.points, sa);
  r.core = r.points;
  EXPECT_EQ(connected_part(r, rod).points, sb);
}

TEST(ResolveOverlaps, NearerCenterWins) {
  const SampledShape rod = rod_shape();
  std::vector<Patch> patches{extract_patch(rod, nearest_point(rod, {1.0, 0.05, 0.1}), PatchSize::points(300)),
                             extract_patch(rod, nearest_point(rod, {1.25, 0.05, 0.1}), PatchSize::points(300))};
  std::vector<Region> regions(2);
  for (int k = 0; k < 2; ++k) {
    regions[k].points = patches[k].point_indices;
    std::sort(regions[k].points.begin(), regions[k].points.end());
    regions[k].core = regions[k].points;
    regions[k].patches = {static_cast<Index>(k)};
  }
  std::vector<Index> shared;
  std::set_intersection(regions[0].points.begin(), regions[0].points.end(), regions[1].points.begin(),
                        regions[1].points.end(), std::back_inserter(shared));
  ASSERT_FALSE(shared.empty());
  resolve_overlaps(regions, patches, rod);
  ASSERT_EQ(regions.size(), 2u);
  for (Index i : shared) {
    const double d0 = squared_distance(rod.cloud[i], rod.cloud[patches[0].center]);
    const double d1 = squared_distance(rod.cloud[i], rod.cloud[patches[1].center]);
    const int want = d1 < d0 ? 1 : 0;
    EXPECT_TRUE(std::binary_search(regions[want].points.begin(), regions[want].points.end(), i));
    EXPECT_FALSE(std::binary_search(regions[1 - want].points.begin(), regions[1 - want].points.end(), i));
  }
}

TEST(FilterHypotheses, Rules) {
  // Two congruent pieces: the leg bottoms of the table.
  const TableScene sc = table_scene();
  auto region_of = [&](std::size_t p) {
    Region r;
    r.points = sc.patches[p].point_indices;
    std::sort(r.points.begin(), r.points.end());
    r.core = r.points;
    r.patches = {static_cast<Index>(p)};
    return r;
  };
  DetectConfig cfg;
  IcpConfig icp;
  icp.seed = 4;
  icp.restarts = 10;
  Hypothesis same{{region_of(0), region_of(1)}, kInf, 0};
  Hypothesis single{{region_of(0)}, kInf, 1};
  Region top;
  top.points = sc.table.top;
  top.core = top.points;
  Hypothesis mixed{{region_of(0), top}, kInf, 2};
  Hypothesis crowd;
  for (int k = 0; k < 31; ++k) crowd.regions.push_back(region_of(0));
  crowd.cluster_id = 3;
  FilterStats stats;
  const auto kept = filter_hypotheses({same, single, mixed, crowd}, sc.shape, cfg, icp, 1, &stats);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].cluster_id, 0);
  EXPECT_LE(kept[0].max_distance, 1e-3);
  EXPECT_EQ(stats.singular, 1u);
  EXPECT_EQ(stats.too_many, 1u);
  EXPECT_EQ(stats.dissimilar, 1u);
  crowd.regions.resize(30);
  EXPECT_EQ(filter_hypotheses({crowd}, sc.shape, cfg, icp).size(), 1u);
}

TEST(DetectSymmetries, TableWithExactFeatures) {
  const TableScene sc = table_scene();
  DetectConfig cfg;
  IcpConfig icp;
  icp.seed = 7;
  const DetectResult res = detect_symmetries(sc.shape, sc.patches, table_embeddings(sc), cfg, icp);
  ASSERT_EQ(res.warnings.size(), 1u);  // 20 patches, fewer than the usual 1024
  EXPECT_EQ(res.clustering.cluster_count, 3u);
  ASSERT_EQ(res.set.hypotheses.size(), 3u);
  for (const Hypothesis& h : res.set.hypotheses) {
    ASSERT_EQ(h.regions.size(), 4u);
    EXPECT_LE(h.max_distance, cfg.delta_sim);
    std::set<int> legs;
    for (const Region& r : h.regions) {
      const int leg = leg_of(sc, r.points.front());
      legs.insert(leg);
      for (Index i : r.points) EXPECT_EQ(leg_of(sc, i), leg);
      EXPECT_GT(r.points.size(), 96u);
    }
    EXPECT_EQ(legs.size(), 4u);
  }
  // Same inputs, any thread count: identical output.
  const DetectResult again = detect_symmetries(sc.shape, sc.patches, table_embeddings(sc), cfg, icp, 4);
  EXPECT_EQ(to_json(again.set), to_json(res.set));
}

TEST(DetectSymmetries, SphereDoesNotCrash) {
  const SampledShape s = make_sampled_shape(sample_surface(fixtures::uv_sphere(1, 24, 48), 4096, 1), 24, 1, 8);
  std::vector<Patch> patches;
  for (Index c : s.centers) patches.push_back(extract_patch(s, c, PatchSize::points(128)));
  const EmbeddingSet e = embeddings_from(std::vector<std::vector<double>>(patches.size(), {1, 0, 0}));
  DetectConfig cfg;
  IcpConfig icp;
  icp.restarts = 4;
  const DetectResult res = detect_symmetries(s, patches, e, cfg, icp);
  EXPECT_EQ(res.clustering.cluster_count, 1u);
  for (const Hypothesis& h : res.set.hypotheses) EXPECT_GE(h.regions.size(), 2u);
  if (!res.set.hypotheses.empty()) {
    ASSERT_EQ(res.candidates.size(), 1u);
    EXPECT_EQ(res.candidates[0].regions.size(), res.set.hypotheses[0].regions.size());
  }
}

TEST(DetectSymmetries, RandomBlobHasNoSymmetry) {
  // Sphere with random bumps of varied size: no two patches are congruent.
  Mesh blob = fixtures::uv_sphere(1, 48, 96);
  Rng rng(11);
  std::vector<std::pair<Vec3, double>> bumps;
  for (int k = 0; k < 40; ++k) {
    Vec3 d(rng.normal(), rng.normal(), rng.normal());
    bumps.emplace_back(d.normalized(), 0.05 + 0.25 * rng.uniform());
  }
  for (Vec3& v : blob.vertices) {
    double r = 1;
    for (const auto& [dir, width] : bumps) r += 0.6 * width * std::exp(-(v.normalized() - dir).squaredNorm() / (width * width));
    v *= r;
  }
  const SampledShape s = make_sampled_shape(sample_surface(blob, 4096, 2), 24, 2, 8);
  std::vector<Patch> patches;
  for (Index c : s.centers) patches.push_back(extract_patch(s, c, PatchSize::points(256)));
  std::vector<PointCloud> clouds;
  for (const Patch& p : patches) clouds.push_back(subset(s.cloud, p.point_indices));
  IcpConfig icp;
  icp.seed = 3;
  icp.restarts = 10;
  const DistanceMatrix m = distance_matrix(clouds, icp).matrix;
  DetectConfig cfg;
  const DetectResult res = detect_symmetries(s, patches, m, cfg, icp);
  EXPECT_TRUE(res.set.hypotheses.empty());
}

TEST(DetectSymmetries, InputChecks) {
  const TableScene sc = table_scene();
  EmbeddingSet e = table_embeddings(sc);
  e.patch_ids.pop_back();
  e.values.resize(e.patch_ids.size() * e.dim);
  EXPECT_THROW(detect_symmetries(sc.shape, sc.patches, e, DetectConfig{}, IcpConfig{}), SizeMismatch);
  DetectConfig bad;
  bad.delta_sim = 0;
  EXPECT_THROW(detect_symmetries(sc.shape, sc.patches, table_embeddings(sc), bad, IcpConfig{}), InputError);
}

TEST(PspsbDetect, PartLinks) {
  const EmbeddingSet pair = embeddings_from({{1, 0, 0}, {1, 0.001, 0}});
  const SymmetrySet one = pspsb_detect(2, pair, 0.025);
  ASSERT_EQ(one.hypotheses.size(), 1u);
  EXPECT_EQ(one.domain, RegionDomain::parts);
  ASSERT_EQ(one.hypotheses[0].regions.size(), 2u);
  EXPECT_EQ(one.hypotheses[0].regions[1].patches, IndexList{1});
  EXPECT_TRUE(pspsb_detect(2, embeddings_from({{1, 0, 0}, {1, 0.3, 0}}), 0.0).hypotheses.empty());
  EXPECT_THROW(pspsb_detect(1, embeddings_from({{1, 0}}), 0.025), TooFewItems);
  EXPECT_THROW(pspsb_detect(3, pair, 0.025), SizeMismatch);
}

TEST(PspsbDetect, MatchesComponentOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng.below(6);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      // Few base directions so that links occur.
      std::vector<double> v = basis(4, rng.below(3));
      for (double& x : v) x += 0.05 * rng.normal();
      rows.push_back(v);
    }
    const EmbeddingSet e = embeddings_from(rows);
    const double delta = 0.01 * static_cast<double>(rng.below(4));
    // Oracle: reachability by repeated relaxation over the link relation.
    std::vector<std::size_t> comp(n);
    std::iota(comp.begin(), comp.end(), std::size_t{0});
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (1 - cosine_similarity(e.row(i), e.row(j)) <= delta && comp[j] < comp[i]) {
            comp[i] = comp[j];
            changed = true;
          }
    }
    std::map<std::size_t, std::set<Index>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[comp[i]].insert(static_cast<Index>(i));
    std::set<std::set<Index>> want;
    for (const auto& [c, g] : groups)
      if (g.size() >= 2) want.insert(g);
    std::set<std::set<Index>> got;
    for (const Hypothesis& h : pspsb_detect(n, e, delta).hypotheses) {
      std::set<Index> g;
      for (const Region& r : h.regions) g.insert(r.patches.at(0));
      got.insert(g);
    }
    EXPECT_EQ(got, want) << "trial " << trial;
  }
  // Two identical pairs.
  const SymmetrySet two = pspsb_detect(4, embeddings_from({{1, 0}, {0, 1}, {1, 0}, {0, 1}}), 0.025);
  ASSERT_EQ(two.hypotheses.size(), 2u);
  EXPECT_EQ(two.hypotheses[0].regions[0].patches, IndexList{0});
  EXPECT_EQ(two.hypotheses[0].regions[1].patches, IndexList{2});
  EXPECT_EQ(two.hypotheses[1].regions[1].patches, IndexList{3});
}

TEST(SymmetrySetJson, RoundTripAndShape) {
  SymmetrySet s;
  s.shape_ref = "table.syms";
  s.fingerprint = 0x00ab00cd00ef0012ull;
  Hypothesis h;
  h.cluster_id = 4;
  h.max_distance = 0.00125;
  h.regions = {Region{{1, 2, 3}, {1, 2, 3}, {0}}, Region{{7, 8}, {7, 8}, {1, 5}}};
  s.hypotheses.push_back(h);
  h.max_distance = kInf;
  h.cluster_id = 5;
  s.hypotheses.push_back(h);
  const nlohmann::json j = to_json(s);
  EXPECT_EQ(j["config_fingerprint"], "00ab00cd00ef0012");
  EXPECT_EQ(j["domain"], "points");
  EXPECT_TRUE(j["hypotheses"][1]["max_distance"].is_null());
  EXPECT_EQ(j["hypotheses"][0]["regions"][1]["points"], nlohmann::json::array({7, 8}));
  write_symmetry_set(temp_path("s.json"), s);
  const SymmetrySet back = read_symmetry_set(temp_path("s.json"));
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.fingerprint, s.fingerprint);
  EXPECT_EQ(back.hypotheses[1].max_distance, kInf);
  EXPECT_EQ(back.hypotheses[0].regions[1].patches, (IndexList{1, 5}));
  const std::string dumped = j.dump();
  EXPECT_LT(dumped.find("config_fingerprint"), dumped.find("hypotheses"));
  std::ofstream(temp_path("broken.json")) << "{\"hypotheses\": 3}";
  EXPECT_THROW(read_symmetry_set(temp_path("broken.json")), ParseError);
}

TEST(SymmetrySetPly, OneFilePerHypothesis) {
  const PointCloud cloud = fixtures::asymmetric_cloud(10, 1);
  SymmetrySet s;
  s.hypotheses.resize(2);
  s.hypotheses[0].regions = {Region{{0, 1}, {}, {}}, Region{{2}, {}, {}}};
  s.hypotheses[1].regions = {Region{{5}, {}, {}}, Region{{6}, {}, {}}};
  const auto dir = temp_path("plys");
  std::filesystem::remove_all(dir);
  write_hypothesis_plys(dir, s, cloud);
  EXPECT_TRUE(std::filesystem::exists(dir / "hypothesis_0.ply"));
  EXPECT_TRUE(std::filesystem::exists(dir / "hypothesis_1.ply"));
  EXPECT_FALSE(std::filesystem::exists(dir / "hypothesis_2.ply"));
  const PointCloud back = load_vertices(dir / "hypothesis_0.ply");
  EXPECT_EQ(back.size(), 10u);
  const Rgb c0 = region_color(0), c1 = region_color(1);
  EXPECT_TRUE(c0.r != c1.r || c0.g != c1.g || c0.b != c1.b);
}
