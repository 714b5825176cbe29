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
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "symdetect/core.hpp"
#include "symdetect/detect.hpp"
#include "symdetect/distance_matrix.hpp"
#include "symdetect/icp.hpp"
#include "symdetect/mesh_io.hpp"
#include "symdetect/patches.hpp"
#include "symdetect/sampling.hpp"
#include "symdetect/shape.hpp"

namespace symdetect {

inline constexpr std::size_t kPspsbEvalPoints = std::size_t{1} << 12;
inline constexpr std::size_t kPsbEvalPoints = std::size_t{1} << 16;
inline constexpr std::size_t kMaxPspsbParts = 30;
inline constexpr double kSymclThreshold = 0.025;

// Parts i and j are symmetric when matrix(i, j) <= delta_sym; linked groups of
// two or more parts become hypotheses with one region per part.
inline SymmetrySet ground_truth_from_matrix(std::size_t part_count, const DistanceMatrix& matrix, double delta_sym) {
  if (matrix.kind() != DistanceKind::icp) throw InputError("ground truth needs an ICP distance matrix");
  if (matrix.size() != part_count) throw SizeMismatch("matrix size differs from part count");
  detail::UnionFind uf(part_count);
  for (std::size_t i = 0; i < part_count; ++i)
    for (std::size_t j = i + 1; j < part_count; ++j)
      if (matrix(i, j) <= delta_sym) uf.unite(i, j);
  std::map<std::size_t, IndexList> groups;
  for (std::size_t i = 0; i < part_count; ++i) groups[uf.find(i)].push_back(static_cast<Index>(i));
  SymmetrySet set;
  set.domain = RegionDomain::parts;
  for (const auto& [root, parts] : groups) {
    if (parts.size() < 2) continue;
    Hypothesis h;
    h.cluster_id = static_cast<long>(set.hypotheses.size());
    h.max_distance = 0.0;
    for (std::size_t a = 0; a < parts.size(); ++a) {
      Region r;
      r.patches = {parts[a]};
      h.regions.push_back(r);
      for (std::size_t b = a + 1; b < parts.size(); ++b) h.max_distance = std::max(h.max_distance, matrix(parts[a], parts[b]));
    }
    set.hypotheses.push_back(std::move(h));
  }
  return set;
}

inline SymmetrySet ground_truth_from_matrix(std::span<const PointCloud> parts, const DistanceMatrix& matrix,
                                            double delta_sym) {
  return ground_truth_from_matrix(parts.size(), matrix, delta_sym);
}

// Mean over hypotheses of their stored max pairwise distance.
inline double metric_icp(const SymmetrySet& s) {
  if (s.hypotheses.empty()) throw EmptySet("metric_icp of an empty set");
  double sum = 0.0;
  for (const Hypothesis& h : s.hypotheses) sum += h.max_distance;
  return sum / static_cast<double>(s.hypotheses.size());
}

// Recomputes each hypothesis's max pairwise ICP distance from region clouds,
// then takes the mean.
inline double metric_icp(SymmetrySet& s, const std::function<PointCloud(const Region&)>& cloud_of,
                         const IcpConfig& icp) {
  if (s.hypotheses.empty()) throw EmptySet("metric_icp of an empty set");
  for (Hypothesis& h : s.hypotheses) {
    std::vector<PointCloud> clouds;
    for (const Region& r : h.regions) clouds.push_back(cloud_of(r));
    h.max_distance = max_region_distance(clouds, icp);
  }
  return metric_icp(s);
}

// One inlier mask per cluster over a common set of evaluation points.
using ClusterMasks = std::vector<std::vector<char>>;

inline double mask_iou(const std::vector<char>& a, const std::vector<char>& b) {
  if (a.size() != b.size()) throw SizeMismatch("masks over different point sets");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Mean over predicted clusters of the best IoU against any ground-truth cluster.
inline double metric_iou(const ClusterMasks& pred, const ClusterMasks& gt) {
  if (pred.empty() || gt.empty()) throw EmptySet("metric_iou needs non-empty sets");
  double sum = 0.0;
  for (const auto& p : pred) {
    double best = 0.0;
    for (const auto& g : gt) best = std::max(best, mask_iou(p, g));
    sum += best;
  }
  return sum / static_cast<double>(pred.size());
}

// Each prediction matches its highest-IoU ground-truth cluster (ties: lower
// index); coverage is the fraction of ground-truth clusters matched at least once.
inline double metric_cov(const ClusterMasks& pred, const ClusterMasks& gt) {
  if (pred.empty() || gt.empty()) throw EmptySet("metric_cov needs non-empty sets");
  std::set<std::size_t> matched;
  for (const auto& p : pred) {
    std::size_t best = 0;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      const double v = mask_iou(p, gt[g]);
      if (v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    matched.insert(best);
  }
  return static_cast<double>(matched.size()) / static_cast<double>(gt.size());
}

// Evaluation points with the part each came from and, for point-level
// predictions, the nearest shape point within the labeling radius.
struct EvalCloud {
  PointCloud cloud;
  IndexList part;
  IndexList shape_point;  // kNone when no shape point is close enough
  static constexpr Index kNone = 0xffffffffu;
};

// Samples `count` points over the union of part meshes, labeled by part.
inline EvalCloud sample_eval_cloud(std::span<const Mesh> parts, std::size_t count, std::uint64_t seed) {
  Mesh all;
  IndexList face_part;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto base = static_cast<Index>(all.vertices.size());
    all.vertices.insert(all.vertices.end(), parts[k].vertices.begin(), parts[k].vertices.end());
    for (Face f : parts[k].faces) {
      all.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
      face_part.push_back(static_cast<Index>(k));
    }
  }
  EvalCloud e;
  e.cloud = sample_surface(all, count, seed);
  for (Index f : e.cloud.source_face) e.part.push_back(face_part[f]);
  return e;
}

inline void label_shape_points(EvalCloud& e, const SampledShape& shape, double radius) {
  e.shape_point.assign(e.cloud.size(), EvalCloud::kNone);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < e.cloud.size(); ++i) {
    const Neighbor nb = shape.index->nearest(e.cloud.points[i]);
    if (nb.sq_dist <= r2) e.shape_point[i] = nb.index;
  }
}

inline ClusterMasks cluster_masks(const SymmetrySet& s, const EvalCloud& e, std::size_t shape_size = 0) {
  ClusterMasks masks;
  for (const Hypothesis& h : s.hypotheses) {
    std::vector<char> m(e.cloud.size(), 0);
    if (s.domain == RegionDomain::parts) {
      std::set<Index> parts;
      for (const Region& r : h.regions) parts.insert(r.patches.begin(), r.patches.end());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = parts.count(e.part[i]) > 0;
    } else {
      if (e.shape_point.size() != e.cloud.size()) throw InputError("evaluation cloud lacks shape labels");
      std::vector<char> in(shape_size, 0);
      for (const Region& r : h.regions)
        for (Index p : r.points)
          if (p < in.size()) in[p] = 1;
      for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = e.shape_point[i] != EvalCloud::kNone && e.shape_point[i] < in.size() && in[e.shape_point[i]];
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

// annotation.json beside a shape's matrix.
struct Annotation {
  double delta_sym = 0.0;
  std::string matrix = "matrix.symd";
  std::uint64_t version = 0;
  std::string category;
};

inline nlohmann::json threshold_to_json(double t) {
  return std::isinf(t) ? nlohmann::json("inf") : nlohmann::json(t);
}

// Accepts a number or the string "inf"; nullopt for anything else.
inline std::optional<double> threshold_from_json(const nlohmann::json& j) {
  double t = 0.0;
  if (j.is_number()) t = j.get<double>();
  else if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "Infinity")) t = kInf;
  else return std::nullopt;
  if (std::isnan(t) || t < 0.0) return std::nullopt;
  return t;
}

inline Annotation read_annotation(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  Annotation a;
  const auto t = j.contains("delta_sym") ? threshold_from_json(j["delta_sym"]) : std::nullopt;
  if (!t) throw ParseError(path.string() + ": missing or invalid delta_sym");
  a.delta_sym = *t;
  a.matrix = j.value("matrix", a.matrix);
  a.version = j.value("version", std::uint64_t{0});
  a.category = j.value("category", std::string());
  return a;
}

inline void write_annotation(const std::filesystem::path& path, const Annotation& a) {
  nlohmann::json j = {{"delta_sym", threshold_to_json(a.delta_sym)}, {"matrix", a.matrix}, {"version", a.version}};
  if (!a.category.empty()) j["category"] = a.category;
  const auto tmp = path.string() + ".tmp";
  write_json_file(tmp, j);
  std::filesystem::rename(tmp, path);
}

// part_0.ply, part_1.ply, ... in numeric order.
inline std::vector<std::filesystem::path> list_parts(const std::filesystem::path& shape_dir) {
  std::vector<std::pair<long, std::filesystem::path>> found;
  const auto dir = shape_dir / "parts";
  if (!std::filesystem::is_directory(dir)) return {};
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("part_", 0) != 0 || entry.path().extension() != ".ply") continue;
    const std::string num = name.substr(5, name.size() - 9);
    long k = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), k);
    if (ec != std::errc() || ptr != num.data() + num.size()) continue;
    found.emplace_back(k, entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<std::filesystem::path> out;
  for (auto& [k, p] : found) out.push_back(p);
  return out;
}

inline std::vector<std::string> list_shapes(const std::filesystem::path& dataset) {
  if (!std::filesystem::is_directory(dataset)) throw InputError("not a directory: " + dataset.string());
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dataset))
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

enum class BenchMode { pspsb, psb };

struct BenchConfig {
  BenchMode mode = BenchMode::psb;
  DetectConfig detect{};
  IcpConfig icp{};
  std::size_t points = kDefaultPointCount;
  std::size_t centers = kDefaultCenterCount;
  std::size_t neighbor_k = kDefaultNeighborK;
  std::vector<std::size_t> patch_sizes{512, 1024, 2048, 4096, 8192};
  std::vector<std::size_t> patch_counts{128, 64, 32, 16, 8};
  PatchMetric patch_metric = PatchMetric::geodesic;
  std::size_t eval_points = 0;  // 0: 2^12 for pspsb, 2^16 for psb
  std::size_t part_cloud_points = 2048;
  double delta_sym = kSymclThreshold;
  std::size_t max_parts = kMaxPspsbParts;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
};

struct ShapeRow {
  std::string id;
  std::string category;
  double icp = std::numeric_limits<double>::quiet_NaN();
  double iou = std::numeric_limits<double>::quiet_NaN();
  double cov = std::numeric_limits<double>::quiet_NaN();
  std::size_t predicted = 0;
  std::size_t ground_truth = 0;
  bool skipped = false;
  std::string reason;
};

struct Aggregate {
  double icp = std::numeric_limits<double>::quiet_NaN();
  double iou = std::numeric_limits<double>::quiet_NaN();
  double cov = std::numeric_limits<double>::quiet_NaN();
  std::size_t models = 0;     // shapes with at least one predicted symmetry
  std::size_t evaluated = 0;  // shapes not skipped
};

struct BenchmarkReport {
  BenchMode mode = BenchMode::psb;
  std::vector<ShapeRow> rows;
  Aggregate micro;                             // over all shapes
  std::map<std::string, Aggregate> categories;  // per category
  Aggregate macro;                             // mean of category aggregates
};

namespace detail {

inline double nan_mean(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      s += x;
      ++n;
    }
  return n ? s / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

inline Aggregate aggregate(const std::vector<const ShapeRow*>& rows) {
  Aggregate a;
  std::vector<double> icp, iou, cov;
  for (const ShapeRow* r : rows) {
    if (r->skipped) continue;
    ++a.evaluated;
    if (r->predicted == 0) continue;
    ++a.models;
    icp.push_back(r->icp);
    iou.push_back(r->iou);
    cov.push_back(r->cov);
  }
  a.icp = nan_mean(icp);
  a.iou = nan_mean(iou);
  a.cov = nan_mean(cov);
  return a;
}

inline std::uint64_t shape_seed(std::uint64_t seed, const std::string& id) {
  return derive_seed(seed, Fnv1a().add(id).value());
}

inline void evaluate_shape(const std::filesystem::path& dir, const BenchConfig& cfg, ShapeRow& row) {
  const auto part_paths = list_parts(dir);
  if (!std::filesystem::exists(dir / "annotation.json")) throw InputError("no annotation.json");
  const Annotation ann = read_annotation(dir / "annotation.json");
  row.category = ann.category;
  if (part_paths.size() < 2) throw InputError("fewer than 2 parts");
  if (cfg.mode == BenchMode::pspsb && part_paths.size() > cfg.max_parts) {
    row.skipped = true;
    row.reason = "more than " + std::to_string(cfg.max_parts) + " parts";
    return;
  }
  std::vector<Mesh> parts;
  for (const auto& p : part_paths) parts.push_back(load_shape(p));
  const DistanceMatrix matrix = read_symd(dir / ann.matrix);
  const SymmetrySet gt = ground_truth_from_matrix(parts.size(), matrix, ann.delta_sym);
  row.ground_truth = gt.hypotheses.size();
  const std::uint64_t seed = shape_seed(cfg.seed, row.id);
  const std::size_t eval_n =
      cfg.eval_points ? cfg.eval_points : (cfg.mode == BenchMode::pspsb ? kPspsbEvalPoints : kPsbEvalPoints);
  EvalCloud eval = sample_eval_cloud(parts, eval_n, derive_seed(seed, 11));

  SymmetrySet pred;
  std::optional<SampledShape> shape;
  if (cfg.mode == BenchMode::pspsb) {
    if (!std::filesystem::exists(dir / "part_embeddings.syme")) throw InputError("no part_embeddings.syme");
    const EmbeddingSet emb = read_syme(dir / "part_embeddings.syme");
    pred = pspsb_detect(parts.size(), emb, cfg.delta_sym);
    std::vector<PointCloud> clouds;
    for (std::size_t k = 0; k < parts.size(); ++k)
      clouds.push_back(sample_surface(parts[k], cfg.part_cloud_points, derive_seed(seed, 100 + k)));
    if (!pred.hypotheses.empty()) {
      IcpConfig icp = cfg.icp;
      icp.seed = seed;
      row.icp = metric_icp(pred, [&](const Region& r) { return clouds.at(r.patches.at(0)); }, icp);
    }
  } else {
    if (std::filesystem::exists(dir / "shape.syms")) {
      shape = read_syms(dir / "shape.syms", cfg.neighbor_k);
    } else {
      shape = sample_shape(load_shape(dir / "shape.ply"), cfg.points, cfg.centers, seed, cfg.neighbor_k);
    }
    std::vector<Patch> patches;
    if (std::filesystem::exists(dir / "patches.symp")) {
      patches = read_symp(dir / "patches.symp");
      for (Patch& p : patches) p = extract_patch(*shape, p.center, p.size, p.metric);
    } else {
      patches = sample_patch_set(*shape, cfg.patch_sizes, cfg.patch_counts, seed, cfg.patch_metric).patches;
    }
    DetectConfig dc = cfg.detect;
    dc.seed = seed;
    IcpConfig icp = cfg.icp;
    icp.seed = seed;
    DetectResult det;
    if (std::filesystem::exists(dir / "patch_embeddings.syme")) {
      det = detect_symmetries(*shape, patches, read_syme(dir / "patch_embeddings.syme"), dc, icp, 1);
    } else {
      std::vector<PointCloud> clouds;
      for (const Patch& p : patches) clouds.push_back(subset(shape->cloud, p.point_indices));
      const MatrixResult m = distance_matrix(clouds, icp, 1);
      det = detect_symmetries(*shape, patches, m.matrix, dc, icp, 1);
    }
    pred = std::move(det.set);
    label_shape_points(eval, *shape, std::max(det.epsilon, shape->graph.mean_edge_length()));
    if (!pred.hypotheses.empty()) row.icp = metric_icp(pred);
  }
  row.predicted = pred.hypotheses.size();
  if (row.predicted == 0 || gt.hypotheses.empty()) return;
  const ClusterMasks pm = cluster_masks(pred, eval, shape ? shape->size() : 0);
  const ClusterMasks gm = cluster_masks(gt, eval);
  row.iou = metric_iou(pm, gm);
  row.cov = metric_cov(pm, gm);
}

}  // namespace detail

// Evaluates every shape directory under `dataset`. Per-shape failures are
// recorded as skipped rows; the run never aborts on them.
inline BenchmarkReport run_benchmark(const std::filesystem::path& dataset, const BenchConfig& cfg) {
  const auto ids = list_shapes(dataset);
  if (ids.empty()) throw EmptyDataset("no shapes in " + dataset.string());
  BenchmarkReport report;
  report.mode = cfg.mode;
  report.rows.resize(ids.size());
  parallel_for(ids.size(), cfg.parallelism, [&](std::size_t k) {
    ShapeRow& row = report.rows[k];
    row.id = ids[k];
    try {
      detail::evaluate_shape(dataset / ids[k], cfg, row);
    } catch (const std::exception& e) {
      row.skipped = true;
      row.reason = e.what();
    }
    if (row.category.empty()) row.category = "uncategorized";
  });
  std::vector<const ShapeRow*> all;
  std::map<std::string, std::vector<const ShapeRow*>> by_cat;
  for (const ShapeRow& r : report.rows) {
    all.push_back(&r);
    by_cat[r.category].push_back(&r);
  }
  report.micro = detail::aggregate(all);
  std::vector<double> icp, iou, cov;
  for (const auto& [cat, rows] : by_cat) {
    const Aggregate a = detail::aggregate(rows);
    report.categories[cat] = a;
    icp.push_back(a.icp);
    iou.push_back(a.iou);
    cov.push_back(a.cov);
    report.macro.models += a.models;
    report.macro.evaluated += a.evaluated;
  }
  report.macro.icp = detail::nan_mean(icp);
  report.macro.iou = detail::nan_mean(iou);
  report.macro.cov = detail::nan_mean(cov);
  return report;
}

namespace detail {

inline nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline nlohmann::json aggregate_json(const Aggregate& a) {
  return {{"icp", num_or_null(a.icp)}, {"iou", num_or_null(a.iou)}, {"cov", num_or_null(a.cov)},
          {"models", a.models}, {"evaluated", a.evaluated}};
}

}  // namespace detail

inline nlohmann::json to_json(const BenchmarkReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ShapeRow& s : r.rows)
    rows.push_back({{"id", s.id}, {"category", s.category}, {"icp", detail::num_or_null(s.icp)},
                    {"iou", detail::num_or_null(s.iou)}, {"cov", detail::num_or_null(s.cov)},
                    {"predicted", s.predicted}, {"ground_truth", s.ground_truth}, {"skipped", s.skipped},
                    {"reason", s.reason}});
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [c, a] : r.categories) cats[c] = detail::aggregate_json(a);
  return {{"mode", r.mode == BenchMode::pspsb ? "pspsb" : "psb"},
          {"shapes", rows},
          {"micro_all_shapes", detail::aggregate_json(r.micro)},
          {"macro_over_categories", detail::aggregate_json(r.macro)},
          {"categories", cats}};
}

inline void write_report_csv(const std::filesystem::path& path, const BenchmarkReport& r) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  auto num = [](double v) {
    if (std::isnan(v)) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "id,icp,iou,cov,predicted,skipped\n";
  for (const ShapeRow& s : r.rows)
    out << s.id << ',' << num(s.icp) << ',' << num(s.iou) << ',' << num(s.cov) << ',' << s.predicted << ','
        << (s.skipped ? 1 : 0) << '\n';
}

}  // namespace symdetect
