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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "symdetect/bench.hpp"
#include "symdetect/core.hpp"
#include "symdetect/detect.hpp"
#include "symdetect/grow.hpp"
#include "symdetect/icp.hpp"
#include "symdetect/patches.hpp"
#include "symdetect/shape.hpp"

namespace symdetect {

// Every stage parameter in one place; loaded from a JSON file and overridden
// by command-line flags.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;

  std::size_t points = kDefaultPointCount;
  std::size_t centers = kDefaultCenterCount;
  std::size_t neighbor_k = kDefaultNeighborK;

  std::vector<std::size_t> patch_sizes{512, 1024, 2048, 4096, 8192};
  std::vector<std::size_t> patch_counts{128, 64, 32, 16, 8};
  PatchMetric patch_metric = PatchMetric::geodesic;
  double pair_offset = 0.1;

  IcpConfig icp{};
  DetectConfig detect{};
  GrowConfig grow{};
  std::optional<double> grow_threshold;

  BenchMode bench_mode = BenchMode::psb;
  std::size_t eval_points = 0;
  double delta_sym = kSymclThreshold;
  std::size_t max_parts = kMaxPspsbParts;

  std::size_t converge_trials = 10;
  std::size_t converge_restarts = 30;

  nlohmann::json to_json() const;
  std::uint64_t fingerprint() const { return Fnv1a().add(to_json().dump()).value(); }

  BenchConfig bench() const {
    BenchConfig b;
    b.mode = bench_mode;
    b.detect = detect;
    b.icp = icp;
    b.points = points;
    b.centers = centers;
    b.neighbor_k = neighbor_k;
    b.patch_sizes = patch_sizes;
    b.patch_counts = patch_counts;
    b.patch_metric = patch_metric;
    b.eval_points = eval_points;
    b.delta_sym = delta_sym;
    b.max_parts = max_parts;
    b.seed = seed;
    b.parallelism = parallelism;
    return b;
  }
};

inline nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["parallelism"] = parallelism;
  j["sample"] = {{"points", points}, {"centers", centers}, {"neighbor_k", neighbor_k}};
  j["patches"] = {{"sizes", patch_sizes},
                  {"counts", patch_counts},
                  {"metric", patch_metric == PatchMetric::geodesic ? "geodesic" : "euclidean"},
                  {"pair_offset", pair_offset}};
  j["icp"] = {{"restarts", icp.restarts},
              {"max_iters", icp.max_iters},
              {"fps_points", icp.fps_points},
              {"convergence_tol", icp.convergence_tol}};
  j["detect"] = {{"min_patch_count", detect.min_patch_count},
                 {"min_cluster_size", detect.cluster.min_cluster_size},
                 {"min_samples", detect.cluster.min_samples},
                 {"alpha", detect.alpha},
                 {"epsilon", detect.epsilon ? nlohmann::json(*detect.epsilon) : nlohmann::json(nullptr)},
                 {"delta_sim", detect.delta_sim},
                 {"max_regions", detect.max_regions}};
  j["grow"] = {{"steps", grow.steps},
               {"tie_tolerance", grow.tie_tolerance},
               {"threshold", grow_threshold ? threshold_to_json(*grow_threshold) : nlohmann::json(nullptr)}};
  j["bench"] = {{"mode", bench_mode == BenchMode::pspsb ? "pspsb" : "psb"},
                {"eval_points", eval_points},
                {"delta_sym", delta_sym},
                {"max_parts", max_parts}};
  j["converge"] = {{"trials", converge_trials}, {"restarts", converge_restarts}};
  return j;
}

namespace detail {

template <typename T>
void take(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key) && !obj[key].is_null()) out = obj[key].get<T>();
}

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw InputError("config section " + where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw InputError("unknown config key " + where + "." + k);
  }
}

}  // namespace detail

// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  using detail::check_keys;
  using detail::take;
  RunConfig c;
  try {
    check_keys(j, {"seed", "parallelism", "sample", "patches", "icp", "detect", "grow", "bench", "converge"}, "");
    take(j, "seed", c.seed);
    take(j, "parallelism", c.parallelism);
    const nlohmann::json empty = nlohmann::json::object();
    auto section = [&](const char* name) -> const nlohmann::json& { return j.contains(name) ? j[name] : empty; };
    const auto& s = section("sample");
    check_keys(s, {"points", "centers", "neighbor_k"}, "sample");
    take(s, "points", c.points);
    take(s, "centers", c.centers);
    take(s, "neighbor_k", c.neighbor_k);
    const auto& p = section("patches");
    check_keys(p, {"sizes", "counts", "metric", "pair_offset"}, "patches");
    take(p, "sizes", c.patch_sizes);
    take(p, "counts", c.patch_counts);
    if (p.contains("metric")) {
      const auto m = p["metric"].get<std::string>();
      if (m != "geodesic" && m != "euclidean") throw InputError("patches.metric must be geodesic or euclidean");
      c.patch_metric = m == "geodesic" ? PatchMetric::geodesic : PatchMetric::euclidean;
    }
    take(p, "pair_offset", c.pair_offset);
    const auto& icp = section("icp");
    check_keys(icp, {"restarts", "max_iters", "fps_points", "convergence_tol"}, "icp");
    take(icp, "restarts", c.icp.restarts);
    take(icp, "max_iters", c.icp.max_iters);
    take(icp, "fps_points", c.icp.fps_points);
    take(icp, "convergence_tol", c.icp.convergence_tol);
    const auto& d = section("detect");
    check_keys(d, {"min_patch_count", "min_cluster_size", "min_samples", "alpha", "epsilon", "delta_sim", "max_regions"},
               "detect");
    take(d, "min_patch_count", c.detect.min_patch_count);
    take(d, "min_cluster_size", c.detect.cluster.min_cluster_size);
    take(d, "min_samples", c.detect.cluster.min_samples);
    take(d, "alpha", c.detect.alpha);
    if (d.contains("epsilon") && !d["epsilon"].is_null()) c.detect.epsilon = d["epsilon"].get<double>();
    take(d, "delta_sim", c.detect.delta_sim);
    take(d, "max_regions", c.detect.max_regions);
    const auto& g = section("grow");
    check_keys(g, {"steps", "tie_tolerance", "threshold"}, "grow");
    take(g, "steps", c.grow.steps);
    take(g, "tie_tolerance", c.grow.tie_tolerance);
    if (g.contains("threshold") && !g["threshold"].is_null()) {
      c.grow_threshold = threshold_from_json(g["threshold"]);
      if (!c.grow_threshold) throw InputError("grow.threshold must be a non-negative number or \"inf\"");
    }
    const auto& b = section("bench");
    check_keys(b, {"mode", "eval_points", "delta_sym", "max_parts"}, "bench");
    if (b.contains("mode")) {
      const auto m = b["mode"].get<std::string>();
      if (m != "psb" && m != "pspsb") throw InputError("bench.mode must be psb or pspsb");
      c.bench_mode = m == "psb" ? BenchMode::psb : BenchMode::pspsb;
    }
    take(b, "eval_points", c.eval_points);
    take(b, "delta_sym", c.delta_sym);
    take(b, "max_parts", c.max_parts);
    const auto& cv = section("converge");
    check_keys(cv, {"trials", "restarts"}, "converge");
    take(cv, "trials", c.converge_trials);
    take(cv, "restarts", c.converge_restarts);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("bad config: ") + e.what());
  }
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json_file(path));
}

}  // namespace symdetect
