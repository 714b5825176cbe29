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
#include <fstream>
#include <vector>

#include "symdetect/distance_matrix.hpp"
#include "symdetect/icp.hpp"

namespace symdetect {

struct CurveStats {
  std::vector<double> mean;  // index r holds the value after r + 1 restarts
  std::vector<double> stddev;
};

struct ConvergenceTable {
  std::size_t max_restarts = 0;
  std::vector<CurveStats> per_item;  // across trials of one item
  CurveStats overall;                // across every (item, trial) run
  // Best-so-far curves, [item * trials + trial][restart].
  std::vector<std::vector<double>> curves;
};

namespace detail {

inline CurveStats curve_stats(const std::vector<const std::vector<double>*>& runs, std::size_t len) {
  CurveStats s;
  s.mean.assign(len, 0.0);
  s.stddev.assign(len, 0.0);
  if (runs.empty()) return s;
  for (std::size_t r = 0; r < len; ++r) {
    double sum = 0.0;
    for (const auto* c : runs) sum += (*c)[r];
    const double mean = sum / static_cast<double>(runs.size());
    double var = 0.0;
    for (const auto* c : runs) var += ((*c)[r] - mean) * ((*c)[r] - mean);
    s.mean[r] = mean;
    s.stddev[r] = std::sqrt(var / static_cast<double>(runs.size()));
  }
  return s;
}

}  // namespace detail

// Registers a randomly rotated copy of each item onto the item itself and
// records the best distance seen after each restart 1..max_restarts.
inline ConvergenceTable convergence_study(std::span<const PointCloud> items, std::size_t trials,
                                          std::size_t max_restarts, const IcpConfig& cfg,
                                          std::size_t parallelism = 1) {
  if (trials < 1) throw BadCount("convergence study needs trials >= 1");
  if (max_restarts < 1) throw BadCount("convergence study needs max_restarts >= 1");
  ConvergenceTable table;
  table.max_restarts = max_restarts;
  table.curves.assign(items.size() * trials, {});
  parallel_for(items.size() * trials, parallelism, [&](std::size_t k) {
    const std::size_t item = k / trials, trial = k % trials;
    Rng rng(pair_seed(cfg.seed, item, items.size() + trial));
    const Mat3 rot = random_rotation(rng);
    std::vector<Vec3> rotated;
    rotated.reserve(items[item].size());
    for (const Vec3& p : items[item].points) rotated.push_back(rot * p);
    IcpConfig rc = cfg;
    rc.restarts = max_restarts;
    rc.seed = derive_seed(cfg.seed, k);
    const IcpDistanceTrace trace = icp_distance_trace(items[item].points, rotated, rc);
    std::vector<double> best(max_restarts);
    double run = kInf;
    for (std::size_t r = 0; r < max_restarts; ++r) best[r] = run = std::min(run, trace.per_restart[r]);
    table.curves[k] = std::move(best);
  });
  std::vector<const std::vector<double>*> all;
  for (std::size_t item = 0; item < items.size(); ++item) {
    std::vector<const std::vector<double>*> runs;
    for (std::size_t t = 0; t < trials; ++t) runs.push_back(&table.curves[item * trials + t]);
    table.per_item.push_back(detail::curve_stats(runs, max_restarts));
    all.insert(all.end(), runs.begin(), runs.end());
  }
  table.overall = detail::curve_stats(all, max_restarts);
  return table;
}

// Rows: item (index or "all"), restarts, mean, std.
inline void write_convergence_csv(const std::filesystem::path& path, const ConvergenceTable& t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "item,restarts,mean,std\n";
  char buf[96];
  auto rows = [&](const std::string& name, const CurveStats& s) {
    for (std::size_t r = 0; r < s.mean.size(); ++r) {
      std::snprintf(buf, sizeof buf, ",%zu,%.17g,%.17g\n", r + 1, s.mean[r], s.stddev[r]);
      out << name << buf;
    }
  };
  for (std::size_t i = 0; i < t.per_item.size(); ++i) rows(std::to_string(i), t.per_item[i]);
  rows("all", t.overall);
}

}  // namespace symdetect
