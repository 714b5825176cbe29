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

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "symdetect/binary_io.hpp"
#include "symdetect/icp.hpp"

namespace symdetect {

enum class DistanceKind : std::uint8_t { icp = 0, cosine = 1 };

// Symmetric n x n matrix with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, DistanceKind kind, std::uint64_t fingerprint = 0)
      : n_(n), kind_(kind), fingerprint_(fingerprint), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  DistanceKind kind() const { return kind_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    if (i == j) return;
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }

  double max_finite() const {
    double m = 0.0;
    for (double v : values_)
      if (std::isfinite(v)) m = std::max(m, v);
    return m;
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  DistanceKind kind_ = DistanceKind::icp;
  std::uint64_t fingerprint_ = 0;
  std::vector<double> values_;
};

struct PairFailure {
  std::size_t i = 0, j = 0;
  std::string message;
};

struct MatrixResult {
  DistanceMatrix matrix;
  std::vector<PairFailure> failures;
};

// Runs fn(k) for k in [0, count) on `parallelism` threads. Work items must
// write to disjoint outputs; the result is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t parallelism, Fn&& fn) {
  parallelism = std::max<std::size_t>(1, std::min(parallelism, count));
  if (parallelism == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < parallelism; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Pairwise ICP distances. Entry (i, j), i < j, registers item i onto item j
// with seed pair_seed(cfg.seed, i, j), so values do not depend on the order
// or schedule of evaluation. Failed pairs are +inf and reported.
inline MatrixResult distance_matrix(std::span<const PointCloud> items, const IcpConfig& cfg,
                                    std::size_t parallelism = 1) {
  if (items.size() < 2) throw TooFewItems("distance matrix needs at least 2 items");
  cfg.validate();
  const std::size_t n = items.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<double> values(pairs.size(), kInf);
  std::vector<std::string> errors(pairs.size());
  parallel_for(pairs.size(), parallelism, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    IcpConfig pc = cfg;
    pc.seed = pair_seed(cfg.seed, i, j);
    try {
      values[k] = icp_distance(items[i], items[j], pc);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });
  MatrixResult out{DistanceMatrix(n, DistanceKind::icp, cfg.fingerprint()), {}};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out.matrix.set(pairs[k].first, pairs[k].second, values[k]);
    if (!errors[k].empty()) out.failures.push_back({pairs[k].first, pairs[k].second, errors[k]});
  }
  return out;
}

// SYMD container: magic, u32 version, u8 kind, u64 n, u64 fingerprint, then
// the n(n-1)/2 upper-triangle values row by row as f64.
inline void write_symd(const std::filesystem::path& path, const DistanceMatrix& m) {
  io::Writer w(path);
  w.magic("SYMD");
  w.put<std::uint32_t>(1);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(m.kind()));
  w.put<std::uint64_t>(m.size());
  w.put<std::uint64_t>(m.fingerprint());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) w.put<double>(m(i, j));
  w.close();
}

inline DistanceMatrix read_symd(const std::filesystem::path& path) {
  io::Reader r(path);
  r.expect_magic("SYMD");
  if (const auto v = r.get<std::uint32_t>(); v != 1)
    throw ParseError("unsupported SYMD version " + std::to_string(v));
  const auto kind = r.get<std::uint8_t>();
  if (kind > 1) throw ParseError("unknown SYMD kind");
  const auto n = r.get<std::uint64_t>();
  const auto fp = r.get<std::uint64_t>();
  r.check_remaining(n, 4);
  DistanceMatrix m(n, static_cast<DistanceKind>(kind), fp);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, r.get<double>());
  r.expect_end();
  return m;
}

inline void write_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[40];
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out << ',';
      const double v = m(i, j);
      if (std::isinf(v)) out << "inf";
      else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace symdetect
