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
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace symdetect {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index = std::uint32_t;
using IndexList = std::vector<Index>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error hierarchy. InputError marks problems with user-supplied data (CLI exit
// code 1); everything else deriving from Error is an internal failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

#define SYMDETECT_ERROR(Name, Base)                  \
  class Name : public Base {                         \
   public:                                           \
    explicit Name(const std::string& what)           \
        : Base(std::string(#Name ": ") + what) {}    \
  };

SYMDETECT_ERROR(ParseError, InputError)
SYMDETECT_ERROR(EmptyGeometry, InputError)
SYMDETECT_ERROR(BadCount, InputError)
SYMDETECT_ERROR(EmptyCloud, InputError)
SYMDETECT_ERROR(SizeMismatch, InputError)
SYMDETECT_ERROR(EmptyDataset, InputError)
SYMDETECT_ERROR(IslandCenter, Error)
SYMDETECT_ERROR(DegeneratePatch, Error)
SYMDETECT_ERROR(DegenerateInput, Error)
SYMDETECT_ERROR(ZeroVector, InputError)
SYMDETECT_ERROR(TooFewItems, InputError)
SYMDETECT_ERROR(NoFeasibleStep, Error)
SYMDETECT_ERROR(EmptySet, InputError)

#undef SYMDETECT_ERROR

inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

struct PointCloud {
  std::vector<Vec3> points;
  // Face index per point when sampled from a mesh, empty otherwise.
  std::vector<Index> source_face;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const Vec3& operator[](std::size_t i) const { return points[i]; }
};

inline PointCloud subset(const PointCloud& cloud, std::span<const Index> indices) {
  PointCloud out;
  out.points.reserve(indices.size());
  for (Index i : indices) out.points.push_back(cloud.points[i]);
  return out;
}

inline Vec3 centroid(std::span<const Vec3> points) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

// FNV-1a, used for config fingerprints and per-item seed derivation.
class Fnv1a {
 public:
  Fnv1a& add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }
  template <typename T>
  Fnv1a& add(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    return add_bytes(&value, sizeof(T));
  }
  Fnv1a& add(const std::string& s) { return add_bytes(s.data(), s.size()); }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable seed for an unordered pair (i, j) under a base seed.
inline std::uint64_t pair_seed(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
  if (i > j) std::swap(i, j);
  return splitmix64(splitmix64(splitmix64(seed) ^ i) ^ (j + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

}  // namespace symdetect
