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

#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string_view>

#include "symdetect/core.hpp"

namespace symdetect::io {

static_assert(std::endian::native == std::endian::little,
              "binary containers are written in host order, which must be little-endian");

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw Error("cannot write " + path.string());
  }

  void magic(std::string_view m) { out_.write(m.data(), static_cast<std::streamsize>(m.size())); }

  template <typename T>
  void put(T v) {
    static_assert(std::is_arithmetic_v<T>);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }

  void put_vec3f(const Vec3& p) {
    put(static_cast<float>(p.x()));
    put(static_cast<float>(p.y()));
    put(static_cast<float>(p.z()));
  }

  void close() {
    out_.close();
    if (!out_) throw Error("failed writing " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw ParseError("cannot open " + path.string());
  }

  void expect_magic(std::string_view m) {
    std::array<char, 8> buf{};
    if (!in_.read(buf.data(), static_cast<std::streamsize>(m.size())) ||
        std::string_view(buf.data(), m.size()) != m)
      throw ParseError(path_.string() + ": expected magic " + std::string(m));
  }

  template <typename T>
  T get() {
    T v;
    if (!in_.read(reinterpret_cast<char*>(&v), sizeof(T)))
      throw ParseError(path_.string() + ": truncated container");
    return v;
  }

  Vec3 get_vec3f() {
    const float x = get<float>(), y = get<float>(), z = get<float>();
    return {x, y, z};
  }

  // Guards allocations driven by counts read from the file.
  void check_remaining(std::uint64_t count, std::uint64_t bytes_each) {
    const auto here = in_.tellg();
    in_.seekg(0, std::ios::end);
    const auto end = in_.tellg();
    in_.seekg(here);
    if (bytes_each != 0 && count > static_cast<std::uint64_t>(end - here) / bytes_each)
      throw ParseError(path_.string() + ": count exceeds file size");
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof())
      throw ParseError(path_.string() + ": trailing bytes");
  }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

}  // namespace symdetect::io
