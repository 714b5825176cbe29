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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "symdetect/core.hpp"

namespace symdetect {

using Face = std::array<Index, 3>;

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
};

enum class MeshFormat { obj, ply };

inline double face_area(const Mesh& mesh, const Face& f) {
  const Vec3& a = mesh.vertices[f[0]];
  return 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
}

// Drops zero-area faces and unreferenced vertices, reindexing what remains.
inline void cleanup(Mesh& mesh) {
  std::vector<Face> kept;
  kept.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
    if (face_area(mesh, f) > 0.0) kept.push_back(f);
  }
  std::vector<Index> remap(mesh.vertices.size(), 0xffffffffu);
  std::vector<Vec3> vertices;
  for (Face& f : kept) {
    for (Index& v : f) {
      if (remap[v] == 0xffffffffu) {
        remap[v] = static_cast<Index>(vertices.size());
        vertices.push_back(mesh.vertices[v]);
      }
      v = remap[v];
    }
  }
  mesh.vertices = std::move(vertices);
  mesh.faces = std::move(kept);
}

namespace detail {

inline void check_indices(const Mesh& mesh) {
  for (const Face& f : mesh.faces)
    for (Index v : f)
      if (v >= mesh.vertices.size()) throw ParseError("face index out of range");
}

inline void add_polygon(Mesh& mesh, const std::vector<long long>& poly) {
  if (poly.size() < 3) throw ParseError("face with fewer than 3 vertices");
  for (std::size_t i = 1; i + 1 < poly.size(); ++i)
    mesh.faces.push_back({static_cast<Index>(poly[0]), static_cast<Index>(poly[i]),
                          static_cast<Index>(poly[i + 1])});
}

inline Mesh parse_obj(std::istream& in) {
  Mesh mesh;
  std::string line;
  std::vector<long long> poly;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw ParseError("malformed vertex: " + line);
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      poly.clear();
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        long long idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoll(head, &used);
          if (used != head.size()) throw ParseError("bad face token: " + tok);
        } catch (const std::logic_error&) {
          throw ParseError("bad face token: " + tok);
        }
        if (idx < 0) idx += static_cast<long long>(mesh.vertices.size()) + 1;
        if (idx < 1 || idx > static_cast<long long>(mesh.vertices.size()))
          throw ParseError("face index out of range: " + tok);
        poly.push_back(idx - 1);
      }
      add_polygon(mesh, poly);
    }
  }
  return mesh;
}

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

inline std::size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" || t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw ParseError("unknown PLY type: " + t);
}

inline double read_binary_value(std::istream& in, const std::string& t) {
  unsigned char buf[8];
  const std::size_t n = ply_type_size(t);
  if (!in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n)))
    throw ParseError("truncated PLY body");
  // Host is assumed little-endian, matching the supported PLY encoding.
  if (t == "char" || t == "int8") return static_cast<std::int8_t>(buf[0]);
  if (t == "uchar" || t == "uint8") return buf[0];
  if (t == "short" || t == "int16") { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
  if (t == "ushort" || t == "uint16") { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
  if (t == "int" || t == "int32") { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
  if (t == "uint" || t == "uint32") { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
  if (t == "float" || t == "float32") { float v; std::memcpy(&v, buf, 4); return v; }
  double v;
  std::memcpy(&v, buf, 8);
  return v;
}

inline Mesh parse_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw ParseError("missing ply magic");
  bool binary = false;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") binary = true;
      else if (fmt != "ascii") throw ParseError("unsupported PLY format: " + fmt);
    } else if (tag == "element") {
      PlyElement e;
      if (!(ls >> e.name >> e.count)) throw ParseError("malformed element line");
      elements.push_back(e);
    } else if (tag == "property") {
      if (elements.empty()) throw ParseError("property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      if (p.name.empty()) throw ParseError("malformed property line");
      ply_type_size(p.type);
      elements.back().properties.push_back(p);
    } else if (tag == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done) throw ParseError("PLY header not terminated");

  Mesh mesh;
  std::vector<long long> poly;
  for (const PlyElement& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    for (std::size_t r = 0; r < e.count; ++r) {
      std::istringstream ls;
      if (!binary) {
        if (!std::getline(in, line)) throw ParseError("truncated PLY body");
        ls.str(line);
      }
      auto value = [&](const std::string& type) {
        if (binary) return read_binary_value(in, type);
        double v;
        if (!(ls >> v)) throw ParseError("truncated PLY row");
        return v;
      };
      Vec3 pos = Vec3::Zero();
      int seen = 0;
      for (const PlyProperty& p : e.properties) {
        if (p.is_list) {
          const auto n = static_cast<long long>(value(p.count_type));
          if (n < 0) throw ParseError("negative list length");
          poly.clear();
          for (long long i = 0; i < n; ++i) poly.push_back(static_cast<long long>(value(p.type)));
          if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
            for (long long v : poly)
              if (v < 0) throw ParseError("negative face index");
            add_polygon(mesh, poly);
          }
        } else {
          const double v = value(p.type);
          if (is_vertex) {
            if (p.name == "x") { pos.x() = v; seen |= 1; }
            else if (p.name == "y") { pos.y() = v; seen |= 2; }
            else if (p.name == "z") { pos.z() = v; seen |= 4; }
          }
        }
      }
      if (is_vertex) {
        if (seen != 7) throw ParseError("vertex element without x/y/z");
        mesh.vertices.push_back(pos);
      }
    }
  }
  return mesh;
}

inline MeshFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return MeshFormat::obj;
  if (ext == ".ply") return MeshFormat::ply;
  throw ParseError("unsupported file extension: " + path.string());
}

inline Mesh read_mesh_raw(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  Mesh mesh = format == MeshFormat::obj ? parse_obj(in) : parse_ply(in);
  check_indices(mesh);
  for (const Vec3& v : mesh.vertices)
    if (!v.allFinite()) throw ParseError("non-finite vertex in " + path.string());
  return mesh;
}

}  // namespace detail

inline Mesh load_shape(const std::filesystem::path& path, MeshFormat format) {
  Mesh mesh = detail::read_mesh_raw(path, format);
  cleanup(mesh);
  if (mesh.faces.empty()) throw EmptyGeometry("no faces survive cleanup in " + path.string());
  return mesh;
}

inline Mesh load_shape(const std::filesystem::path& path) {
  return load_shape(path, detail::format_from_path(path));
}

// Vertices of an OBJ or PLY file, faces ignored. Used for files that already
// hold point clouds.
inline PointCloud load_vertices(const std::filesystem::path& path) {
  Mesh mesh = detail::read_mesh_raw(path, detail::format_from_path(path));
  if (mesh.vertices.empty()) throw EmptyCloud("no vertices in " + path.string());
  PointCloud cloud;
  cloud.points = std::move(mesh.vertices);
  return cloud;
}

struct Rgb {
  unsigned char r = 128, g = 128, b = 128;
};

// ASCII PLY point cloud with per-vertex colors. Output is a pure function of
// the inputs so reruns are byte-identical.
inline void write_colored_ply(const std::filesystem::path& path, std::span<const Vec3> points,
                              std::span<const Rgb> colors) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  char buf[128];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Rgb c = i < colors.size() ? colors[i] : Rgb{};
    std::snprintf(buf, sizeof buf, "%.7g %.7g %.7g %u %u %u\n", points[i].x(), points[i].y(),
                  points[i].z(), c.r, c.g, c.b);
    out << buf;
  }
}

inline void write_obj(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Face& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void write_ply_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "ply\nformat ascii 1.0\nelement vertex " << mesh.vertices.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nelement face " << mesh.faces.size()
      << "\nproperty list uchar int vertex_indices\nend_header\n";
  out.precision(17);
  for (const Vec3& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const Face& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

inline void write_ply_points(const std::filesystem::path& path, std::span<const Vec3> points) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  out.precision(17);
  for (const Vec3& p : points) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
}

}  // namespace symdetect
