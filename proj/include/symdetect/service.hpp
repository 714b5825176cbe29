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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <string>
#include <vector>

#include "json.hpp"
#include "symdetect/bench.hpp"
#include "symdetect/distance_matrix.hpp"
#include "symdetect/mesh_io.hpp"
#include "symdetect/sampling.hpp"
// After Eigen: resolv.h, pulled in here, defines a macro named _res.
#include "httplib.h"

namespace symdetect {

inline constexpr std::size_t kPreviewPointsPerPart = 4096;

// HTTP backend for the annotation UI over a dataset directory laid out as
// <id>/parts/part_<k>.ply, <id>/matrix.symd and <id>/annotation.json.
class AnnotationService {
 public:
  explicit AnnotationService(std::filesystem::path dataset, std::filesystem::path static_dir = {})
      : dataset_(std::move(dataset)), static_dir_(std::move(static_dir)) {
    if (!std::filesystem::is_directory(dataset_)) throw InputError("not a directory: " + dataset_.string());
    routes();
  }

  // Binds to host:port (port 0 picks a free port) and returns the port, or -1.
  int bind(const std::string& host = "127.0.0.1", int port = 0) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }
  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool running() const { return server_.is_running(); }

  // Groups of part ids for a threshold, from the shape's matrix.
  nlohmann::json groups(const std::string& id, double threshold) const {
    const DistanceMatrix m = matrix(id);
    const SymmetrySet s = ground_truth_from_matrix(m.size(), m, threshold);
    nlohmann::json g = nlohmann::json::array();
    for (const Hypothesis& h : s.hypotheses) {
      std::vector<Index> parts;
      for (const Region& r : h.regions) parts.push_back(r.patches.at(0));
      g.push_back(parts);
    }
    return g;
  }

 private:
  static void send(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }
  static void fail(httplib::Response& res, int status, const std::string& message) {
    send(res, status, {{"error", message}});
  }

  bool known(const std::string& id) const {
    static const std::regex ok("[A-Za-z0-9_.-]+");
    if (!std::regex_match(id, ok) || id == "." || id == "..") return false;
    return std::filesystem::is_directory(dataset_ / id);
  }

  std::filesystem::path annotation_path(const std::string& id) const { return dataset_ / id / "annotation.json"; }

  std::optional<Annotation> annotation(const std::string& id) const {
    const auto p = annotation_path(id);
    if (!std::filesystem::exists(p)) return std::nullopt;
    return read_annotation(p);
  }

  DistanceMatrix matrix(const std::string& id) const {
    const auto a = annotation(id);
    return read_symd(dataset_ / id / (a ? a->matrix : std::string("matrix.symd")));
  }

  std::mutex& shape_mutex(const std::string& id) {
    std::lock_guard lock(table_mutex_);
    auto& m = shape_mutexes_[id];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  nlohmann::json part_positions(const std::filesystem::path& path, std::uint64_t seed) const {
    const Mesh mesh = load_shape(path);
    const PointCloud pts = sample_surface(mesh, kPreviewPointsPerPart, seed);
    std::vector<float> flat;
    flat.reserve(pts.size() * 3);
    for (const Vec3& p : pts.points)
      for (int c = 0; c < 3; ++c) flat.push_back(static_cast<float>(p[c]));
    return flat;
  }

  nlohmann::json annotation_json(const std::optional<Annotation>& a) const {
    if (!a) return nullptr;
    return {{"delta_sym", threshold_to_json(a->delta_sym)}, {"matrix", a->matrix}, {"version", a->version}};
  }

  static std::optional<double> parse_threshold(const std::string& body) {
    const auto j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("threshold")) return std::nullopt;
    return threshold_from_json(j["threshold"]);
  }

  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const InputError& e) {
      fail(res, 422, e.what());
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    }
  }

  void routes() {
    server_.Get("/shapes", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        nlohmann::json list = nlohmann::json::array();
        for (const std::string& id : list_shapes(dataset_)) {
          const auto a = annotation(id);
          list.push_back({{"id", id},
                          {"annotated", a.has_value()},
                          {"parts", list_parts(dataset_ / id).size()},
                          {"annotation", annotation_json(a)}});
        }
        send(res, 200, {{"shapes", list}});
      });
    });

    server_.Get(R"(/shapes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!known(id)) return fail(res, 404, "unknown shape");
      guarded(res, [&] {
        nlohmann::json parts = nlohmann::json::array();
        const auto paths = list_parts(dataset_ / id);
        for (std::size_t k = 0; k < paths.size(); ++k)
          parts.push_back({{"id", k}, {"positions", part_positions(paths[k], k)}});
        nlohmann::json body = {{"id", id}, {"parts", parts}, {"annotation", annotation_json(annotation(id))}};
        const DistanceMatrix m = matrix(id);
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < m.size(); ++i) {
          nlohmann::json row = nlohmann::json::array();
          for (std::size_t j = 0; j < m.size(); ++j)
            row.push_back(std::isfinite(m(i, j)) ? nlohmann::json(m(i, j)) : nlohmann::json(nullptr));
          rows.push_back(row);
        }
        body["matrix"] = {{"n", m.size()}, {"values", rows}};
        send(res, 200, body);
      });
    });

    server_.Get(R"(/shapes/([^/]+)/annotation)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!known(id)) return fail(res, 404, "unknown shape");
      guarded(res, [&] {
        const auto a = annotation(id);
        if (!a) return fail(res, 404, "shape not annotated");
        send(res, 200, annotation_json(a));
      });
    });

    server_.Post(R"(/shapes/([^/]+)/preview)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!known(id)) return fail(res, 404, "unknown shape");
      const auto t = parse_threshold(req.body);
      if (!t) return fail(res, 422, "threshold must be a non-negative number or \"inf\"");
      guarded(res, [&] { send(res, 200, {{"threshold", threshold_to_json(*t)}, {"groups", groups(id, *t)}}); });
    });

    server_.Put(R"(/shapes/([^/]+)/annotation)", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!known(id)) return fail(res, 404, "unknown shape");
      const auto t = parse_threshold(req.body);
      if (!t) return fail(res, 422, "threshold must be a non-negative number or \"inf\"");
      guarded(res, [&] {
        std::lock_guard lock(shape_mutex(id));
        Annotation a = annotation(id).value_or(Annotation{});
        a.delta_sym = *t;
        ++a.version;
        write_annotation(annotation_path(id), a);
        send(res, 200, annotation_json(a));
      });
    });

    server_.Get(R"(/shapes/([^/]+)/symmetries/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      if (!known(id)) return fail(res, 404, "unknown shape");
      guarded(res, [&] {
        double t = 0.0;
        if (req.has_param("threshold")) {
          const auto parsed = threshold_from_json(nlohmann::json::parse(req.get_param_value("threshold"), nullptr, false));
          const std::string raw = req.get_param_value("threshold");
          const auto v = parsed ? parsed : threshold_from_json(nlohmann::json(raw));
          if (!v) return fail(res, 422, "invalid threshold");
          t = *v;
        } else if (const auto a = annotation(id)) {
          t = a->delta_sym;
        } else {
          return fail(res, 404, "shape not annotated and no threshold given");
        }
        const nlohmann::json g = groups(id, t);
        const std::size_t k = std::stoul(req.matches[2]);
        if (k >= g.size()) return fail(res, 404, "no such symmetry group");
        const auto paths = list_parts(dataset_ / id);
        nlohmann::json parts = nlohmann::json::array();
        for (std::size_t p : g[k].get<std::vector<std::size_t>>())
          parts.push_back({{"id", p}, {"positions", part_positions(paths.at(p), p)}});
        send(res, 200, {{"group", k}, {"threshold", threshold_to_json(t)}, {"parts", parts}});
      });
    });

    if (!static_dir_.empty() && std::filesystem::is_directory(static_dir_)) {
      server_.set_mount_point("/", static_dir_.string());
    } else {
      server_.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<!doctype html><title>symdetect</title><p>No UI bundle configured.</p>", "text/html");
      });
    }
  }

  std::filesystem::path dataset_;
  std::filesystem::path static_dir_;
  httplib::Server server_;
  std::mutex table_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> shape_mutexes_;
};

}  // namespace symdetect
