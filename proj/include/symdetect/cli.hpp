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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "symdetect/bench.hpp"
#include "symdetect/config.hpp"
#include "symdetect/convergence.hpp"
#include "symdetect/detect.hpp"
#include "symdetect/distance_matrix.hpp"
#include "symdetect/grow.hpp"
#include "symdetect/icp.hpp"
#include "symdetect/mesh_io.hpp"
#include "symdetect/patches.hpp"
#include "symdetect/sampling.hpp"
#include "symdetect/shape.hpp"
#include "symdetect/service.hpp"

namespace symdetect::cli {

namespace fs = std::filesystem;

// Point cloud from a SYMS file, a mesh (surface-sampled) or a vertex-only PLY/OBJ.
inline PointCloud load_cloud(const fs::path& path, std::size_t points, std::uint64_t seed) {
  if (path.extension() == ".syms") return read_syms_raw(path).cloud;
  Mesh mesh = detail::read_mesh_raw(path, detail::format_from_path(path));
  if (mesh.vertices.empty()) throw EmptyCloud("no vertices in " + path.string());
  cleanup(mesh);
  if (!mesh.faces.empty()) return sample_surface(mesh, points, seed);
  PointCloud c;
  c.points = detail::read_mesh_raw(path, detail::format_from_path(path)).vertices;
  return c;
}

inline std::vector<Patch> load_or_sample_patches(const std::string& path, const SampledShape& shape,
                                                 const RunConfig& cfg) {
  if (!path.empty()) {
    std::vector<Patch> patches = read_symp(path);
    for (Patch& p : patches) p = extract_patch(shape, p.center, p.size, p.metric);
    return patches;
  }
  return sample_patch_set(shape, cfg.patch_sizes, cfg.patch_counts, cfg.seed, cfg.patch_metric).patches;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  std::optional<std::size_t> restarts;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "base random seed");
    app->add_option("--parallelism,-j", parallelism, "worker threads");
    app->add_option("--restarts", restarts, "ICP restarts per distance");
  }
  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
    if (seed) c.seed = *seed;
    if (parallelism) c.parallelism = *parallelism;
    if (restarts) c.icp.restarts = *restarts;
    c.icp.seed = c.seed;
    c.detect.seed = c.seed;
    return c;
  }
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Symmetry detection on point-sampled shapes"};
  app.name("symdetect");
  app.require_subcommand(1);
  std::function<void()> action;

  // sample
  Common c_sample;
  std::string s_in, s_out = "shape.syms";
  std::optional<std::size_t> s_points, s_centers;
  auto* sample = app.add_subcommand("sample", "sample a mesh into a SYMS point set");
  c_sample.attach(sample);
  sample->add_option("mesh", s_in, "OBJ or PLY mesh")->required()->check(CLI::ExistingFile);
  sample->add_option("-o,--output", s_out, "output SYMS file");
  sample->add_option("--points", s_points, "surface samples");
  sample->add_option("--centers", s_centers, "FPS patch centers");
  sample->callback([&] {
    action = [&] {
      RunConfig cfg = c_sample.resolve();
      if (s_points) cfg.points = *s_points;
      if (s_centers) cfg.centers = *s_centers;
      const SampledShape shape = sample_shape(load_shape(s_in), cfg.points, cfg.centers, cfg.seed, cfg.neighbor_k);
      write_syms(s_out, shape);
      out << shape.size() << " points, " << shape.centers.size() << " centers -> " << s_out << '\n';
    };
  });

  // patches
  Common c_patches;
  std::string p_in, p_out = "patches.symp", p_symb;
  std::vector<std::size_t> p_sizes, p_counts;
  std::string p_metric;
  auto* patches = app.add_subcommand("patches", "extract multi-size patches (SYMP, optional SYMB)");
  c_patches.attach(patches);
  patches->add_option("shape", p_in, "SYMS file")->required()->check(CLI::ExistingFile);
  patches->add_option("-o,--output", p_out, "output SYMP file");
  patches->add_option("--symb", p_symb, "also write normalized patches (SYMB)");
  patches->add_option("--sizes", p_sizes, "patch sizes in points")->delimiter(',');
  patches->add_option("--counts", p_counts, "patches per size")->delimiter(',');
  patches->add_option("--metric", p_metric, "geodesic or euclidean")->check(CLI::IsMember({"geodesic", "euclidean"}));
  patches->callback([&] {
    action = [&] {
      RunConfig cfg = c_patches.resolve();
      if (!p_sizes.empty()) cfg.patch_sizes = p_sizes;
      if (!p_counts.empty()) cfg.patch_counts = p_counts;
      if (!p_metric.empty()) cfg.patch_metric = p_metric == "geodesic" ? PatchMetric::geodesic : PatchMetric::euclidean;
      const SampledShape shape = read_syms(p_in, cfg.neighbor_k);
      const PatchSetResult set =
          sample_patch_set(shape, cfg.patch_sizes, cfg.patch_counts, cfg.seed, cfg.patch_metric);
      write_symp(p_out, set.patches);
      if (!p_symb.empty()) {
        std::vector<NormalizedPatch> normed;
        for (std::size_t i = 0; i < set.patches.size(); ++i)
          normed.push_back(normalize_patch(set.patches[i], shape, derive_seed(cfg.seed, i)));
        write_symb(p_symb, normed);
      }
      out << set.patches.size() << " patches (" << set.skipped << " centers skipped) -> " << p_out << '\n';
    };
  });

  // icpdist
  Common c_icp;
  std::string i_a, i_b;
  std::size_t i_points = 4096;
  auto* icpdist = app.add_subcommand("icpdist", "print the ICP distance between two shapes");
  c_icp.attach(icpdist);
  icpdist->add_option("a", i_a, "first shape (mesh, point PLY/OBJ or SYMS)")->required()->check(CLI::ExistingFile);
  icpdist->add_option("b", i_b, "second shape")->required()->check(CLI::ExistingFile);
  icpdist->add_option("--points", i_points, "surface samples when an input is a mesh");
  icpdist->callback([&] {
    action = [&] {
      const RunConfig cfg = c_icp.resolve();
      const PointCloud a = load_cloud(i_a, i_points, derive_seed(cfg.seed, 7));
      const PointCloud b = load_cloud(i_b, i_points, derive_seed(cfg.seed, 7));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", icp_distance(a, b, cfg.icp));
      out << buf << '\n';
    };
  });

  // matrix
  Common c_matrix;
  std::vector<std::string> m_in;
  std::string m_out = "matrix.symd", m_csv;
  std::size_t m_points = 4096;
  auto* matrix = app.add_subcommand(
      "matrix", "pairwise ICP distances (SYMD): either <shape.syms> <patches.symp>, or a list of part files");
  c_matrix.attach(matrix);
  matrix->add_option("inputs", m_in, "inputs")->required()->check(CLI::ExistingFile);
  matrix->add_option("-o,--output", m_out, "output SYMD file");
  matrix->add_option("--csv", m_csv, "also write the full matrix as CSV");
  matrix->add_option("--points", m_points, "surface samples per part mesh");
  matrix->callback([&] {
    action = [&] {
      const RunConfig cfg = c_matrix.resolve();
      std::vector<PointCloud> items;
      if (m_in.size() == 2 && fs::path(m_in[0]).extension() == ".syms" && fs::path(m_in[1]).extension() == ".symp") {
        const SampledShape shape = read_syms(m_in[0], cfg.neighbor_k);
        for (const Patch& p : load_or_sample_patches(m_in[1], shape, cfg))
          items.push_back(subset(shape.cloud, p.point_indices));
      } else {
        for (std::size_t k = 0; k < m_in.size(); ++k)
          items.push_back(load_cloud(m_in[k], m_points, derive_seed(cfg.seed, 100 + k)));
      }
      const MatrixResult r = distance_matrix(items, cfg.icp, cfg.parallelism);
      write_symd(m_out, r.matrix);
      if (!m_csv.empty()) write_matrix_csv(m_csv, r.matrix);
      for (const PairFailure& f : r.failures) err << "pair " << f.i << ',' << f.j << " failed: " << f.message << '\n';
      out << items.size() << " items, " << r.failures.size() << " failed pairs -> " << m_out << '\n';
    };
  });

  // detect
  Common c_detect;
  std::string d_features, d_shape, d_patches, d_out = "symmetries.json", d_ply;
  auto* detect = app.add_subcommand("detect", "detect symmetry hypotheses (JSON, optional PLYs)");
  c_detect.attach(detect);
  detect->add_option("--features", d_features, "SYMD distance matrix or SYME embeddings")
      ->required()
      ->check(CLI::ExistingFile);
  detect->add_option("shape", d_shape, "SYMS file")->required()->check(CLI::ExistingFile);
  detect->add_option("--patches", d_patches, "SYMP file the features refer to")->check(CLI::ExistingFile);
  detect->add_option("-o,--output", d_out, "output JSON");
  detect->add_option("--ply-dir", d_ply, "write one colored PLY per hypothesis here");
  detect->callback([&] {
    action = [&] {
      const RunConfig cfg = c_detect.resolve();
      const SampledShape shape = read_syms(d_shape, cfg.neighbor_k);
      const std::vector<Patch> patches = load_or_sample_patches(d_patches, shape, cfg);
      DetectResult r;
      if (fs::path(d_features).extension() == ".syme")
        r = detect_symmetries(shape, patches, read_syme(d_features), cfg.detect, cfg.icp, cfg.parallelism);
      else
        r = detect_symmetries(shape, patches, read_symd(d_features), cfg.detect, cfg.icp, cfg.parallelism);
      r.set.shape_ref = fs::path(d_shape).filename().string();
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
      write_symmetry_set(d_out, r.set);
      if (!d_ply.empty()) write_hypothesis_plys(d_ply, r.set, shape.cloud);
      out << r.clustering.cluster_count << " clusters, " << r.set.hypotheses.size() << " hypotheses -> " << d_out
          << '\n';
    };
  });

  // grow
  Common c_grow;
  std::string g_shape, g_set, g_prefix = "growth";
  std::optional<std::size_t> g_hyp;
  std::optional<double> g_threshold;
  std::optional<std::size_t> g_steps;
  auto* grow = app.add_subcommand("grow", "grow hypotheses along geodesics (CSV profile + PLY)");
  c_grow.attach(grow);
  grow->add_option("shape", g_shape, "SYMS file")->required()->check(CLI::ExistingFile);
  grow->add_option("symmetries", g_set, "JSON from detect")->required()->check(CLI::ExistingFile);
  grow->add_option("-o,--output-prefix", g_prefix, "writes <prefix>_<k>.csv and <prefix>_<k>.ply");
  grow->add_option("--hypothesis", g_hyp, "grow only this hypothesis");
  grow->add_option("--threshold", g_threshold, "pick the largest step with distance <= threshold");
  grow->add_option("--steps", g_steps, "grid steps");
  grow->callback([&] {
    action = [&] {
      RunConfig cfg = c_grow.resolve();
      if (g_steps) cfg.grow.steps = *g_steps;
      if (g_threshold) cfg.grow_threshold = *g_threshold;
      const SampledShape shape = read_syms(g_shape, cfg.neighbor_k);
      const SymmetrySet set = read_symmetry_set(g_set);
      for (std::size_t h = 0; h < set.hypotheses.size(); ++h) {
        if (g_hyp && *g_hyp != h) continue;
        const GrowthProfile p = grow_hypothesis(set.hypotheses[h], shape, cfg.icp, cfg.grow, cfg.parallelism);
        const std::size_t step = cfg.grow_threshold ? select_by_threshold(p, *cfg.grow_threshold) : p.selected;
        const std::string base = g_prefix + "_" + std::to_string(h);
        write_growth_csv(base + ".csv", p);
        write_growth_ply(base + ".ply", p, step, shape.cloud);
        char buf[96];
        std::snprintf(buf, sizeof buf, "hypothesis %zu: step %zu, delta_d %.6g, max d_ICP %.6g\n", h, step,
                      p.grid[step], p.max_distance[step]);
        out << buf;
      }
      if (g_hyp && *g_hyp >= set.hypotheses.size()) throw InputError("no such hypothesis");
    };
  });

  // bench
  Common c_bench;
  std::string b_dir, b_out = "report.json", b_csv, b_mode;
  auto* bench = app.add_subcommand("bench", "evaluate a dataset directory");
  c_bench.attach(bench);
  bench->add_option("dataset", b_dir, "dataset directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--mode", b_mode, "psb or pspsb")->check(CLI::IsMember({"psb", "pspsb"}));
  bench->add_option("-o,--output", b_out, "report JSON");
  bench->add_option("--csv", b_csv, "per-shape CSV");
  bench->callback([&] {
    action = [&] {
      RunConfig cfg = c_bench.resolve();
      if (!b_mode.empty()) cfg.bench_mode = b_mode == "psb" ? BenchMode::psb : BenchMode::pspsb;
      const BenchmarkReport r = run_benchmark(b_dir, cfg.bench());
      write_json_file(b_out, to_json(r));
      if (!b_csv.empty()) write_report_csv(b_csv, r);
      out << r.rows.size() << " shapes, " << r.micro.models << " with detections -> " << b_out << '\n';
    };
  });

  // converge
  Common c_conv;
  std::vector<std::string> v_in;
  std::string v_out = "convergence.csv";
  std::optional<std::size_t> v_trials, v_max;
  std::size_t v_points = 4096;
  auto* converge = app.add_subcommand("converge", "ICP distance versus restart count");
  c_conv.attach(converge);
  converge->add_option("inputs", v_in, "shapes")->required()->check(CLI::ExistingFile);
  converge->add_option("-o,--output", v_out, "output CSV");
  converge->add_option("--trials", v_trials, "random rotations per shape");
  converge->add_option("--max-restarts", v_max, "largest restart count");
  converge->add_option("--points", v_points, "surface samples when an input is a mesh");
  converge->callback([&] {
    action = [&] {
      RunConfig cfg = c_conv.resolve();
      if (v_trials) cfg.converge_trials = *v_trials;
      if (v_max) cfg.converge_restarts = *v_max;
      std::vector<PointCloud> items;
      for (std::size_t k = 0; k < v_in.size(); ++k)
        items.push_back(load_cloud(v_in[k], v_points, derive_seed(cfg.seed, 100 + k)));
      const ConvergenceTable t =
          convergence_study(items, cfg.converge_trials, cfg.converge_restarts, cfg.icp, cfg.parallelism);
      write_convergence_csv(v_out, t);
      out << items.size() << " shapes x " << cfg.converge_trials << " trials -> " << v_out << '\n';
    };
  });

  // serve
  Common c_serve;
  std::string sv_dir, sv_static, sv_host = "127.0.0.1";
  int sv_port = 8080;
  auto* serve = app.add_subcommand("serve", "annotation HTTP service");
  c_serve.attach(serve);
  serve->add_option("dataset", sv_dir, "dataset directory")->required()->check(CLI::ExistingDirectory);
  serve->add_option("--port", sv_port, "TCP port (0: any free port)");
  serve->add_option("--host", sv_host, "bind address");
  serve->add_option("--static", sv_static, "UI bundle served at /");
  serve->callback([&] {
    action = [&] {
      AnnotationService service(sv_dir, sv_static);
      const int port = service.bind(sv_host, sv_port);
      if (port < 0) throw InputError("cannot bind " + sv_host + ":" + std::to_string(sv_port));
      out << "listening on http://" << sv_host << ':' << port << '\n' << std::flush;
      service.listen();
    };
  });

  // export-pairs
  Common c_pairs;
  std::string e_shape, e_patches, e_out = "pairs.symb";
  std::optional<double> e_offset;
  auto* pairs = app.add_subcommand("export-pairs", "positive patch pairs for encoder training (SYMB, interleaved)");
  c_pairs.attach(pairs);
  pairs->add_option("shape", e_shape, "SYMS file")->required()->check(CLI::ExistingFile);
  pairs->add_option("--patches", e_patches, "SYMP base patches")->check(CLI::ExistingFile);
  pairs->add_option("-o,--output", e_out, "output SYMB");
  pairs->add_option("--offset", e_offset, "max center displacement as a fraction of patch radius");
  pairs->callback([&] {
    action = [&] {
      RunConfig cfg = c_pairs.resolve();
      if (e_offset) cfg.pair_offset = *e_offset;
      const SampledShape shape = read_syms(e_shape, cfg.neighbor_k);
      const std::vector<Patch> base = load_or_sample_patches(e_patches, shape, cfg);
      const ExportPairsResult r = export_pairs(shape, base, cfg.pair_offset, cfg.seed);
      write_pairs_symb(e_out, r.pairs);
      out << r.pairs.size() << " pairs (" << r.skipped << " skipped) -> " << e_out << '\n';
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }
  try {
    if (action) action();
    return 0;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace symdetect::cli
