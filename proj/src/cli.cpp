#include "ncpano/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ncpano/dataset.hpp"
#include "ncpano/error.hpp"
#include "ncpano/io.hpp"
#include "ncpano/metrics.hpp"
#include "ncpano/scene.hpp"
#include "ncpano/solvers.hpp"

namespace ncpano {

namespace {

namespace fs = std::filesystem;
using io::Json;
using io::format_number;

constexpr const char* kFooter = R"(Exit codes:
  0 success          1 usage            2 parse            3 I/O
  4 geometry-degenerate                 5 infeasible-layout
  6 segmentation     7 no-real-solution 8 invalid argument or out of range
  9 metric           10 generation      70 internal

CSV files (UTF-8, ',' separator, '.' decimal, header row; meters, radians):
  evaluate          iou3d,iou3d_u2s,ce,cen,scale_star
  evaluate batch    scene,status,iou3d,iou3d_u2s,ce,cen,scale_star,message
                    followed by 'mean' and 'median' rows over successful scenes
  bench scenes.csv  sigma_px,mode,scene,status,walls,iou3d,iou3d_u2s,ce,cen,
                    scale_star,message
  bench summary.csv sigma_px,mode,scenes,failures,mean_iou3d,mean_iou3d_u2s,
                    mean_ce,mean_cen
  iou3d is the volume IoU, iou3d_u2s the IoU after the best scale about the
  camera in [0.1, 10] (scale_star), ce the mean 3D corner distance in meters,
  cen = ce / ground-truth bounding-box diagonal. In bench means a failed scene
  counts as IoU 0; ce/cen means cover scenes whose corner counts match.
  status is 'ok' or the failure category.)";

struct CameraFlags {
  double radius = 0.5;
  int width = 1024;
  int height = 512;

  void add(CLI::App* app) {
    app->add_option("--radius", radius, "Optical-center circle radius, meters")
        ->capture_default_str();
    app->add_option("--width", width, "Panorama width, pixels")
        ->capture_default_str();
    app->add_option("--height", height, "Panorama height, pixels")
        ->capture_default_str();
  }
  CameraRig rig() const {
    CameraRig r{radius, width, height};
    r.validate();
    return r;
  }
  Json json() const {
    return {{"radius", radius}, {"width", width}, {"height", height}};
  }
};

struct DatasetFlags {
  std::size_t n = 650;
  std::string walls = "6:10";
  std::string mode = "manhattan";
  std::uint64_t seed = 7;
  double radius = 0.5;
  bool occluded = false;

  DatasetSpec spec() const {
    DatasetSpec s;
    s.n_layouts = n;
    const auto colon = walls.find(':');
    try {
      if (colon == std::string::npos) {
        s.walls_min = s.walls_max = std::stoi(walls);
      } else {
        s.walls_min = std::stoi(walls.substr(0, colon));
        s.walls_max = std::stoi(walls.substr(colon + 1));
      }
    } catch (const std::exception&) {
      fail(ErrorCode::kInvalidArgument,
           "--walls expects MIN:MAX, got '" + walls + "'");
    }
    s.mode = parse_mode(mode);
    s.seed = seed;
    s.camera_radius = radius;
    s.poses_per_layout = 1;
    s.allow_hidden_walls = occluded;
    return s;
  }
  Json json() const {
    return {{"n", n},         {"walls", walls},   {"mode", mode},
            {"seed", seed},   {"radius", radius}, {"occluded", occluded}};
  }
};

Json base_config(const std::string& command) {
  return {{"tool", "ncpano"}, {"command", command}};
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string layout_name(std::size_t index, int pose, int poses) {
  char buf[64];
  if (poses <= 1) {
    std::snprintf(buf, sizeof buf, "layout_%05zu.json", index);
  } else {
    std::snprintf(buf, sizeof buf, "layout_%05zu_p%d.json", index, pose);
  }
  return buf;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

SolverOptions solver_options(const std::string& method, int max_rays) {
  SolverOptions o;
  if (method == "svd") {
    o.method = NullSpaceMethod::kSvd;
  } else if (method != "compensated") {
    fail(ErrorCode::kInvalidArgument,
         "--method must be 'compensated' or 'svd', got '" + method + "'");
  }
  if (max_rays < 3) {
    fail(ErrorCode::kInvalidArgument, "--max-rays must be at least 3");
  }
  o.max_rays_per_line = max_rays;
  return o;
}

// Scene evaluation that degrades gracefully: IoU needs no correspondence,
// corner errors need equal corner counts.
struct SceneResult {
  std::string status = "ok";
  std::size_t walls = 0;
  std::optional<EvaluationReport> report;
  bool corners = false;
  std::string message;
};

SceneResult evaluate_scene(const Layout& pred, const Layout& gt) {
  SceneResult r;
  r.walls = pred.wall_count();
  EvaluationReport rep;
  rep.iou3d = iou3d(pred, gt);
  const ScaledIou u2s = iou3d_u2s(pred, gt);
  rep.iou3d_u2s = u2s.iou;
  rep.scale_star = u2s.scale;
  try {
    const CornerError ce = corner_error(pred, gt);
    rep.ce_meters = ce.ce;
    rep.cen = ce.cen;
    rep.corner_distances = ce.distances;
    r.corners = true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMetric) throw;
    r.message = e.what();
  }
  r.report = rep;
  return r;
}

std::string metric_cells(const SceneResult& r) {
  if (!r.report) return ",,,,";
  const EvaluationReport& e = *r.report;
  std::string s = format_number(e.iou3d) + "," + format_number(e.iou3d_u2s) + ",";
  s += r.corners ? format_number(e.ce_meters) + "," + format_number(e.cen) : ",";
  s += "," + format_number(e.scale_star);
  return s;
}

void write_config_sidecar(const fs::path& csv, const Json& config) {
  io::write_text(fs::path(csv.string() + ".config.json"), config.dump(2) + "\n");
}

struct ManifestEntry {
  std::string file;
  std::size_t index = 0;
  int pose = 0;
};

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  const Json j = io::parse_json(io::read_text(path), path.string());
  if (!j.contains("layouts") || !j.at("layouts").is_array()) {
    fail(ErrorCode::kParse, path.string() + ": missing 'layouts' array");
  }
  std::vector<ManifestEntry> out;
  try {
    for (const auto& e : j.at("layouts")) {
      out.push_back({e.at("file").get<std::string>(),
                     e.value("index", std::size_t{0}), e.value("pose", 0)});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return out;
}

// --- generate -------------------------------------------------------------

struct GenerateCmd {
  DatasetFlags data;
  int poses = 1;
  std::string out = "dataset";
  bool plot = false;

  void run(std::ostream& os) const {
    DatasetSpec spec = data.spec();
    spec.poses_per_layout = poses;
    spec.validate();
    Json config = base_config("generate");
    config["dataset"] = data.json();
    config["poses"] = poses;
    Json entries = Json::array();
    const fs::path dir(out);
    for (std::size_t i = 0; i < spec.n_layouts; ++i) {
      for (int p = 0; p < poses; ++p) {
        const Layout layout = generate_pose(spec, i, p);
        const std::string name = layout_name(i, p, poses);
        Json cfg = config;
        cfg["index"] = i;
        cfg["pose"] = p;
        io::write_layout(dir / name, layout, cfg);
        if (plot) {
          const fs::path svg = dir / (fs::path(name).stem().string() + ".svg");
          io::write_text(svg, io::floor_plan_svg(&layout, nullptr, name, cfg));
        }
        entries.push_back({{"file", name},
                           {"index", i},
                           {"pose", p},
                           {"walls", layout.wall_count()},
                           {"occluded", has_hidden_wall(layout)}});
      }
    }
    Json manifest;
    manifest["config"] = config;
    manifest["layouts"] = entries;
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    os << "generated " << entries.size() << " layouts in " << dir.string()
       << " (mode " << data.mode << ", seed " << data.seed << ")\n";
  }
};

// --- render ---------------------------------------------------------------

struct RenderCmd {
  std::string layout;
  CameraFlags camera;
  double noise_sigma = 0.0;
  std::uint64_t seed = 7;
  bool blur = false;
  std::string out = "observation.json";

  void run(std::ostream& os) const {
    const CameraRig rig = camera.rig();
    const Layout gt = io::read_layout(layout);
    gt.validate(rig.radius);
    BoundaryObservation obs = render_boundaries(gt, rig);
    if (noise_sigma > 0.0 || blur) {
      obs = add_noise(obs, NoiseOptions{noise_sigma, seed, blur});
    } else if (noise_sigma < 0.0) {
      fail(ErrorCode::kInvalidArgument, "--noise-sigma must be non-negative");
    }
    Json config = base_config("render");
    config["layout"] = layout;
    config["camera"] = camera.json();
    config["noise_sigma"] = noise_sigma;
    config["seed"] = seed;
    config["blur_corners"] = blur;
    io::write_observation(out, obs, config);
    os << "rendered " << rig.width << " columns to " << out << " (sigma "
       << format_number(noise_sigma) << " px, seed " << seed << ")\n";
  }
};

// --- solve ----------------------------------------------------------------

struct SolveCmd {
  std::string observation;
  std::string mode = "manhattan";
  std::string out = "solution.json";
  std::string diagnostics;
  std::string plot;
  std::string method = "compensated";
  int max_rays = 64;

  void run(std::ostream& os) const {
    const Mode m = parse_mode(mode);
    const SolverOptions options = solver_options(method, max_rays);
    const BoundaryObservation obs = io::read_observation(observation);
    const LayoutSolution sol = reconstruct_layout(obs, m, options);
    Json config = base_config("solve");
    config["observation"] = observation;
    config["mode"] = mode;
    config["method"] = method;
    config["max_rays"] = max_rays;
    const Layout layout = sol.layout();
    io::write_layout(out, layout, config);
    const fs::path diag_path =
        diagnostics.empty()
            ? fs::path(out).replace_extension(".diag.json")
            : fs::path(diagnostics);
    Json diag = io::diagnostics_to_json(sol);
    diag["config"] = config;
    io::write_text(diag_path, diag.dump(2) + "\n");
    if (!plot.empty()) {
      io::write_text(plot, io::floor_plan_svg(nullptr, &layout,
                                              "reconstruction " + observation,
                                              config));
    }
    os << "solved " << to_string(m) << " layout: " << sol.walls.size()
       << " walls, h_c " << format_number(sol.h_c) << " m, h_f "
       << format_number(sol.h_f) << " m, d =";
    for (const Wall& w : sol.walls) os << ' ' << format_number(w.d);
    os << "\nwrote " << out << " and " << diag_path.string() << "\n";
    for (const auto& w : sol.diagnostics.warnings) os << "warning: " << w << "\n";
  }
};

// --- evaluate -------------------------------------------------------------

struct EvaluateCmd {
  std::string pred;
  std::string gt;
  std::string manifest;
  std::string pred_dir;
  std::string out;
  std::string plot;

  void run(std::ostream& os) const {
    Json config = base_config("evaluate");
    if (!manifest.empty()) {
      run_batch(os, config);
      return;
    }
    if (pred.empty() || gt.empty()) {
      fail(ErrorCode::kInvalidArgument,
           "evaluate needs --pred and --gt, or --manifest and --pred-dir");
    }
    config["pred"] = pred;
    config["gt"] = gt;
    const Layout p = io::read_layout(pred);
    const Layout g = io::read_layout(gt);
    const EvaluationReport r = evaluate(p, g);
    std::ostringstream csv;
    csv << "iou3d,iou3d_u2s,ce,cen,scale_star\n"
        << format_number(r.iou3d) << ',' << format_number(r.iou3d_u2s) << ','
        << format_number(r.ce_meters) << ',' << format_number(r.cen) << ','
        << format_number(r.scale_star) << "\n";
    os << csv.str();
    if (!out.empty()) {
      io::write_text(out, csv.str());
      write_config_sidecar(out, config);
    }
    if (!plot.empty()) {
      io::write_text(plot, io::floor_plan_svg(&g, &p, "evaluation " + pred,
                                              config));
    }
  }

  void run_batch(std::ostream& os, Json config) const {
    if (pred_dir.empty()) {
      fail(ErrorCode::kInvalidArgument, "--manifest needs --pred-dir");
    }
    config["manifest"] = manifest;
    config["pred_dir"] = pred_dir;
    const fs::path gt_dir = fs::path(manifest).parent_path();
    std::ostringstream csv;
    csv << "scene,status,iou3d,iou3d_u2s,ce,cen,scale_star,message\n";
    std::vector<double> iou, u2s, ce, cen, scale;
    for (const auto& entry : read_manifest(manifest)) {
      SceneResult r;
      try {
        r = evaluate_scene(io::read_layout(fs::path(pred_dir) / entry.file),
                           io::read_layout(gt_dir / entry.file));
        iou.push_back(r.report->iou3d);
        u2s.push_back(r.report->iou3d_u2s);
        scale.push_back(r.report->scale_star);
        if (r.corners) {
          ce.push_back(r.report->ce_meters);
          cen.push_back(r.report->cen);
        }
      } catch (const Error& e) {
        r.status = std::string(to_string(e.code()));
        r.message = e.what();
      }
      csv << csv_quote(entry.file) << ',' << r.status << ',' << metric_cells(r)
          << ',' << csv_quote(r.message) << "\n";
    }
    const auto summary = [&](const char* name, auto stat) {
      csv << name << ",summary," << format_number(stat(iou)) << ','
          << format_number(stat(u2s)) << ',' << format_number(stat(ce)) << ','
          << format_number(stat(cen)) << ',' << format_number(stat(scale))
          << ",\n";
    };
    summary("mean", mean);
    summary("median", median);
    os << csv.str();
    if (!out.empty()) {
      io::write_text(out, csv.str());
      write_config_sidecar(out, config);
    }
  }
};

// --- bench ----------------------------------------------------------------

struct BenchCmd {
  DatasetFlags data{100, "6:10", "manhattan", 7, 0.5, false};
  std::string manifest;
  CameraFlags camera;
  std::vector<double> sigmas{0.0, 0.5, 1.0};
  std::string method = "compensated";
  int max_rays = 64;
  bool blur = false;
  std::string out = "bench";

  void run(std::ostream& os) const {
    const CameraRig rig = camera.rig();
    const Mode mode = parse_mode(data.mode);
    const SolverOptions options = solver_options(method, max_rays);
    for (double s : sigmas) {
      if (!(s >= 0.0)) {
        fail(ErrorCode::kInvalidArgument, "noise sigmas must be non-negative");
      }
    }

    std::vector<std::pair<std::string, Layout>> scenes;
    Json config = base_config("bench");
    if (!manifest.empty()) {
      config["manifest"] = manifest;
      const fs::path dir = fs::path(manifest).parent_path();
      for (const auto& e : read_manifest(manifest)) {
        scenes.emplace_back(e.file, io::read_layout(dir / e.file));
      }
    } else {
      DatasetSpec spec = data.spec();
      spec.camera_radius = rig.radius;
      spec.validate();
      config["dataset"] = data.json();
      for (std::size_t i = 0; i < spec.n_layouts; ++i) {
        scenes.emplace_back(layout_name(i, 0, 1), generate_layout(spec, i));
      }
    }
    config["camera"] = camera.json();
    config["noise_sigma"] = sigmas;
    config["mode"] = data.mode;
    config["method"] = method;
    config["max_rays"] = max_rays;
    config["blur_corners"] = blur;
    config["seed"] = data.seed;

    std::ostringstream rows;
    std::ostringstream summary;
    rows << "sigma_px,mode,scene,status,walls,iou3d,iou3d_u2s,ce,cen,"
            "scale_star,message\n";
    summary << "sigma_px,mode,scenes,failures,mean_iou3d,mean_iou3d_u2s,"
               "mean_ce,mean_cen\n";
    for (double sigma : sigmas) {
      std::vector<double> iou, u2s, ce, cen;
      std::size_t failures = 0;
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto& [name, gt] = scenes[i];
        SceneResult r;
        try {
          gt.validate(rig.radius);
          BoundaryObservation obs = render_boundaries(gt, rig);
          // One noise stream per scene, shared by every sigma.
          if (sigma > 0.0 || blur) {
            obs = add_noise(obs, NoiseOptions{sigma, mix_seed(data.seed ^ mix_seed(i)),
                                              blur});
          }
          const LayoutSolution sol = reconstruct_layout(obs, mode, options);
          r = evaluate_scene(sol.layout(), gt);
          if (r.corners) {
            ce.push_back(r.report->ce_meters);
            cen.push_back(r.report->cen);
          }
        } catch (const Error& e) {
          r.status = std::string(to_string(e.code()));
          r.message = e.what();
          ++failures;
        }
        iou.push_back(r.report ? r.report->iou3d : 0.0);
        u2s.push_back(r.report ? r.report->iou3d_u2s : 0.0);
        rows << format_number(sigma) << ',' << data.mode << ',' << csv_quote(name)
             << ',' << r.status << ',' << (r.report ? std::to_string(r.walls) : "")
             << ',' << metric_cells(r) << ',' << csv_quote(r.message) << "\n";
      }
      summary << format_number(sigma) << ',' << data.mode << ',' << scenes.size()
              << ',' << failures << ',' << format_number(mean(iou)) << ','
              << format_number(mean(u2s)) << ',' << format_number(mean(ce)) << ','
              << format_number(mean(cen)) << "\n";
    }
    const fs::path dir(out);
    io::write_text(dir / "scenes.csv", rows.str());
    io::write_text(dir / "summary.csv", summary.str());
    write_config_sidecar(dir / "scenes.csv", config);
    write_config_sidecar(dir / "summary.csv", config);
    os << summary.str();
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"ncpano: metric room layouts from non-central circular panoramas"};
  app.footer(kFooter);
  app.require_subcommand(1);

  GenerateCmd gen;
  auto* g = app.add_subcommand("generate", "Write a seeded synthetic layout dataset");
  g->add_option("--n", gen.data.n, "Number of layouts")->capture_default_str();
  g->add_option("--walls", gen.data.walls, "Wall count range MIN:MAX")
      ->capture_default_str();
  g->add_option("--mode", gen.data.mode, "manhattan | atlanta")
      ->capture_default_str();
  g->add_option("--seed", gen.data.seed, "Dataset seed")->capture_default_str();
  g->add_option("--radius", gen.data.radius,
                "Camera circle radius the rooms must clear, meters")
      ->capture_default_str();
  g->add_option("--poses", gen.poses, "Camera placements per layout")
      ->capture_default_str();
  g->add_flag("--occluded", gen.data.occluded,
              "Allow camera placements that cannot see every wall");
  g->add_flag("--plot", gen.plot, "Also write an SVG floor plan per layout");
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();

  RenderCmd ren;
  auto* r = app.add_subcommand("render", "Render boundary observations of a layout");
  r->add_option("layout", ren.layout, "Layout JSON file")->required();
  ren.camera.add(r);
  r->add_option("--noise-sigma", ren.noise_sigma, "Boundary noise, pixels")
      ->capture_default_str();
  r->add_option("--seed", ren.seed, "Noise seed")->capture_default_str();
  r->add_flag("--blur-corners", ren.blur, "Blur the corner probability");
  r->add_option("--out", ren.out, "Observation JSON file")->capture_default_str();

  SolveCmd sol;
  auto* s = app.add_subcommand("solve", "Reconstruct a scaled layout from an observation");
  s->add_option("observation", sol.observation, "Observation JSON file")->required();
  s->add_option("--mode", sol.mode, "manhattan | atlanta")->capture_default_str();
  s->add_option("--out", sol.out, "Layout JSON file")->capture_default_str();
  s->add_option("--diagnostics", sol.diagnostics,
                "Diagnostics JSON file (default: <out>.diag.json)");
  s->add_option("--plot", sol.plot, "SVG floor plan file");
  s->add_option("--method", sol.method, "Null-space method: compensated | svd")
      ->capture_default_str();
  s->add_option("--max-rays", sol.max_rays, "Rays per boundary line and wall")
      ->capture_default_str();

  EvaluateCmd ev;
  auto* e = app.add_subcommand("evaluate", "Compare a reconstruction with ground truth");
  e->add_option("--pred", ev.pred, "Predicted layout JSON");
  e->add_option("--gt", ev.gt, "Ground-truth layout JSON");
  e->add_option("--manifest", ev.manifest, "Dataset manifest for batch mode");
  e->add_option("--pred-dir", ev.pred_dir,
                "Directory of predictions named like the manifest entries");
  e->add_option("--out", ev.out, "CSV report file");
  e->add_option("--plot", ev.plot, "SVG overlay file (single mode)");

  BenchCmd bench;
  auto* b = app.add_subcommand("bench", "Render, solve and evaluate over a noise grid");
  b->add_option("--manifest", bench.manifest,
                "Dataset manifest (default: generate in memory)");
  b->add_option("--n", bench.data.n, "Number of generated layouts")
      ->capture_default_str();
  b->add_option("--walls", bench.data.walls, "Wall count range MIN:MAX")
      ->capture_default_str();
  b->add_option("--mode", bench.data.mode, "manhattan | atlanta")
      ->capture_default_str();
  b->add_option("--seed", bench.data.seed, "Dataset and noise seed")
      ->capture_default_str();
  b->add_flag("--occluded", bench.data.occluded,
              "Allow camera placements that cannot see every wall");
  bench.camera.add(b);
  b->add_option("--noise-sigma", bench.sigmas, "Noise grid, pixels (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("--method", bench.method, "Null-space method: compensated | svd")
      ->capture_default_str();
  b->add_option("--max-rays", bench.max_rays, "Rays per boundary line and wall")
      ->capture_default_str();
  b->add_flag("--blur-corners", bench.blur, "Blur the corner probability");
  b->add_option("--out", bench.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int rc = app.exit(pe, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (g->parsed()) gen.run(out);
    if (r->parsed()) ren.run(out);
    if (s->parsed()) sol.run(out);
    if (e->parsed()) ev.run(out);
    if (b->parsed()) {
      bench.data.radius = bench.camera.radius;
      bench.run(out);
    }
  } catch (const Error& ex) {
    err << "error (" << to_string(ex.code()) << "): " << ex.what() << "\n";
    return exit_code(ex.code());
  } catch (const std::exception& ex) {
    err << "error (internal): " << ex.what() << "\n";
    return exit_code(ErrorCode::kInternal);
  }
  return 0;
}

}  // namespace ncpano
