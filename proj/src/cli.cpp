#include "aos/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "aos/config.hpp"
#include "aos/error.hpp"
#include "aos/io.hpp"
#include "aos/metrics.hpp"
#include "aos/perception.hpp"
#include "aos/render.hpp"
#include "aos/scene.hpp"
#include "aos/service.hpp"

namespace aos::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void add_config(CLI::App* sub) {
  sub->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  sub->add_option("--config", "YAML file with option values (command-line flags take precedence)");
}

// Appends "--key value" for every config-file key the command line leaves
// unset, so flags keep precedence over the file.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  if (args.empty()) return args;
  const CLI::App* sub = app.get_subcommand_no_throw(args.front());
  if (sub == nullptr) return args;
  std::optional<std::string> file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (!file) return args;
  if (!fs::is_regular_file(*file)) throw IoError("cannot open config file " + *file);
  const auto given_on_cli = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  std::vector<std::string> extra;
  for (const auto& [key, value] : config::load_flat_config(*file)) {
    const std::string flag = "--" + key;
    if (key == "config" || given_on_cli(flag)) continue;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (opt == nullptr) throw ValidationError("config file " + *file + ": unknown option '" + key + "'");
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

bool given(const CLI::Option* opt) { return opt->count() > 0; }

void require_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("output directory does not exist: " + dir.string());
}

void require_parent(const fs::path& file) {
  const fs::path parent = file.has_parent_path() ? file.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw IoError("output directory does not exist: " + parent.string());
}

fs::path sidecar_for(const fs::path& file) {
  fs::path p = file;
  p.replace_extension(".json");
  return p;
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

io::LoadedStack load_stack(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("stack directory does not exist: " + dir);
  return io::read_stack(dir);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scene = "preset1";
  std::uint64_t seed = 1;
  std::string out;
  double x_start = 0.0;
  double length = 14.0;
  double spacing = 0.5;
  double altitude = 26.0;
  double y = 0.0;
  double fov = 61.0;
  int width = 640;
  int height = 512;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* x_start_opt = nullptr;
  CLI::Option* y_opt = nullptr;
};

sim::SceneSpec resolve_scene(const std::string& scene, const std::optional<std::uint64_t>& seed) {
  if (auto spec = sim::preset_by_name(scene, seed.value_or(1))) return *spec;
  if (!fs::is_regular_file(scene)) {
    if (scene.rfind("preset", 0) == 0) {
      throw ValidationError("unknown preset '" + scene + "'", "preset in {preset1, preset2, preset3, preset4}");
    }
    throw IoError("scene '" + scene + "' is neither a preset (preset1..preset4) nor a readable file");
  }
  sim::SceneSpec spec = config::load_scene_spec(scene);
  if (seed) spec.seed = *seed;
  return spec;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const fs::path dir = a.out;
  require_dir(dir);
  const sim::SceneSpec spec =
      resolve_scene(a.scene, given(a.seed_opt) ? std::optional<std::uint64_t>(a.seed) : std::nullopt);
  sim::ScanPath path = sim::default_path(spec);
  path.length = a.length;
  path.spacing = a.spacing;
  path.altitude = a.altitude;
  path.x_start = given(a.x_start_opt) ? a.x_start : spec.extent_x / 2.0 - a.length / 2.0;
  path.y = given(a.y_opt) ? a.y : spec.extent_y / 2.0;
  path.validate();
  const CameraIntrinsics intr{a.fov, a.width, a.height};
  intr.validate();

  const sim::Scene scene = sim::generate_scene(spec);
  const ScanStack stack = sim::render_scan(scene, path, intr);
  io::write_stack(dir, stack, &scene);

  json prov = {
      {"command", "simulate"},
      {"config",
       {{"scene", a.scene}, {"seed", spec.seed}, {"x_start", path.x_start}, {"length", path.length},
        {"spacing", path.spacing}, {"altitude", path.altitude}, {"y", path.y}, {"fov", intr.fov_deg},
        {"width", intr.width}, {"height", intr.height}}},
      {"outputs",
       {{"frames", stack.size()}, {"poses", io::kPosesFile}, {"scene", io::kSceneFile},
        {"occluders", scene.occluders().size()}}},
  };
  write_json(dir / "simulate.json", prov);
  out << "wrote " << stack.size() << " frames to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct IntegrateArgs {
  std::string stack;
  std::string out;
  double u = 0.0;
  double a = 0.0;
  double h = 0.0;
  CLI::Option* u_opt = nullptr;
  CLI::Option* a_opt = nullptr;
  CLI::Option* h_opt = nullptr;
};

int cmd_integrate(const IntegrateArgs& args, std::ostream& out) {
  const fs::path file = args.out;
  require_parent(file);
  const io::LoadedStack loaded = load_stack(args.stack);
  render::IntegralRequest req = render::default_integral(loaded.stack);
  if (given(args.u_opt)) req.u = args.u;
  if (given(args.a_opt)) req.a = args.a;
  if (given(args.h_opt)) req.h = args.h;
  req = req.canonical();

  const auto image = render::render_integral(loaded.stack, req);
  io::write_file(file, io::encode_radiance_png(image.image));
  json prov = {
      {"command", "integrate"},
      {"stack", args.stack},
      {"config", {{"u", req.u}, {"a", req.a}, {"h", req.h}}},
      {"key", req.key()},
      {"frames", image.frame_indices},
      {"output", file.filename().string()},
  };
  write_json(sidecar_for(file), prov);
  out << "integrated " << image.frame_count() << " frames (u=" << g6(req.u) << " a=" << g6(req.a)
      << " h=" << g6(req.h) << ") into " << file.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct StereoArgs {
  std::string stack;
  std::string out;
  double u = 0.0;
  double a = 2.0;
  double ef = 1.0;
  double h = 0.0;
  std::string format = "all";
  CLI::Option* u_opt = nullptr;
  CLI::Option* h_opt = nullptr;
};

int cmd_stereo(const StereoArgs& args, std::ostream& out) {
  const fs::path dir = args.out;
  require_dir(dir);
  const io::LoadedStack loaded = load_stack(args.stack);
  render::StereoRequest req = render::default_stereo(loaded.stack);
  if (given(args.u_opt)) req.u = args.u;
  if (given(args.h_opt)) req.h = args.h;
  req.a = args.a;
  req.ef = args.ef;
  req = req.canonical();

  const auto pair = render::render_stereo(loaded.stack, req);
  json outputs = json::array();
  const auto emit = [&](const std::string& name, const io::Bytes& bytes) {
    io::write_file(dir / name, bytes);
    outputs.push_back(name);
  };
  emit("left.png", io::encode_radiance_png(pair.left.image));
  emit("right.png", io::encode_radiance_png(pair.right.image));
  if (args.format == "all" || args.format == "sbs") {
    emit("sbs.png", io::encode_display_png(integral::compose_display(pair, integral::DisplayMode::side_by_side)));
  }
  if (args.format == "all" || args.format == "anaglyph") {
    emit("anaglyph.png", io::encode_display_png(integral::compose_display(pair, integral::DisplayMode::anaglyph)));
  }
  const integral::DisplayRange range = integral::display_range(pair);

  json prov = {
      {"command", "stereo"},
      {"stack", args.stack},
      {"config", {{"u", req.u}, {"a", req.a}, {"ef", req.ef}, {"h", req.h}, {"format", args.format}}},
      {"left_frames", pair.left.frame_indices},
      {"right_frames", pair.right.frame_indices},
      {"anaglyph_range", {{"lo", range.lo}, {"hi", range.hi}}},
      {"outputs", outputs},
  };

  if (loaded.ground_truth && !loaded.ground_truth->targets().empty()) {
    std::vector<metrics::DisparityMeasurement> rows;
    json targets = json::array();
    const double f = loaded.stack.intrinsics().focal_px();
    for (std::size_t t = 0; t < loaded.ground_truth->targets().size(); ++t) {
      metrics::DisparityMeasurement m;
      try {
        m = metrics::measured_disparity(pair, metrics::target_core_rect(*loaded.ground_truth, t, pair.left));
      } catch (const ValidationError&) {
        // target too small or outside the overlap at this resolution
      }
      rows.push_back(m);
      const double ht = loaded.ground_truth->targets()[t].height;
      const double expected = -metrics::expected_disparity_px(f, req.ef, req.h, ht);
      targets.push_back({{"target", t}, {"height", ht}, {"expected_px", expected},
                         {"measured_px", m.disparity_px ? json(*m.disparity_px) : json(nullptr)},
                         {"confidence", m.confidence}});
      out << "target " << t << " (h_t=" << g6(ht) << " m): expected " << g6(expected) << " px, measured "
          << (m.disparity_px ? g6(*m.disparity_px) : std::string("none")) << " px, confidence "
          << g6(m.confidence) << "\n";
    }
    std::ostringstream csv;
    metrics::write_disparity_csv(csv, rows);
    io::write_text(dir / "disparity.csv", csv.str());
    prov["disparity"] = targets;
    prov["outputs"].push_back("disparity.csv");
  }
  write_json(dir / "stereo.json", prov);
  out << "wrote stereo pair (u=" << g6(req.u) << " a=" << g6(req.a) << " e_f=" << g6(req.ef)
      << " h=" << g6(req.h) << ") to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PerceptionArgs {
  std::string heights = "0.3,1.8,21";
  std::string baselines = "0:8:0.5";
  double vf = 26.0;
  double fov_f = 61.0;
  double ed = 0.065;
  double vd = 2.4852;
  double fov_d = 68.0;
  double acuity = 6.0;
  double limit = 1.0;
  double separation = 60.0;
  std::string out = "-";
  bool summary = false;
};

int cmd_perception(const PerceptionArgs& args, std::ostream& out) {
  const auto heights = parse_grid(args.heights);
  const auto baselines = parse_grid(args.baselines);
  const perception::CaptureGeometry cap{args.vf, 1.0, args.fov_f};
  const perception::DisplayModel disp{args.ed, args.vd, args.fov_d};
  const perception::ObserverModel obs{args.acuity, args.limit, args.separation};
  if (args.out != "-") require_parent(args.out);

  const auto table = perception::feasibility_region(cap, disp, obs, heights, baselines);
  std::ostringstream csv;
  perception::write_feasibility_csv(csv, table);
  if (args.out == "-") {
    out << csv.str();
  } else {
    io::write_text(args.out, csv.str());
    json prov = {
        {"command", "perception"},
        {"config",
         {{"ht", heights}, {"ef", baselines}, {"vf", args.vf}, {"fov_f", args.fov_f}, {"ed", args.ed},
          {"vd", args.vd}, {"fov_d", args.fov_d}, {"acuity", args.acuity}, {"limit", args.limit},
          {"separation", args.separation}}},
        {"rows", table.rows.size()},
    };
    write_json(sidecar_for(args.out), prov);
  }
  if (args.summary) {
    out << "JDDI " << g6(perception::jddi(obs, disp)) << " m\n";
    for (double ht : heights) {
      const auto det = perception::detectable_baseline(cap, disp, obs, ht);
      const auto fus = perception::max_fusible_baseline(cap, disp, obs, ht);
      out << "target " << g6(ht) << " m: depth detectable from e_f " << (det ? g6(*det) : std::string("never"))
          << " m, fusible up to e_f " << (fus ? g6(*fus) : std::string("any")) << " m\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string stack;
  std::string metric = "composite";
  std::string grid_ef = "0.5,1,1.5,2,3,4";
  std::string grid_a = "0.5,1,2,4,6,8";
  double u = 0.0;
  double h = 0.0;
  std::size_t target = 0;
  std::string out = "-";
  CLI::Option* u_opt = nullptr;
  CLI::Option* h_opt = nullptr;
};

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
  const auto metric = metrics::parse_sweep_metric(args.metric);
  if (!metric) {
    throw ValidationError("unknown metric '" + args.metric + "'",
                          "metric in {confidence, rivalry, suppression, composite}");
  }
  const auto baselines = parse_grid(args.grid_ef);
  const auto apertures = parse_grid(args.grid_a);
  if (args.out != "-") require_parent(args.out);
  const io::LoadedStack loaded = load_stack(args.stack);
  if (!loaded.ground_truth) {
    throw UnsupportedError("sweep metrics need scene ground truth (" + std::string(io::kSceneFile) +
                           ") in the stack directory");
  }
  if (args.target >= loaded.ground_truth->targets().size()) {
    throw ValidationError("target index " + std::to_string(args.target) + " out of range");
  }
  metrics::SweepSetup setup;
  setup.metric = *metric;
  setup.center = given(args.u_opt) ? render::canonical(args.u) : loaded.stack.path_center();
  setup.focal_distance = given(args.h_opt) ? render::canonical(args.h) : loaded.stack.altitude();
  setup.ground_truth = &*loaded.ground_truth;
  setup.target_index = args.target;
  render::check_viewpoint(loaded.stack, setup.center);

  const auto grid = metrics::parameter_sweep(loaded.stack, setup, baselines, apertures);
  std::ostringstream csv;
  metrics::write_sweep_csv(csv, grid);
  const auto best = grid.argmax();
  if (args.out == "-") {
    out << csv.str();
  } else {
    io::write_text(args.out, csv.str());
  }
  json prov = {
      {"command", "sweep"},
      {"stack", args.stack},
      {"config",
       {{"metric", args.metric}, {"ef", baselines}, {"a", apertures}, {"u", setup.center},
        {"h", setup.focal_distance}, {"target", args.target}}},
  };
  if (best) {
    prov["argmax"] = {{"e_f", grid.baselines[best->baseline_index]},
                      {"a", grid.apertures[best->aperture_index]},
                      {"value", best->value}};
    out << "argmax " << grid.metric << ": e_f=" << g6(grid.baselines[best->baseline_index])
        << " a=" << g6(grid.apertures[best->aperture_index]) << " value=" << g6(best->value) << "\n";
  } else {
    prov["argmax"] = nullptr;
    out << "argmax " << grid.metric << ": no feasible cell\n";
  }
  if (args.out != "-") write_json(sidecar_for(args.out), prov);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PlaneSweepArgs {
  std::string stack;
  std::string out;
  double depth_min = 1.0;
  double depth_max = 0.0;
  double step = 0.1;
  int radius = 2;
  int min_views = 3;
  double reference_x = 0.0;
  double tolerance = 0.3;
  CLI::Option* depth_max_opt = nullptr;
  CLI::Option* reference_opt = nullptr;
};

int cmd_planesweep(const PlaneSweepArgs& args, std::ostream& out) {
  const fs::path dir = args.out;
  require_dir(dir);
  const io::LoadedStack loaded = load_stack(args.stack);
  metrics::PlaneSweepOptions opts;
  opts.depth_min = args.depth_min;
  opts.depth_max = given(args.depth_max_opt) ? args.depth_max : loaded.stack.altitude();
  opts.step = args.step;
  opts.aggregation_radius = args.radius;
  opts.min_views = args.min_views;
  if (given(args.reference_opt)) opts.reference_x = args.reference_x;

  const metrics::DepthMap map = metrics::plane_sweep_depth(loaded.stack, opts);
  io::write_file(dir / "depth.png", io::encode_depth_png(map));
  io::write_file(dir / "score.png", io::encode_radiance_png(map.score));

  json prov = {
      {"command", "planesweep"},
      {"stack", args.stack},
      {"config",
       {{"depth_min", opts.depth_min}, {"depth_max", opts.depth_max}, {"step", opts.step},
        {"radius", opts.aggregation_radius}, {"min_views", opts.min_views}, {"reference_x", map.reference.x},
        {"tolerance", args.tolerance}}},
      {"outputs", {"depth.png", "score.png"}},
  };
  if (loaded.ground_truth) {
    json targets = json::array();
    for (std::size_t t = 0; t < loaded.ground_truth->targets().size(); ++t) {
      const auto loc = metrics::localize_target(map, *loaded.ground_truth, t, args.tolerance);
      targets.push_back({{"target", t}, {"true_height", loc.true_height},
                         {"estimated_height", loc.estimated_height}, {"height_error", loc.height_error},
                         {"median_score", loc.median_score}, {"baseline_score", loc.baseline_score},
                         {"pixels", loc.pixels}, {"localized", loc.localized}});
      out << "target " << t << ": height " << g6(loc.estimated_height) << " m (true " << g6(loc.true_height)
          << "), score " << g6(loc.median_score) << " vs baseline " << g6(loc.baseline_score) << ": "
          << (loc.localized ? "localized" : "not localized") << "\n";
    }
    prov["targets"] = targets;
  }
  write_json(dir / "planesweep.json", prov);
  out << "wrote depth map to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ServeArgs {
  std::string data = "data";
  int port = 8080;
  std::string host = "127.0.0.1";
  std::size_t cache = 64;
  std::string static_dir;
};

service::ViewerService* g_running = nullptr;

extern "C" void handle_interrupt(int) {
  if (g_running) g_running->stop();
}

int cmd_serve(const ServeArgs& args, std::ostream& out) {
  if (args.port < 0 || args.port > 65535) throw ValidationError("port must lie in [0, 65535]");
  service::ViewerService svc(service::load_stacks(args.data), args.cache);
  std::optional<fs::path> static_dir;
  if (!args.static_dir.empty()) static_dir = args.static_dir;
  g_running = &svc;
  std::signal(SIGINT, handle_interrupt);
  std::signal(SIGTERM, handle_interrupt);
  const bool ok = svc.serve(args.host, args.port, static_dir, [&](int port) {
    out << "serving " << args.data << " on http://" << args.host << ":" << port << "\n" << std::flush;
  });
  g_running = nullptr;
  if (!ok) throw IoError("cannot bind " + args.host + ":" + std::to_string(args.port));
  return kExitOk;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const auto number = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
      throw ValidationError("grid '" + text + "' holds a non-numeric entry '" + s + "'",
                            "grid is 'v1,v2,...' or 'start:stop:step'");
    }
    return v;
  };
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ValidationError("grid range '" + text + "' needs start:stop:step");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw ValidationError("grid range '" + text + "' needs step > 0 and stop >= start");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) values.push_back(start + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(number(item));
  }
  if (values.empty()) throw ValidationError("grid '" + text + "' is empty");
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Airborne optical sectioning: simulate, integrate, view and evaluate synthetic-aperture scans"};
  app.name("aos");
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Render a scan stack of a scene preset or spec file");
  add_config(simulate);
  simulate->add_option("--scene", sim_args.scene, "preset1..preset4 or a YAML scene file")->capture_default_str();
  sim_args.seed_opt = simulate->add_option("--seed", sim_args.seed, "Scene seed (overrides the scene's)");
  simulate->add_option("--out", sim_args.out, "Existing output directory")->required();
  sim_args.x_start_opt = simulate->add_option("--x-start", sim_args.x_start, "First pose x (default: centered)");
  simulate->add_option("--length", sim_args.length, "Path length in meters")->capture_default_str();
  simulate->add_option("--spacing", sim_args.spacing, "Pose spacing in meters")->capture_default_str();
  simulate->add_option("--altitude", sim_args.altitude, "Flight altitude above ground")->capture_default_str();
  sim_args.y_opt = simulate->add_option("--y", sim_args.y, "Path y (default: scene center)");
  simulate->add_option("--fov", sim_args.fov, "Camera field of view in degrees")->capture_default_str();
  simulate->add_option("--width", sim_args.width, "Image width in pixels")->capture_default_str();
  simulate->add_option("--height", sim_args.height, "Image height in pixels")->capture_default_str();

  IntegrateArgs int_args;
  auto* integrate = app.add_subcommand("integrate", "Integral image of a stack");
  add_config(integrate);
  integrate->add_option("--stack", int_args.stack, "Stack directory")->required();
  integrate->add_option("--out", int_args.out, "Output PNG")->required();
  int_args.u_opt = integrate->add_option("--u", int_args.u, "Viewpoint (default: path center)");
  int_args.a_opt = integrate->add_option("--a", int_args.a, "Aperture (default: 14 m or the path length)");
  int_args.h_opt = integrate->add_option("--h", int_args.h, "Focal distance (default: altitude)");

  StereoArgs st_args;
  auto* stereo = app.add_subcommand("stereo", "Integral stereo pair and display composites");
  add_config(stereo);
  stereo->add_option("--stack", st_args.stack, "Stack directory")->required();
  stereo->add_option("--out", st_args.out, "Existing output directory")->required();
  st_args.u_opt = stereo->add_option("--u", st_args.u, "Viewpoint (default: path center)");
  stereo->add_option("--a", st_args.a, "Aperture per eye")->capture_default_str();
  stereo->add_option("--ef", st_args.ef, "Camera baseline e_f")->capture_default_str();
  st_args.h_opt = stereo->add_option("--h", st_args.h, "Focal distance (default: altitude)");
  stereo->add_option("--format", st_args.format, "Composites to write")
      ->check(CLI::IsMember({"all", "sbs", "anaglyph"}))
      ->capture_default_str();

  PerceptionArgs pe_args;
  auto* perception = app.add_subcommand("perception", "Perceived-depth feasibility table");
  add_config(perception);
  perception->add_option("--ht", pe_args.heights, "Target heights (list or start:stop:step)")
      ->capture_default_str();
  perception->add_option("--grid-ef", pe_args.baselines, "Baselines e_f")->capture_default_str();
  perception->add_option("--vf", pe_args.vf, "Capture focal distance v_f")->capture_default_str();
  perception->add_option("--fov-f", pe_args.fov_f, "Camera FOV in degrees")->capture_default_str();
  perception->add_option("--ed", pe_args.ed, "Inter-ocular distance e_d")->capture_default_str();
  perception->add_option("--vd", pe_args.vd, "Display image distance v_d")->capture_default_str();
  perception->add_option("--fov-d", pe_args.fov_d, "Display horizontal FOV in degrees")->capture_default_str();
  perception->add_option("--acuity", pe_args.acuity, "Stereo acuity in arcmin")->capture_default_str();
  perception->add_option("--limit", pe_args.limit, "Disparity gradient limit")->capture_default_str();
  perception->add_option("--separation", pe_args.separation, "Object separation in arcmin")
      ->capture_default_str();
  perception->add_option("--out", pe_args.out, "CSV file or - for stdout")->capture_default_str();
  perception->add_flag("--summary", pe_args.summary, "Print per-target baseline limits");

  SweepArgs sw_args;
  auto* sweep = app.add_subcommand("sweep", "Evaluate a metric over an (e_f, a) grid");
  add_config(sweep);
  sweep->add_option("--stack", sw_args.stack, "Stack directory with ground truth")->required();
  sweep->add_option("--metric", sw_args.metric, "confidence, rivalry, suppression or composite")
      ->capture_default_str();
  sweep->add_option("--grid-ef", sw_args.grid_ef, "Baselines e_f")->capture_default_str();
  sweep->add_option("--grid-a", sw_args.grid_a, "Apertures a")->capture_default_str();
  sw_args.u_opt = sweep->add_option("--u", sw_args.u, "Viewpoint (default: path center)");
  sw_args.h_opt = sweep->add_option("--h", sw_args.h, "Focal distance (default: altitude)");
  sweep->add_option("--target", sw_args.target, "Target index")->capture_default_str();
  sweep->add_option("--out", sw_args.out, "CSV file or - for stdout")->capture_default_str();

  PlaneSweepArgs ps_args;
  auto* planesweep = app.add_subcommand("planesweep", "Plane-sweep depth map of a stack");
  add_config(planesweep);
  planesweep->add_option("--stack", ps_args.stack, "Stack directory")->required();
  planesweep->add_option("--out", ps_args.out, "Existing output directory")->required();
  planesweep->add_option("--depth-min", ps_args.depth_min, "Nearest hypothesis below the cameras")
      ->capture_default_str();
  ps_args.depth_max_opt = planesweep->add_option("--depth-max", ps_args.depth_max, "Farthest (default: altitude)");
  planesweep->add_option("--step", ps_args.step, "Hypothesis spacing")->capture_default_str();
  planesweep->add_option("--radius", ps_args.radius, "Cost aggregation radius")->capture_default_str();
  planesweep->add_option("--min-views", ps_args.min_views, "Views needed per pixel")->capture_default_str();
  ps_args.reference_opt =
      planesweep->add_option("--reference-x", ps_args.reference_x, "Reference pose (default: nearest center)");
  planesweep->add_option("--tolerance", ps_args.tolerance, "Height tolerance for localization")
      ->capture_default_str();

  ServeArgs sv_args;
  auto* serve = app.add_subcommand("serve", "HTTP viewer service");
  add_config(serve);
  serve->add_option("--data", sv_args.data, "Directory of stack subdirectories")
      ->envname("AOS_DATA_DIR")
      ->capture_default_str();
  serve->add_option("--port", sv_args.port, "Port (0 picks a free one)")->envname("AOS_PORT")->capture_default_str();
  serve->add_option("--host", sv_args.host, "Bind address")->capture_default_str();
  serve->add_option("--cache", sv_args.cache, "Render cache entries")->capture_default_str();
  serve->add_option("--static", sv_args.static_dir, "Viewer bundle served at /");

  try {
    const std::vector<std::string> expanded = expand_config(app, args);
    std::vector<const char*> argv;
    argv.push_back("aos");
    for (const auto& a : expanded) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::FileError& e) {
      throw IoError(e.what());
    } catch (const CLI::ParseError& e) {
      throw ValidationError(e.what());
    }
    if (simulate->parsed()) return cmd_simulate(sim_args, out);
    if (integrate->parsed()) return cmd_integrate(int_args, out);
    if (stereo->parsed()) return cmd_stereo(st_args, out);
    if (perception->parsed()) return cmd_perception(pe_args, out);
    if (sweep->parsed()) return cmd_sweep(sw_args, out);
    if (planesweep->parsed()) return cmd_planesweep(ps_args, out);
    if (serve->parsed()) return cmd_serve(sv_args, out);
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what();
    if (!e.constraint().empty()) err << " (constraint: " << e.constraint() << ")";
    err << "\n";
    return kExitValidation;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace aos::cli
