#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <regex>

#include "depthprop/depthprop.hpp"

namespace depthprop::cli {

namespace {

/// Bad flag combination detected before touching any file.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DilationSchedule require_schedule(const std::string& name, int iterations) {
  const auto variant = parse_schedule_variant(name);
  if (!variant) throw UsageError("unknown schedule '" + name + "' (expected c1, c2 or c4)");
  try {
    return schedule_c(*variant, iterations);
  } catch (const ValueError& e) {
    throw UsageError(e.what());
  }
}

struct RefineArgs {
  std::string schedule = "c2";
  int iterations = 12;
  std::string affinity;
  std::string input;
  std::string coarse;
  bool anchor = false;
  std::string impl = "accelerated";
  std::string output;
};

struct FuseArgs {
  std::string depth_cd, depth_dd, conf_cd, conf_dd, output;
};

struct BackprojectArgs {
  std::string input;
  std::optional<double> fx, fy, u0, v0;
  std::string calib;
  int pool = 1;
  std::string output;
};

struct GenAffinityArgs {
  std::string image;
  int kernel = 3;
  double sigma = 0.1;
  std::string output;
};

struct EvalArgs {
  std::string pred, gt;
};

struct BenchArgs {
  std::string shape = "1216x352";
  std::string schedule = "c1";
  int iterations = 12;
  std::string impl = "both";
  int runs = 5;
  int warmup = 2;
  std::uint64_t seed = bench::BenchOptions{}.seed;
  bool anchor = false;
  std::string json;
};

void cmd_refine(const RefineArgs& a, std::ostream& out) {
  const DilationSchedule schedule = require_schedule(a.schedule, a.iterations);
  if (a.impl != "accelerated" && a.impl != "naive") {
    throw UsageError("--impl must be 'accelerated' or 'naive', got '" + a.impl + "'");
  }
  if (a.anchor && a.input.empty()) throw UsageError("--anchor requires --input (sparse map)");
  if (a.coarse.empty() && a.input.empty()) {
    throw UsageError("refine needs --coarse, or --input to build the initial map from");
  }

  const AffinityField field = io::affinity_from_container(io::read_planes(a.affinity));
  std::optional<DepthGrid> sparse;
  if (!a.input.empty()) sparse = io::read_depth_png(a.input);
  const DepthGrid d0 = a.coarse.empty() ? nearest_valid_fill(*sparse) : io::read_depth_png(a.coarse);

  PropagationConfig config{schedule, std::nullopt};
  if (a.anchor) config.anchor = *sparse;
  const DepthGrid refined = a.impl == "naive" ? propagate_naive(d0, field, config)
                                              : propagate_accelerated(d0, field, config);
  io::write_depth_png(refined, a.output);
  out << "refined " << d0.shape().str() << " with " << a.schedule << " " << schedule.str()
      << (a.anchor ? " anchored" : "") << " -> " << a.output << "\n";
}

void cmd_fuse(const FuseArgs& a, std::ostream& out) {
  const DepthGrid cd = io::read_depth_png(a.depth_cd);
  const DepthGrid dd = io::read_depth_png(a.depth_dd);
  const ScalarPlane ccd = io::single_plane(io::read_planes(a.conf_cd));
  const ScalarPlane cdd = io::single_plane(io::read_planes(a.conf_dd));
  io::write_depth_png(fuse(cd, dd, ccd, cdd), a.output);
  out << "fused " << cd.shape().str() << " -> " << a.output << "\n";
}

void cmd_backproject(const BackprojectArgs& a, std::ostream& out) {
  const int given = a.fx.has_value() + a.fy.has_value() + a.u0.has_value() + a.v0.has_value();
  if (!a.calib.empty() && given > 0) throw UsageError("use either --calib or --fx/--fy/--u0/--v0");
  if (a.calib.empty() && given != 4) {
    throw UsageError("intrinsics need all of --fx --fy --u0 --v0, or --calib");
  }
  if (a.pool < 1) throw UsageError("--pool must be >= 1");

  CameraIntrinsics k = a.calib.empty() ? CameraIntrinsics(*a.fx, *a.fy, *a.u0, *a.v0)
                                       : io::read_kitti_calib(a.calib);
  DepthGrid depth = io::read_depth_png(a.input);
  if (a.pool > 1) {
    depth = min_pool(depth, a.pool);
    k = scale_intrinsics(k, a.pool);
  }
  const PositionMap pm = back_project(depth, k);
  io::write_planes(io::PlaneContainer{static_cast<std::uint32_t>(depth.height()),
                                      static_cast<std::uint32_t>(depth.width()),
                                      {pm.x, pm.y, pm.z}},
                   a.output);
  out << "position map " << depth.shape().str() << " (X, Y, Z) -> " << a.output << "\n";
}

void cmd_gen_affinity(const GenAffinityArgs& a, std::ostream& out) {
  if (a.kernel < 3 || a.kernel % 2 == 0) throw UsageError("--kernel must be odd and >= 3");
  if (!(a.sigma > 0.0)) throw UsageError("--sigma must be positive");
  const AffinityField field = guided_affinity(io::read_rgb_png(a.image), a.kernel, a.sigma);
  io::write_planes(io::to_container(field), a.output);
  out << "affinity " << field.shape().str() << " k=" << a.kernel << " (" << field.planes().size()
      << " planes) -> " << a.output << "\n";
}

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  const MetricReport r = evaluate(io::read_depth_png(a.pred), io::read_depth_png(a.gt));
  out << std::fixed << std::setprecision(6) << "rmse_mm=" << r.rmse_mm << " mae_mm=" << r.mae_mm
      << " irmse_per_km=" << r.irmse_per_km << " imae_per_km=" << r.imae_per_km
      << " valid_count=" << r.valid_count << "\n";
  out << std::setprecision(3);
  out << "  metric          value\n";
  out << "  RMSE [mm]   " << std::setw(10) << r.rmse_mm << "\n";
  out << "  MAE [mm]    " << std::setw(10) << r.mae_mm << "\n";
  out << "  iRMSE [1/km]" << std::setw(10) << r.irmse_per_km << "\n";
  out << "  iMAE [1/km] " << std::setw(10) << r.imae_per_km << "\n";
  out << "  valid px    " << std::setw(10) << r.valid_count << "\n";
}

Shape parse_bench_shape(const std::string& text) {
  // WIDTHxHEIGHT, image convention (KITTI frames are 1216x352).
  static const std::regex pattern(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) {
    throw UsageError("--shape must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  const Shape shape{std::stoi(m[2]), std::stoi(m[1])};
  if (shape.height < 8 || shape.width < 8) throw UsageError("--shape must be at least 8x8");
  return shape;
}

nlohmann::json to_json(const bench::BenchResult& r, std::string_view variant) {
  return {{"label", r.label},
          {"grid_shape", {r.grid_shape.height, r.grid_shape.width}},
          {"schedule", std::string(variant) + " " + r.schedule},
          {"iterations", r.iterations},
          {"median_seconds", r.median_seconds},
          {"runs", r.runs},
          {"samples", r.samples}};
}

double max_relative_difference(const DepthGrid& a, const DepthGrid& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.values()[i], y = b.values()[i];
    const double scale = std::max({std::abs(x), std::abs(y), 1e-12});
    worst = std::max(worst, std::abs(x - y) / scale);
  }
  return worst;
}

void cmd_bench(const BenchArgs& a, std::ostream& out) {
  const Shape shape = parse_bench_shape(a.shape);
  const DilationSchedule schedule = require_schedule(a.schedule, a.iterations);
  if (a.impl != "naive" && a.impl != "accelerated" && a.impl != "both") {
    throw UsageError("--impl must be naive, accelerated or both");
  }
  if (a.runs < 5) throw UsageError("--runs must be >= 5");
  if (a.warmup < 2) throw UsageError("--warmup must be >= 2");

  bench::BenchOptions options;
  options.warmup_runs = a.warmup;
  options.timed_runs = a.runs;
  options.seed = a.seed;
  options.anchor = a.anchor;
  const bench::BenchInputs inputs = bench::make_inputs(shape, schedule, options);

  std::vector<bench::BenchResult> results;
  nlohmann::json report;
  if (a.impl == "both") {
    DepthGrid naive_out, fast_out;
    auto [naive, fast] = bench::run_paired(inputs, bench::Impl::Naive, inputs,
                                           bench::Impl::Accelerated, options, &naive_out, &fast_out);
    results = {naive, fast};
    report["speedup"] = naive.median_seconds / fast.median_seconds;
    report["max_relative_difference"] = max_relative_difference(naive_out, fast_out);
  } else {
    results.push_back(bench::run_bench(
        inputs, a.impl == "naive" ? bench::Impl::Naive : bench::Impl::Accelerated, options));
  }

  out << "grid " << shape.height << "x" << shape.width << " (HxW), schedule " << a.schedule << " "
      << inputs.config.schedule.str() << ", " << options.timed_runs << " timed runs after "
      << options.warmup_runs << " warmup\n";
  for (const auto& r : results) {
    out << "  " << std::left << std::setw(12) << r.label << std::right << std::fixed
        << std::setprecision(6) << r.median_seconds << " s (median)\n";
    report["results"].push_back(to_json(r, a.schedule));
  }
  if (report.contains("speedup")) {
    out << "  speedup     " << std::setprecision(2) << report["speedup"].get<double>() << "x\n";
  }
  if (!a.json.empty()) {
    std::ofstream file(a.json);
    if (!file) throw FormatError("cannot open " + a.json + " for writing");
    file << report.dump(2) << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth refinement by dilated convolutional spatial propagation", "depthprop"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (default: all cores)");

  RefineArgs refine;
  auto* sub = app.add_subcommand("refine", "Refine a coarse depth map by spatial propagation");
  sub->add_option("--schedule", refine.schedule, "Dilation schedule: c1, c2 or c4")
      ->capture_default_str();
  sub->add_option("--iterations", refine.iterations, "Total propagation iterations")
      ->capture_default_str();
  sub->add_option("--affinity", refine.affinity, "Affinity plane container")->required();
  sub->add_option("--input", refine.input, "Sparse depth PNG");
  sub->add_option("--coarse", refine.coarse, "Dense initial depth PNG");
  sub->add_flag("--anchor", refine.anchor, "Reset valid sparse pixels after every iteration");
  sub->add_option("--impl", refine.impl, "accelerated or naive")->capture_default_str();
  sub->add_option("--output", refine.output, "Refined depth PNG")->required();
  sub->fallthrough();

  FuseArgs fuse_args;
  sub = app.add_subcommand("fuse", "Confidence-weighted fusion of two depth maps");
  sub->add_option("--cd", fuse_args.depth_cd, "First depth PNG")->required();
  sub->add_option("--dd", fuse_args.depth_dd, "Second depth PNG")->required();
  sub->add_option("--conf-cd", fuse_args.conf_cd, "Confidence logits for --cd")->required();
  sub->add_option("--conf-dd", fuse_args.conf_dd, "Confidence logits for --dd")->required();
  sub->add_option("--output", fuse_args.output, "Fused depth PNG")->required();
  sub->fallthrough();

  BackprojectArgs bp;
  sub = app.add_subcommand("backproject", "Compute the (X, Y, Z) position map of a depth PNG");
  sub->add_option("--input", bp.input, "Depth PNG")->required();
  sub->add_option("--fx", bp.fx, "Focal length x [px]");
  sub->add_option("--fy", bp.fy, "Focal length y [px]");
  sub->add_option("--u0", bp.u0, "Principal point u [px]");
  sub->add_option("--v0", bp.v0, "Principal point v [px]");
  sub->add_option("--calib", bp.calib, "KITTI calibration file (P2 row)");
  sub->add_option("--pool", bp.pool, "Min-pool factor applied before back-projection")
      ->capture_default_str();
  sub->add_option("--output", bp.output, "Three-plane container (X, Y, Z)")->required();
  sub->fallthrough();

  GenAffinityArgs ga;
  sub = app.add_subcommand("gen-affinity", "Color-guided affinity field from an RGB image");
  sub->add_option("--image", ga.image, "RGB PNG")->required();
  sub->add_option("--kernel", ga.kernel, "Odd kernel size")->capture_default_str();
  sub->add_option("--sigma", ga.sigma, "Color bandwidth")->capture_default_str();
  sub->add_option("--output", ga.output, "Affinity plane container")->required();
  sub->fallthrough();

  EvalArgs ev;
  sub = app.add_subcommand("eval", "KITTI metrics of a prediction against ground truth");
  sub->add_option("--pred", ev.pred, "Predicted depth PNG")->required();
  sub->add_option("--gt", ev.gt, "Ground-truth depth PNG")->required();
  sub->fallthrough();

  BenchArgs bn;
  sub = app.add_subcommand("bench", "Time naive vs accelerated propagation");
  sub->add_option("--shape", bn.shape, "WIDTHxHEIGHT")->capture_default_str();
  sub->add_option("--schedule", bn.schedule, "c1, c2 or c4")->capture_default_str();
  sub->add_option("--iterations", bn.iterations, "Total iterations")->capture_default_str();
  sub->add_option("--impl", bn.impl, "naive, accelerated or both")->capture_default_str();
  sub->add_option("--runs", bn.runs, "Timed runs (>= 5)")->capture_default_str();
  sub->add_option("--warmup", bn.warmup, "Warmup runs (>= 2)")->capture_default_str();
  sub->add_option("--seed", bn.seed, "Input generator seed")->capture_default_str();
  sub->add_flag("--anchor", bn.anchor, "Anchor to a 5% sparse map");
  sub->add_option("--json", bn.json, "Write the report as JSON");
  sub->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (threads > 0) set_num_threads(threads);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "refine") cmd_refine(refine, out);
    if (name == "fuse") cmd_fuse(fuse_args, out);
    if (name == "backproject") cmd_backproject(bp, out);
    if (name == "gen-affinity") cmd_gen_affinity(ga, out);
    if (name == "eval") cmd_eval(ev, out);
    if (name == "bench") cmd_bench(bn, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kOk;
}

}  // namespace depthprop::cli
