#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <depthprop/depthprop.hpp>

namespace py = pybind11;
using namespace depthprop;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

Shape shape_2d(const FloatArray& a, const char* what) {
  if (a.ndim() != 2) {
    throw ShapeError(std::string(what) + ": expected a 2-D array, got " +
                     std::to_string(a.ndim()) + "-D");
  }
  return Shape{static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1))};
}

std::vector<float> copy_values(const FloatArray& a) {
  return std::vector<float>(a.data(), a.data() + a.size());
}

DepthGrid to_grid(const FloatArray& a, const char* what) {
  return DepthGrid(shape_2d(a, what), copy_values(a));
}

ScalarPlane to_plane(const FloatArray& a, const char* what) {
  return ScalarPlane(shape_2d(a, what), copy_values(a));
}

py::array_t<float> to_array(const ScalarPlane& p) {
  py::array_t<float> out({p.height(), p.width()});
  std::copy(p.values().begin(), p.values().end(), out.mutable_data());
  return out;
}

// (k*k - 1, H, W) stack, neighbor order as in neighbor_offsets().
AffinityField to_field(const FloatArray& a) {
  if (a.ndim() != 3) {
    throw ShapeError("affinity: expected a 3-D (planes, H, W) array, got " +
                     std::to_string(a.ndim()) + "-D");
  }
  const auto n = static_cast<int>(a.shape(0));
  int k = 1;
  while (k * k - 1 < n) k += 2;
  if (k * k - 1 != n) {
    throw ShapeError("affinity: plane count " + std::to_string(n) + " is not k*k - 1 for odd k");
  }
  const Shape s{static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2))};
  std::vector<ScalarPlane> planes;
  const float* base = a.data();
  for (int j = 0; j < n; ++j) {
    planes.emplace_back(s, std::vector<float>(base + j * s.size(), base + (j + 1) * s.size()));
  }
  return AffinityField(k, std::move(planes));
}

py::array_t<float> field_array(const AffinityField& f) {
  const Shape s = f.shape();
  py::array_t<float> out({static_cast<py::ssize_t>(f.planes().size()),
                          static_cast<py::ssize_t>(s.height), static_cast<py::ssize_t>(s.width)});
  float* dst = out.mutable_data();
  for (const auto& p : f.planes()) dst = std::copy(p.values().begin(), p.values().end(), dst);
  return out;
}

DilationSchedule to_schedule(const py::object& schedule, int iterations) {
  if (py::isinstance<py::str>(schedule)) {
    const auto name = schedule.cast<std::string>();
    const auto variant = parse_schedule_variant(name);
    if (!variant) throw ValueError("unknown schedule '" + name + "' (expected c1, c2 or c4)");
    return schedule_c(*variant, iterations);
  }
  std::vector<DilationPhase> phases;
  for (const auto& [rate, count] : schedule.cast<std::vector<std::pair<int, int>>>()) {
    phases.push_back({rate, count});
  }
  return DilationSchedule(std::move(phases));
}

py::list phases_list(const DilationSchedule& s) {
  py::list out;
  for (const auto& p : s.phases()) out.append(py::make_tuple(p.rate, p.iterations));
  return out;
}

template <typename Fn>
py::array_t<float> run_propagation(Fn fn, const FloatArray& d0, const FloatArray& affinity,
                                   const py::object& schedule, int iterations,
                                   const std::optional<FloatArray>& anchor) {
  PropagationConfig cfg{to_schedule(schedule, iterations), std::nullopt};
  if (anchor) cfg.anchor = to_grid(*anchor, "anchor");
  const DepthGrid start = to_grid(d0, "d0");
  const AffinityField field = to_field(affinity);
  DepthGrid out;
  {
    py::gil_scoped_release release;
    out = fn(start, field, cfg);
  }
  return to_array(out);
}

py::dict report_dict(const MetricReport& r) {
  py::dict d;
  d["rmse_mm"] = r.rmse_mm;
  d["mae_mm"] = r.mae_mm;
  d["irmse_per_km"] = r.irmse_per_km;
  d["imae_per_km"] = r.imae_per_km;
  d["valid_count"] = r.valid_count;
  return d;
}

py::dict bench_dict(const bench::BenchResult& r) {
  py::dict d;
  d["label"] = r.label;
  d["grid_shape"] = py::make_tuple(r.grid_shape.height, r.grid_shape.width);
  d["schedule"] = r.schedule;
  d["iterations"] = r.iterations;
  d["median_seconds"] = r.median_seconds;
  d["runs"] = r.runs;
  d["samples"] = r.samples;
  return d;
}

}  // namespace

PYBIND11_MODULE(_depthprop, m) {
  m.doc() = "Depth refinement by affinity propagation";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  // ValueError subclasses both the package error and Python's ValueError.
  py::tuple value_bases = py::make_tuple(error, py::handle(PyExc_ValueError));
  static PyObject* value_error =
      PyErr_NewException("depthprop._depthprop.ValueError", value_bases.ptr(), nullptr);
  m.add_object("ValueError", py::handle(value_error));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const depthprop::ValueError& e) {
      PyErr_SetString(value_error, e.what());
    }
  });
  py::register_exception<FormatError>(m, "FormatError", error.ptr());

  m.def("neighbor_offsets", [](int k) {
    std::vector<std::pair<int, int>> out;
    for (const auto& o : neighbor_offsets(k)) out.emplace_back(o.dy, o.dx);
    return out;
  }, py::arg("kernel_size") = 3);

  m.def("schedule", [](const std::string& name, int iterations) {
    return phases_list(to_schedule(py::str(name), iterations));
  }, py::arg("name"), py::arg("iterations") = 12,
        "Phases [(rate, iterations), ...] of schedule c1, c2 or c4.");

  m.def("fuse", [](const FloatArray& dcd, const FloatArray& ddd, const FloatArray& ccd,
                   const FloatArray& cdd) {
    return to_array(fuse(to_grid(dcd, "depth_cd"), to_grid(ddd, "depth_dd"),
                         to_plane(ccd, "conf_cd"), to_plane(cdd, "conf_dd")));
  }, py::arg("depth_cd"), py::arg("depth_dd"), py::arg("conf_cd"), py::arg("conf_dd"));

  m.def("back_project", [](const FloatArray& depth, double fx, double fy, double u0, double v0) {
    const PositionMap pm = back_project(to_grid(depth, "depth"), CameraIntrinsics(fx, fy, u0, v0));
    return py::make_tuple(to_array(pm.x), to_array(pm.y), to_array(pm.z));
  }, py::arg("depth"), py::arg("fx"), py::arg("fy"), py::arg("u0"), py::arg("v0"),
        "Returns (x, y, z) planes; invalid pixels map to zeros.");

  m.def("min_pool", [](const FloatArray& depth, int factor) {
    return to_array(min_pool(to_grid(depth, "depth"), factor));
  }, py::arg("depth"), py::arg("factor"));

  m.def("normalize", [](const FloatArray& affinity) {
    return field_array(normalize(to_field(affinity)));
  }, py::arg("affinity"));

  m.def("is_normalized", [](const FloatArray& affinity, double tolerance) {
    return is_normalized(to_field(affinity), tolerance);
  }, py::arg("affinity"), py::arg("tolerance") = kNormalizationTolerance);

  m.def("self_weight", [](const FloatArray& affinity) {
    return to_array(self_weight(to_field(affinity)));
  }, py::arg("affinity"));

  m.def("guided_affinity", [](const FloatArray& image, int kernel_size, double sigma) {
    if (image.ndim() != 3 || image.shape(2) != 3) {
      throw ShapeError("image: expected an (H, W, 3) array");
    }
    const Shape s{static_cast<int>(image.shape(0)), static_cast<int>(image.shape(1))};
    std::array<std::vector<float>, 3> channels;
    for (auto& c : channels) c.resize(s.size());
    const float* src = image.data();
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (int c = 0; c < 3; ++c) channels[c][i] = src[3 * i + c];
    }
    const RgbImage rgb{ScalarPlane(s, std::move(channels[0])), ScalarPlane(s, std::move(channels[1])),
                       ScalarPlane(s, std::move(channels[2]))};
    return field_array(guided_affinity(rgb, kernel_size, sigma));
  }, py::arg("image"), py::arg("kernel_size") = 3, py::arg("sigma") = 0.1);

  const char* propagate_doc =
      "schedule is 'c1'/'c2'/'c4' (split over `iterations`) or a list of (rate, iterations).";
  m.def("propagate_naive",
        [](const FloatArray& d0, const FloatArray& affinity, const py::object& schedule,
           int iterations, const std::optional<FloatArray>& anchor) {
          return run_propagation(
              [](const DepthGrid& d, const AffinityField& f, const PropagationConfig& c) {
                return propagate_naive(d, f, c);
              },
              d0, affinity, schedule, iterations, anchor);
        },
        py::arg("d0"), py::arg("affinity"), py::arg("schedule") = "c1", py::arg("iterations") = 12,
        py::arg("anchor") = py::none(), propagate_doc);

  m.def("propagate",
        [](const FloatArray& d0, const FloatArray& affinity, const py::object& schedule,
           int iterations, const std::optional<FloatArray>& anchor) {
          return run_propagation(
              [](const DepthGrid& d, const AffinityField& f, const PropagationConfig& c) {
                return propagate_accelerated(d, f, c);
              },
              d0, affinity, schedule, iterations, anchor);
        },
        py::arg("d0"), py::arg("affinity"), py::arg("schedule") = "c1", py::arg("iterations") = 12,
        py::arg("anchor") = py::none(), propagate_doc);

  m.def("nearest_valid_fill", [](const FloatArray& sparse) {
    return to_array(nearest_valid_fill(to_grid(sparse, "sparse")));
  }, py::arg("sparse"));

  m.def("evaluate", [](const FloatArray& pred, const FloatArray& gt) {
    return report_dict(evaluate(to_grid(pred, "pred"), to_grid(gt, "gt")));
  }, py::arg("pred"), py::arg("gt"));

  m.def("masked_l2", [](const FloatArray& pred, const FloatArray& gt) {
    return masked_l2(to_grid(pred, "pred"), to_grid(gt, "gt"));
  }, py::arg("pred"), py::arg("gt"));

  m.def("read_depth_png", [](const std::filesystem::path& path) {
    return to_array(io::read_depth_png(path));
  }, py::arg("path"));

  m.def("write_depth_png", [](const FloatArray& depth, const std::filesystem::path& path) {
    io::write_depth_png(to_grid(depth, "depth"), path);
  }, py::arg("depth"), py::arg("path"));

  m.def("read_affinity", [](const std::filesystem::path& path) {
    return field_array(io::affinity_from_container(io::read_planes(path)));
  }, py::arg("path"));

  m.def("write_affinity", [](const FloatArray& affinity, const std::filesystem::path& path) {
    io::write_planes(io::to_container(to_field(affinity)), path);
  }, py::arg("affinity"), py::arg("path"));

  m.def("set_num_threads", &set_num_threads, py::arg("n"));
  m.def("num_threads", &num_threads);

  m.def("bench",
        [](int height, int width, const std::string& schedule, int iterations, int runs,
           int warmup, std::uint64_t seed, bool anchor) {
          bench::BenchOptions options;
          options.timed_runs = runs;
          options.warmup_runs = warmup;
          options.seed = seed;
          options.anchor = anchor;
          const auto inputs = bench::make_inputs(Shape{height, width},
                                                 to_schedule(py::str(schedule), iterations), options);
          std::pair<bench::BenchResult, bench::BenchResult> results;
          {
            py::gil_scoped_release release;
            results = bench::run_paired(inputs, bench::Impl::Naive, inputs,
                                        bench::Impl::Accelerated, options);
          }
          py::dict out;
          out["naive"] = bench_dict(results.first);
          out["accelerated"] = bench_dict(results.second);
          out["speedup"] = results.first.median_seconds / results.second.median_seconds;
          return out;
        },
        py::arg("height") = 352, py::arg("width") = 1216, py::arg("schedule") = "c1",
        py::arg("iterations") = 12, py::arg("runs") = 5, py::arg("warmup") = 2,
        py::arg("seed") = 20210601, py::arg("anchor") = false,
        "Paired naive/accelerated timing on seeded random inputs.");
}
