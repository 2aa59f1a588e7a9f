#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "depthprop/affinity.hpp"
#include "depthprop/core.hpp"
#include "depthprop/propagation.hpp"

namespace depthprop::bench {

enum class Impl { Naive, Accelerated };

std::string_view to_string(Impl impl);

struct BenchOptions {
  int warmup_runs = 2;
  int timed_runs = 5;
  std::uint64_t seed = 20210601;
  bool anchor = false;
};

struct BenchResult {
  std::string label;
  Shape grid_shape;
  std::string schedule;
  int iterations = 0;
  double median_seconds = 0.0;
  int runs = 0;
  /// Every timed sample, in run order.
  std::vector<double> samples;
};

/// Seeded propagation inputs: a dense coarse map, a normalized random field
/// and, optionally, a ~5% dense sparse anchor.
struct BenchInputs {
  DepthGrid coarse;
  AffinityField field;
  PropagationConfig config;
};

BenchInputs make_inputs(Shape shape, const DilationSchedule& schedule, const BenchOptions& options);

/// Runs the propagation on `inputs` with warmup and returns the median.
/// Throws ValueError when the grid is smaller than 8x8 or runs < 1.
BenchResult run_bench(const BenchInputs& inputs, Impl impl, const BenchOptions& options = {},
                      DepthGrid* output = nullptr);

/// Convenience overload generating inputs from `options.seed`.
BenchResult run_bench(Shape shape, const DilationSchedule& schedule, Impl impl,
                      const BenchOptions& options = {}, DepthGrid* output = nullptr);

/**
 * Times two configurations with their runs interleaved (a, b, a, b, ...)
 * so slow drift in machine load affects both sides equally. Warmup runs
 * are interleaved the same way.
 */
std::pair<BenchResult, BenchResult> run_paired(const BenchInputs& a, Impl impl_a,
                                               const BenchInputs& b, Impl impl_b,
                                               const BenchOptions& options = {},
                                               DepthGrid* output_a = nullptr,
                                               DepthGrid* output_b = nullptr);

double median(std::vector<double> samples);

}  // namespace depthprop::bench
