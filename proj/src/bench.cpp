#include "depthprop/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace depthprop::bench {

std::string_view to_string(Impl impl) {
  return impl == Impl::Naive ? "naive" : "accelerated";
}

double median(std::vector<double> samples) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

BenchInputs make_inputs(Shape shape, const DilationSchedule& schedule, const BenchOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<float> depth(1.0f, 80.0f);
  std::uniform_real_distribution<float> weight(0.0f, 1.0f);

  std::vector<float> coarse(shape.size());
  for (auto& d : coarse) d = depth(rng);

  std::vector<ScalarPlane> planes;
  for (std::size_t j = 0; j < neighbor_offsets(3).size(); ++j) {
    std::vector<float> w(shape.size());
    for (auto& x : w) x = weight(rng);
    planes.emplace_back(shape, std::move(w));
  }

  PropagationConfig config{schedule, std::nullopt};
  if (options.anchor) {
    std::bernoulli_distribution hit(0.05);
    std::vector<float> sparse(shape.size(), 0.0f);
    for (auto& s : sparse) {
      if (hit(rng)) s = depth(rng);
    }
    config.anchor = DepthGrid(shape, std::move(sparse));
  }
  return BenchInputs{DepthGrid(shape, std::move(coarse)),
                     normalize(AffinityField(3, std::move(planes))), std::move(config)};
}

namespace {

void check(const BenchInputs& inputs, const BenchOptions& options) {
  const Shape shape = inputs.coarse.shape();
  if (shape.height < 8 || shape.width < 8) {
    throw ValueError("benchmark grid must be at least 8x8, got " + shape.str());
  }
  if (options.timed_runs < 1 || options.warmup_runs < 0) {
    throw ValueError("benchmark needs >= 1 timed run and >= 0 warmup runs");
  }
}

DepthGrid run_once(const BenchInputs& inputs, Impl impl) {
  return impl == Impl::Naive ? propagate_naive(inputs.coarse, inputs.field, inputs.config)
                             : propagate_accelerated(inputs.coarse, inputs.field, inputs.config);
}

BenchResult describe(const BenchInputs& inputs, Impl impl, const BenchOptions& options) {
  BenchResult result;
  result.label = std::string(to_string(impl));
  result.grid_shape = inputs.coarse.shape();
  result.schedule = inputs.config.schedule.str();
  result.iterations = inputs.config.schedule.total_iterations();
  result.runs = options.timed_runs;
  return result;
}

// Propagation only; input generation happens before the clock starts.
double timed(const BenchInputs& inputs, Impl impl, DepthGrid* output) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  DepthGrid out = run_once(inputs, impl);
  const auto stop = clock::now();
  if (output) *output = std::move(out);
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

BenchResult run_bench(const BenchInputs& inputs, Impl impl, const BenchOptions& options,
                      DepthGrid* output) {
  check(inputs, options);
  for (int i = 0; i < options.warmup_runs; ++i) (void)run_once(inputs, impl);
  BenchResult result = describe(inputs, impl, options);
  for (int i = 0; i < options.timed_runs; ++i) {
    result.samples.push_back(timed(inputs, impl, output));
  }
  result.median_seconds = median(result.samples);
  return result;
}

std::pair<BenchResult, BenchResult> run_paired(const BenchInputs& a, Impl impl_a,
                                               const BenchInputs& b, Impl impl_b,
                                               const BenchOptions& options, DepthGrid* output_a,
                                               DepthGrid* output_b) {
  check(a, options);
  check(b, options);
  for (int i = 0; i < options.warmup_runs; ++i) {
    (void)run_once(a, impl_a);
    (void)run_once(b, impl_b);
  }
  std::pair<BenchResult, BenchResult> results{describe(a, impl_a, options),
                                              describe(b, impl_b, options)};
  for (int i = 0; i < options.timed_runs; ++i) {
    results.first.samples.push_back(timed(a, impl_a, output_a));
    results.second.samples.push_back(timed(b, impl_b, output_b));
  }
  results.first.median_seconds = median(results.first.samples);
  results.second.median_seconds = median(results.second.samples);
  return results;
}

BenchResult run_bench(Shape shape, const DilationSchedule& schedule, Impl impl,
                      const BenchOptions& options, DepthGrid* output) {
  return run_bench(make_inputs(shape, schedule, options), impl, options, output);
}

}  // namespace depthprop::bench
