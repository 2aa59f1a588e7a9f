#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthprop/affinity.hpp"
#include "depthprop/core.hpp"

namespace depthprop {

struct DilationPhase {
  int rate = 1;
  int iterations = 1;

  friend bool operator==(const DilationPhase&, const DilationPhase&) = default;
};

/// Ordered propagation phases. Each phase runs `iterations` steps with
/// neighbor offsets scaled by `rate`.
class DilationSchedule {
 public:
  /// Throws ValueError on an empty list or a non-positive rate/count.
  explicit DilationSchedule(std::vector<DilationPhase> phases);

  [[nodiscard]] const std::vector<DilationPhase>& phases() const { return phases_; }
  [[nodiscard]] int total_iterations() const;
  /// Schedules normally shrink the rate over time; callers may warn otherwise.
  [[nodiscard]] bool rates_non_increasing() const;
  [[nodiscard]] std::string str() const;

  friend bool operator==(const DilationSchedule&, const DilationSchedule&) = default;

 private:
  std::vector<DilationPhase> phases_;
};

/// C1: rate 1 throughout. C2: rates {2, 1}. C4: rates {4, 2, 1}.
enum class ScheduleVariant { C1, C2, C4 };

/// Parses "c1", "c2", "c4" (case-insensitive). Returns nullopt otherwise.
std::optional<ScheduleVariant> parse_schedule_variant(std::string_view name);
std::string_view to_string(ScheduleVariant variant);

/**
 * Split `total_iterations` evenly across the variant's phases, giving the
 * remainder to the earliest phases. With 12 iterations: C1 -> [(1,12)],
 * C2 -> [(2,6),(1,6)], C4 -> [(4,4),(2,4),(1,4)].
 * Throws ValueError if there are fewer iterations than phases.
 */
DilationSchedule schedule_c(ScheduleVariant variant, int total_iterations = 12);

struct PropagationConfig {
  DilationSchedule schedule{{{1, 12}}};
  /// When set, every pixel valid (> 0) here is reset to this value after
  /// each iteration. Must match the working grid shape.
  std::optional<DepthGrid> anchor;
};

/// output(p) = input(p + rate * offset) where in bounds, else 0.
ScalarPlane translate(const ScalarPlane& plane, NeighborOffset offset, int rate);

/**
 * Reference pixel-wise propagation:
 *
 *   D_i^{t+1} = W_ii D_i^0 + sum_{j in N(i)} W_ji D_j^t
 *
 * with neighbors at i + rate * offset. Out-of-bounds neighbors contribute
 * nothing and their weight is folded into W_ii. The field must be
 * normalized; otherwise ValueError.
 */
DepthGrid propagate_naive(const DepthGrid& d0, const AffinityField& field,
                          const PropagationConfig& config);

/// Same recurrence continuing from `state` instead of d0 (d0 still feeds the self term).
DepthGrid propagate_naive(const DepthGrid& d0, const DepthGrid& state, const AffinityField& field,
                          const PropagationConfig& config);

/**
 * Plane-level form of the same recurrence: each iteration accumulates
 * A^x * T(D^t, x) over all neighbor planes plus the border-folded self
 * weight times D^0. Rows are processed in parallel. Matches
 * propagate_naive to within float rounding of the summation order.
 */
DepthGrid propagate_accelerated(const DepthGrid& d0, const AffinityField& field,
                                const PropagationConfig& config);

DepthGrid propagate_accelerated(const DepthGrid& d0, const DepthGrid& state,
                                const AffinityField& field, const PropagationConfig& config);

/**
 * Dense initial guess from a sparse map: every invalid pixel takes the
 * value of the closest valid pixel in 4-connected steps, ties broken in
 * row-major seed order. Throws ValueError if no pixel is valid.
 */
DepthGrid nearest_valid_fill(const DepthGrid& sparse);

/// Caps the worker threads used by data-parallel loops. n <= 0 restores the default.
void set_num_threads(int n);
int num_threads();

}  // namespace depthprop
