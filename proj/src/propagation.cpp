#include "depthprop/propagation.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#ifdef DEPTHPROP_HAVE_OPENMP
#include <omp.h>
#endif

namespace depthprop {

namespace {

/// Columns [begin, end) of a row whose neighbor at +shift stays inside [0, width).
struct ColumnSpan {
  int begin;
  int end;
};

inline ColumnSpan in_bounds_columns(int width, int shift) {
  return {std::max(0, -shift), std::min(width, width - shift)};
}

void validate(const DepthGrid& d0, const DepthGrid& state, const AffinityField& field,
              const PropagationConfig& config) {
  require_same_shape(d0.shape(), field.shape(), "propagate (d0 vs affinity)");
  require_same_shape(d0.shape(), state.shape(), "propagate (d0 vs state)");
  if (config.anchor) {
    require_same_shape(d0.shape(), config.anchor->shape(), "propagate (d0 vs anchor)");
  }
  if (!is_normalized(field)) {
    throw ValueError(
        "affinity field is not normalized: weights must be >= 0 with per-pixel sum <= 1");
  }
}

void apply_anchor(std::vector<float>& state, const std::optional<DepthGrid>& anchor) {
  if (!anchor) return;
  const auto a = anchor->values();
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (a[i] > 0.0f) state[i] = a[i];
  }
}

}  // namespace

DilationSchedule::DilationSchedule(std::vector<DilationPhase> phases) : phases_(std::move(phases)) {
  if (phases_.empty()) throw ValueError("dilation schedule needs at least one phase");
  for (const auto& p : phases_) {
    if (p.rate < 1 || p.iterations < 1) {
      throw ValueError("dilation phase needs rate >= 1 and iterations >= 1, got (" +
                       std::to_string(p.rate) + ", " + std::to_string(p.iterations) + ")");
    }
  }
}

int DilationSchedule::total_iterations() const {
  int total = 0;
  for (const auto& p : phases_) total += p.iterations;
  return total;
}

bool DilationSchedule::rates_non_increasing() const {
  return std::is_sorted(phases_.begin(), phases_.end(),
                        [](const DilationPhase& a, const DilationPhase& b) { return a.rate > b.rate; });
}

std::string DilationSchedule::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    if (i) s += ", ";
    s += "(" + std::to_string(phases_[i].rate) + ", " + std::to_string(phases_[i].iterations) + ")";
  }
  return s + "]";
}

std::optional<ScheduleVariant> parse_schedule_variant(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "c1") return ScheduleVariant::C1;
  if (lower == "c2") return ScheduleVariant::C2;
  if (lower == "c4") return ScheduleVariant::C4;
  return std::nullopt;
}

std::string_view to_string(ScheduleVariant variant) {
  switch (variant) {
    case ScheduleVariant::C1: return "c1";
    case ScheduleVariant::C2: return "c2";
    case ScheduleVariant::C4: return "c4";
  }
  return "?";
}

DilationSchedule schedule_c(ScheduleVariant variant, int total_iterations) {
  std::vector<int> rates;
  switch (variant) {
    case ScheduleVariant::C1: rates = {1}; break;
    case ScheduleVariant::C2: rates = {2, 1}; break;
    case ScheduleVariant::C4: rates = {4, 2, 1}; break;
  }
  const int n = static_cast<int>(rates.size());
  if (total_iterations < n) {
    throw ValueError("schedule " + std::string(to_string(variant)) + " needs at least " +
                     std::to_string(n) + " iterations, got " + std::to_string(total_iterations));
  }
  std::vector<DilationPhase> phases;
  for (int i = 0; i < n; ++i) {
    const int count = total_iterations / n + (i < total_iterations % n ? 1 : 0);
    phases.push_back({rates[i], count});
  }
  return DilationSchedule(std::move(phases));
}

ScalarPlane translate(const ScalarPlane& plane, NeighborOffset offset, int rate) {
  const Shape shape = plane.shape();
  const int sy = offset.dy * rate;
  const int sx = offset.dx * rate;
  const ColumnSpan cols = in_bounds_columns(shape.width, sx);
  std::vector<float> out(shape.size(), 0.0f);
  for (int v = 0; v < shape.height; ++v) {
    const int src = v + sy;
    if (src < 0 || src >= shape.height || cols.begin >= cols.end) continue;
    const auto in_row = plane.row(src);
    std::copy(in_row.begin() + cols.begin + sx, in_row.begin() + cols.end + sx,
              out.begin() + static_cast<std::ptrdiff_t>(v) * shape.width + cols.begin);
  }
  return ScalarPlane(shape, std::move(out));
}

DepthGrid propagate_naive(const DepthGrid& d0, const AffinityField& field,
                          const PropagationConfig& config) {
  return propagate_naive(d0, d0, field, config);
}

DepthGrid propagate_naive(const DepthGrid& d0, const DepthGrid& state, const AffinityField& field,
                          const PropagationConfig& config) {
  validate(d0, state, field, config);
  const int h = d0.height();
  const int w = d0.width();
  const auto& offsets = field.offsets();

  std::vector<float> cur(state.values().begin(), state.values().end());
  std::vector<float> next(cur.size());
  for (const auto& phase : config.schedule.phases()) {
    for (int it = 0; it < phase.iterations; ++it) {
      for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
          double acc = 0.0;
          double weight_sum = 0.0;
          for (std::size_t j = 0; j < offsets.size(); ++j) {
            const int nv = v + offsets[j].dy * phase.rate;
            const int nu = u + offsets[j].dx * phase.rate;
            if (nv < 0 || nv >= h || nu < 0 || nu >= w) continue;
            const double wj = field.plane(j).at(v, u);
            weight_sum += wj;
            acc += wj * cur[static_cast<std::size_t>(nv) * w + nu];
          }
          const double self = std::max(0.0, 1.0 - weight_sum);
          next[static_cast<std::size_t>(v) * w + u] =
              static_cast<float>(self * d0.at(v, u) + acc);
        }
      }
      apply_anchor(next, config.anchor);
      std::swap(cur, next);
    }
  }
  return DepthGrid(d0.shape(), std::move(cur));
}

DepthGrid propagate_accelerated(const DepthGrid& d0, const AffinityField& field,
                                const PropagationConfig& config) {
  return propagate_accelerated(d0, d0, field, config);
}

DepthGrid propagate_accelerated(const DepthGrid& d0, const DepthGrid& state,
                                const AffinityField& field, const PropagationConfig& config) {
  validate(d0, state, field, config);
  const int h = d0.height();
  const int w = d0.width();
  const std::size_t n = d0.size();
  const auto& offsets = field.offsets();
  const std::size_t k = offsets.size();

  std::vector<const float*> weights(k);
  for (std::size_t j = 0; j < k; ++j) weights[j] = field.plane(j).values().data();
  const float* base = d0.values().data();
  const float* anchor = config.anchor ? config.anchor->values().data() : nullptr;

  std::vector<float> cur(state.values().begin(), state.values().end());
  std::vector<float> next(n);
  std::vector<float> self(n);

  for (const auto& phase : config.schedule.phases()) {
    const int rate = phase.rate;

    // Self weight for this rate: one minus every neighbor weight whose
    // translated source pixel is in bounds.
#pragma omp parallel for schedule(static)
    for (int v = 0; v < h; ++v) {
      std::vector<double> sum(static_cast<std::size_t>(w), 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        const int src = v + offsets[j].dy * rate;
        const ColumnSpan cols = in_bounds_columns(w, offsets[j].dx * rate);
        if (src < 0 || src >= h) continue;
        const float* a = weights[j] + static_cast<std::size_t>(v) * w;
        for (int u = cols.begin; u < cols.end; ++u) sum[u] += a[u];
      }
      float* out = self.data() + static_cast<std::size_t>(v) * w;
      for (int u = 0; u < w; ++u) out[u] = static_cast<float>(std::max(0.0, 1.0 - sum[u]));
    }

    for (int it = 0; it < phase.iterations; ++it) {
#pragma omp parallel
      {
        std::vector<double> acc(static_cast<std::size_t>(w));
#pragma omp for schedule(static)
        for (int v = 0; v < h; ++v) {
          const std::size_t row = static_cast<std::size_t>(v) * w;
          const float* s = self.data() + row;
          const float* d = base + row;
          for (int u = 0; u < w; ++u) acc[u] = static_cast<double>(s[u]) * d[u];

          for (std::size_t j = 0; j < k; ++j) {
            const int src = v + offsets[j].dy * rate;
            if (src < 0 || src >= h) continue;
            const int shift = offsets[j].dx * rate;
            const ColumnSpan cols = in_bounds_columns(w, shift);
            const float* a = weights[j] + row;
            const float* t = cur.data() + static_cast<std::size_t>(src) * w;
            for (int u = cols.begin; u < cols.end; ++u) {
              acc[u] += static_cast<double>(a[u]) * t[u + shift];
            }
          }

          float* out = next.data() + row;
          for (int u = 0; u < w; ++u) out[u] = static_cast<float>(acc[u]);
          if (anchor) {
            const float* an = anchor + row;
            for (int u = 0; u < w; ++u) {
              if (an[u] > 0.0f) out[u] = an[u];
            }
          }
        }
      }
      std::swap(cur, next);
    }
  }
  return DepthGrid(d0.shape(), std::move(cur));
}

DepthGrid nearest_valid_fill(const DepthGrid& sparse) {
  const int h = sparse.height();
  const int w = sparse.width();
  std::vector<float> out(sparse.values().begin(), sparse.values().end());
  std::vector<std::uint8_t> seen(out.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > 0.0f) {
      seen[i] = 1;
      queue.push_back(i);
    }
  }
  if (queue.empty()) throw ValueError("nearest_valid_fill: input has no valid pixel");

  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const int v = static_cast<int>(i / w);
    const int u = static_cast<int>(i % w);
    const int nbr[4][2] = {{v - 1, u}, {v, u - 1}, {v, u + 1}, {v + 1, u}};
    for (const auto& [nv, nu] : nbr) {
      if (nv < 0 || nv >= h || nu < 0 || nu >= w) continue;
      const std::size_t j = static_cast<std::size_t>(nv) * w + nu;
      if (seen[j]) continue;
      seen[j] = 1;
      out[j] = out[i];
      queue.push_back(j);
    }
  }
  return DepthGrid(sparse.shape(), std::move(out));
}

void set_num_threads(int n) {
#ifdef DEPTHPROP_HAVE_OPENMP
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
  (void)n;
#endif
}

int num_threads() {
#ifdef DEPTHPROP_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace depthprop
