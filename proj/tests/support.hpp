#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "depthprop/depthprop.hpp"

namespace depthprop::testing {

using Rng = std::mt19937_64;

inline DepthGrid random_depth(Rng& rng, Shape shape, float lo = 1.0f, float hi = 80.0f,
                              double valid_fraction = 1.0) {
  std::uniform_real_distribution<float> depth(lo, hi);
  std::bernoulli_distribution valid(valid_fraction);
  std::vector<float> v(shape.size());
  for (auto& d : v) d = valid(rng) ? depth(rng) : 0.0f;
  return DepthGrid(shape, std::move(v));
}

inline ScalarPlane random_plane(Rng& rng, Shape shape, float lo, float hi) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(shape.size());
  for (auto& x : v) x = dist(rng);
  return ScalarPlane(shape, std::move(v));
}

/// Raw weights in [lo, hi) per neighbor, then normalized.
inline AffinityField random_field(Rng& rng, Shape shape, int kernel = 3, float lo = 0.0f,
                                  float hi = 1.0f) {
  std::vector<ScalarPlane> planes;
  for (std::size_t j = 0; j < neighbor_offsets(kernel).size(); ++j) {
    planes.push_back(random_plane(rng, shape, lo, hi));
  }
  return normalize(AffinityField(kernel, std::move(planes)));
}

/// |a - b| <= tol * max(|a|, |b|) at every pixel; returns the worst ratio.
inline double max_relative_error(const ScalarPlane& a, const ScalarPlane& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.values()[i], y = b.values()[i];
    if (x == y) continue;
    worst = std::max(worst, std::abs(x - y) / std::max(std::abs(x), std::abs(y)));
  }
  return worst;
}

/**
 * Direct evaluation of the propagation recurrence, written independently of
 * the library: for each pixel i and iteration t,
 *
 *   D_i^{t+1} = (1 - sum_{j in bounds} W_ji) D_i^0 + sum_{j in bounds} W_ji D_j^t
 *
 * with W_ji read from weights[k][i] for neighbor offset k scaled by the
 * phase rate. All arithmetic in double; the state is rounded to float
 * between iterations like the stored grids.
 */
struct OraclePhase {
  int rate;
  int iterations;
};

inline std::vector<float> oracle_propagate(int height, int width, const std::vector<float>& d0,
                                           const std::vector<std::vector<float>>& weights,
                                           const std::vector<std::pair<int, int>>& offsets,
                                           const std::vector<OraclePhase>& phases,
                                           const std::vector<float>* anchor = nullptr) {
  std::vector<float> state = d0;
  for (const auto& phase : phases) {
    for (int t = 0; t < phase.iterations; ++t) {
      std::vector<float> next(state.size());
      for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
          const int i = v * width + u;
          double neighbor_sum = 0.0;
          double in_bounds_weight = 0.0;
          for (std::size_t k = 0; k < offsets.size(); ++k) {
            const int jv = v + offsets[k].first * phase.rate;
            const int ju = u + offsets[k].second * phase.rate;
            const bool inside = jv >= 0 && jv < height && ju >= 0 && ju < width;
            if (!inside) continue;
            in_bounds_weight += weights[k][i];
            neighbor_sum += static_cast<double>(weights[k][i]) * state[jv * width + ju];
          }
          const double self = std::max(0.0, 1.0 - in_bounds_weight);
          next[i] = static_cast<float>(self * d0[i] + neighbor_sum);
          if (anchor && (*anchor)[i] > 0.0f) next[i] = (*anchor)[i];
        }
      }
      state = std::move(next);
    }
  }
  return state;
}

// Same oracle driven from library types; only reads raw values out of them.
inline DepthGrid oracle_propagate(const DepthGrid& d0, const AffinityField& field,
                                  const PropagationConfig& cfg) {
  std::vector<std::vector<float>> weights;
  for (const auto& p : field.planes()) weights.emplace_back(p.values().begin(), p.values().end());
  std::vector<std::pair<int, int>> offsets;
  for (const auto& o : field.offsets()) offsets.emplace_back(o.dy, o.dx);
  std::vector<OraclePhase> phases;
  for (const auto& p : cfg.schedule.phases()) phases.push_back({p.rate, p.iterations});
  std::vector<float> anchor;
  if (cfg.anchor) anchor.assign(cfg.anchor->values().begin(), cfg.anchor->values().end());
  return DepthGrid(d0.shape(),
                   oracle_propagate(d0.height(), d0.width(),
                                    std::vector<float>(d0.values().begin(), d0.values().end()),
                                    weights, offsets, phases, cfg.anchor ? &anchor : nullptr));
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("depthprop-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace depthprop::testing
