#pragma once

#include <utility>

#include "depthprop/core.hpp"

namespace depthprop {

/// Per-pixel two-way softmax of the confidence logits. Both planes lie in
/// [0, 1] and sum to 1 at every pixel.
std::pair<ScalarPlane, ScalarPlane> fusion_weights(const ScalarPlane& conf_cd,
                                                   const ScalarPlane& conf_dd);

/**
 * Blend two dense predictions with softmax weights of their confidence
 * logits:
 *
 *   out = (e^Ccd * Dcd + e^Cdd * Ddd) / (e^Ccd + e^Cdd)
 *
 * evaluated after subtracting the per-pixel max logit, so any finite
 * logits are safe. Applied at every pixel, including ones where an input
 * is 0.
 */
DepthGrid fuse(const DepthGrid& depth_cd, const DepthGrid& depth_dd, const ScalarPlane& conf_cd,
               const ScalarPlane& conf_dd);

}  // namespace depthprop
