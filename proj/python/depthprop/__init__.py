"""Depth refinement by affinity propagation.

Depth maps are 2-D float32 arrays in meters with 0 marking missing pixels.
Affinity fields are (k*k - 1, H, W) stacks in ``neighbor_offsets(k)`` order.
"""

from ._depthprop import (
    Error,
    FormatError,
    ShapeError,
    ValueError,
    back_project,
    bench,
    evaluate,
    fuse,
    guided_affinity,
    is_normalized,
    masked_l2,
    min_pool,
    nearest_valid_fill,
    neighbor_offsets,
    normalize,
    num_threads,
    propagate,
    propagate_naive,
    read_affinity,
    read_depth_png,
    schedule,
    self_weight,
    set_num_threads,
    write_affinity,
    write_depth_png,
)

__all__ = [
    "Error",
    "FormatError",
    "ShapeError",
    "ValueError",
    "back_project",
    "bench",
    "evaluate",
    "fuse",
    "guided_affinity",
    "is_normalized",
    "masked_l2",
    "min_pool",
    "nearest_valid_fill",
    "neighbor_offsets",
    "normalize",
    "num_threads",
    "propagate",
    "propagate_naive",
    "read_affinity",
    "read_depth_png",
    "schedule",
    "self_weight",
    "set_num_threads",
    "write_affinity",
    "write_depth_png",
]
