"""Pure NumPy implementations of the hot kernels.

Same contracts as the compiled module in ``_speedups.pyx``; used whenever the
extension is not built.
"""

from __future__ import annotations

import numpy as np

BACKEND = "fallback"


def extract_factors(word, length: int) -> np.ndarray:
    """Sorted distinct bitmasks of all ``length``-windows of a 0/1 word.

    Bit j of a mask is the symbol at window offset j.
    """
    w = np.asarray(word, dtype=np.int64)
    n = w.shape[0]
    if length < 1 or length > 62:
        raise ValueError("length must be in 1..62")
    if n < length:
        return np.empty(0, dtype=np.int64)
    windows = np.lib.stride_tricks.sliding_window_view(w, length)
    masks = windows @ (np.int64(1) << np.arange(length, dtype=np.int64))
    return np.unique(masks)


def project_masks(factors, positions) -> np.ndarray:
    """Project factor masks onto the given bit positions (packed little-endian)."""
    f = np.asarray(factors, dtype=np.int64)
    out = np.zeros_like(f)
    for j, pos in enumerate(positions):
        out |= ((f >> np.int64(pos)) & 1) << np.int64(j)
    return out


def distinct_projection_count(factors, positions) -> int:
    """Number of distinct 0/1 patterns the factors realize on ``positions``."""
    if len(positions) == 0:
        return 1 if len(factors) else 0
    return int(np.unique(project_masks(factors, positions)).size)


def window_oscillation(values, radius: float, images, weights) -> np.ndarray:
    """Per-point oscillation over value-metric balls.

    ``values`` must be sorted ascending; the ball of point i is the index
    range with |values[j] - values[i]| <= radius.  The oscillation at i is
    the largest weighted per-column spread of ``images`` over that range.
    """
    v = np.asarray(values, dtype=np.float64)
    img = np.asarray(images, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    n = v.shape[0]
    lo = np.searchsorted(v, v - radius, side="left")
    hi = np.searchsorted(v, v + radius, side="right")
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        block = img[lo[i] : hi[i]]
        out[i] = float(np.max((block.max(axis=0) - block.min(axis=0)) * w))
    return out
