"""Area-weighted mixing of paired embedding vectors.

When a patched image stands in for four originals, its positive partner in a
joint embedding space is built the same way: the four paired representations
are averaged with the quadrant-area weights. This is the only piece of the
retrieval pipeline that is augmentation-specific, so it is exposed standalone
and works on any equal-dimension real vectors.
"""

from __future__ import annotations

import numpy as np

from .augment import QuadrantWeights


def _weight_values(weights) -> np.ndarray:
    if isinstance(weights, QuadrantWeights):
        return weights.values
    values = np.asarray(weights, dtype=np.float64)
    if values.shape != (4,):
        raise ValueError(f"weights must be four values, got shape {values.shape}")
    if np.any(values < 0):
        raise ValueError(f"weights must be non-negative, got {values.tolist()}")
    if abs(values.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got sum {values.sum()!r}")
    return values


def mix_embeddings(vectors, weights) -> np.ndarray:
    """Convex combination sum_k W_k * v_k of four equal-dimension vectors.

    ``weights`` is a :class:`QuadrantWeights` or any four non-negative values
    summing to 1. Zero-weight vectors contribute nothing, so a degenerate
    weighting returns its single live vector exactly.
    """
    vecs = [np.asarray(v, dtype=np.float64) for v in vectors]
    if len(vecs) != 4:
        raise ValueError(f"expected four vectors, got {len(vecs)}")
    dims = {v.shape for v in vecs}
    if len(dims) != 1 or vecs[0].ndim != 1:
        raise ValueError(f"vectors must share one 1-d dimension, got shapes {sorted(dims)}")
    if not all(np.all(np.isfinite(v)) for v in vecs):
        raise ValueError("vectors must be finite")

    values = _weight_values(weights)
    live = [k for k in range(4) if values[k] > 0.0]
    if len(live) == 1:
        return vecs[live[0]].copy()
    # Anchored accumulation: equal vectors mix to themselves exactly.
    anchor = vecs[live[0]]
    out = anchor.copy()
    for k in live[1:]:
        out += values[k] * (vecs[k] - anchor)
    return out
