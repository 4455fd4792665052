"""Soft-label loss kernels with analytic gradients.

All kernels run in double precision and accept either a single logit vector
of shape (K,) or a batch of shape (N, K); reductions happen along the last
axis. Three equivalent views of the soft-label objective are provided:

* ``weighted_ce_loss`` - the per-quadrant form sum_k W_k * CE(logits, c_k);
* ``soft_ce_loss``     - cross-entropy against the mixed label, identical to
  the weighted form because the c_k are one-hot;
* ``kl_loss``          - KL(target || softmax(logits)), which differs from
  soft cross-entropy only by the target entropy, so it shares the gradient
  softmax(logits) - target but converges to zero for soft targets too.
"""

from __future__ import annotations

import numpy as np

from .augment import QuadrantWeights
from .validation import check_class_ids, check_num_classes


def _as_logits(logits) -> np.ndarray:
    arr = np.asarray(logits, dtype=np.float64)
    if arr.ndim not in (1, 2):
        raise ValueError(f"logits must be 1-d or 2-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("logits must be finite")
    return arr


def softmax(logits) -> np.ndarray:
    """Numerically stabilized softmax along the last axis."""
    z = _as_logits(logits)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits) -> np.ndarray:
    z = _as_logits(logits)
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def entropy(target) -> np.ndarray | float:
    """Shannon entropy -sum_j t_j log t_j with 0 log 0 = 0."""
    t = np.asarray(target, dtype=np.float64)
    logt = np.where(t > 0.0, np.log(np.where(t > 0.0, t, 1.0)), 0.0)
    out = -(t * logt).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def soft_ce_loss(logits, target) -> np.ndarray | float:
    """Cross-entropy -sum_j target_j log softmax(logits)_j."""
    t = np.asarray(target, dtype=np.float64)
    out = -(t * log_softmax(logits)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def weighted_ce_loss(logits, classes, weights: QuadrantWeights) -> float:
    """Quadrant-weighted cross-entropy sum_k W_k * (-log softmax(logits)[c_k])."""
    logits = _as_logits(logits)
    if logits.ndim != 1:
        raise ValueError("weighted_ce_loss expects a single logit vector")
    classes = check_class_ids(classes, 4, logits.shape[0], "classes")
    logp = log_softmax(logits)
    values = weights.values
    return float(-(values * logp[classes]).sum())


def kl_loss(logits, target) -> np.ndarray | float:
    """KL divergence sum_j t_j (log t_j - log softmax(logits)_j), 0 log 0 = 0."""
    t = np.asarray(target, dtype=np.float64)
    logp = log_softmax(logits)
    logt = np.where(t > 0.0, np.log(np.where(t > 0.0, t, 1.0)), 0.0)
    out = (t * (logt - logp)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def grad_soft_ce(logits, target) -> np.ndarray:
    """Gradient of soft cross-entropy (and KL) w.r.t. logits: softmax - target."""
    return softmax(logits) - np.asarray(target, dtype=np.float64)


def one_hot(classes, num_classes: int) -> np.ndarray:
    """One-hot encode integer class ids into (N, num_classes) or (num_classes,)."""
    num_classes = check_num_classes(num_classes)
    arr = np.asarray(classes)
    squeeze = arr.ndim == 0
    arr = np.atleast_1d(arr)
    arr = check_class_ids(arr, arr.shape[0], num_classes, "classes")
    out = np.zeros((arr.shape[0], num_classes), dtype=np.float64)
    out[np.arange(arr.shape[0]), arr] = 1.0
    return out[0] if squeeze else out
