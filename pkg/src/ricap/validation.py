"""Input validation helpers shared by the public API."""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1

#: Channel counts accepted for image tensors.
VALID_CHANNELS = (1, 3, 4)


def check_seed(value: int, name: str = "seed") -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value <= MAX_SEED:
        raise ValueError(f"{name} must be in [0, 2**64), got {value}")
    return int(value)


def check_beta(value: float, name: str = "beta") -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be a finite value >= 0, got {value}")
    return value


def check_fraction(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return value


def check_image(image: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate a single image tensor with channel-major (C, H, W) layout."""
    image = np.asarray(image)
    if image.ndim != 3:
        raise ValueError(
            f"{name} must be a 3-d array in (channels, height, width) layout, "
            f"got shape {image.shape}"
        )
    if image.shape[0] not in VALID_CHANNELS:
        raise ValueError(
            f"{name} must have {VALID_CHANNELS} channels, got {image.shape[0]}"
        )
    return image


def check_image_batch(images, name: str = "images") -> np.ndarray:
    """Validate a batch of images as a (N, C, H, W) array of uniform shape."""
    if isinstance(images, np.ndarray):
        batch = images
    else:
        items = list(images)
        if not items:
            raise ValueError(f"{name} must be a nonempty batch")
        shapes = {np.asarray(im).shape for im in items}
        if len(shapes) != 1:
            raise ValueError(
                f"{name} must share one (channels, height, width) shape, "
                f"got {sorted(shapes)}"
            )
        batch = np.stack([np.asarray(im) for im in items])
    if batch.ndim != 4:
        raise ValueError(
            f"{name} must be a 4-d (batch, channels, height, width) array, "
            f"got shape {batch.shape}"
        )
    if batch.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty batch")
    if batch.shape[1] not in VALID_CHANNELS:
        raise ValueError(
            f"{name} must have {VALID_CHANNELS} channels, got {batch.shape[1]}"
        )
    return batch


def check_class_ids(labels, n: int, num_classes: int, name: str = "labels") -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise ValueError(f"{name} must be integer class ids, got dtype {labels.dtype}")
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        bad = labels[(labels < 0) | (labels >= num_classes)][0]
        raise ValueError(
            f"{name} contains class id {bad} outside [0, {num_classes})"
        )
    return labels.astype(np.int64, copy=False)


def check_num_classes(value: int, name: str = "num_classes") -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
