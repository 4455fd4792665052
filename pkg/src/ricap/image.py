"""Image primitives: rectangular crop and four-quadrant composition.

Images are dense numpy arrays in channel-major (C, H, W) layout; a pixel at
canvas coordinate (x, y) lives at ``image[:, y, x]``. The geometry here is
value-type agnostic: it moves pixels without converting them, so 8-bit file
pixels and normalized-real training pixels go through the same code paths.
Zero-area crops are legal and produce genuine zero-sized arrays, which lets a
boundary on a canvas corner degenerate cleanly to a single-image passthrough.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .validation import check_image

QUADRANT_NAMES = ("upper-left", "upper-right", "lower-left", "lower-right")


class Rect(NamedTuple):
    """Axis-aligned pixel rectangle: origin (x, y), extent (w, h)."""

    x: int
    y: int
    w: int
    h: int


def quadrant_offsets(w: int, h: int) -> tuple[tuple[int, int], ...]:
    """Canvas placement offsets of the four quadrants for boundary (w, h)."""
    return ((0, 0), (w, 0), (0, h), (w, h))


def crop(image: np.ndarray, region: Rect) -> np.ndarray:
    """Copy the pixels of ``region`` out of ``image``.

    Raises ValueError naming the offending coordinate if the region does not
    lie fully inside the image bounds.
    """
    image = check_image(image)
    x, y, w, h = (int(v) for v in region)
    _, height, width = image.shape
    if x < 0 or y < 0 or w < 0 or h < 0:
        raise ValueError(f"crop region must be non-negative, got {Rect(x, y, w, h)}")
    if x + w > width:
        raise ValueError(f"crop exceeds image width: x + w = {x + w} > {width}")
    if y + h > height:
        raise ValueError(f"crop exceeds image height: y + h = {y + h} > {height}")
    return image[:, y : y + h, x : x + w].copy()


def patch_compose(
    ul: np.ndarray,
    ur: np.ndarray,
    ll: np.ndarray,
    lr: np.ndarray,
    boundary: tuple[int, int],
    canvas: tuple[int, int],
) -> np.ndarray:
    """Tile four patches into one (C, I_y, I_x) canvas split at ``boundary``.

    ``boundary`` is the (w, h) split point and ``canvas`` the output size
    (I_x, I_y). The patches must measure w x h, (I_x - w) x h, w x (I_y - h)
    and (I_x - w) x (I_y - h) respectively; each output pixel is a bitwise
    copy from exactly one patch.
    """
    w, h = (int(v) for v in boundary)
    canvas_w, canvas_h = (int(v) for v in canvas)
    if not (0 <= w <= canvas_w and 0 <= h <= canvas_h):
        raise ValueError(
            f"boundary {(w, h)} outside canvas {canvas_w}x{canvas_h}"
        )
    patches = (ul, ur, ll, lr)
    widths = (w, canvas_w - w, w, canvas_w - w)
    heights = (h, h, canvas_h - h, canvas_h - h)

    channels = np.asarray(patches[0]).shape[0] if np.asarray(patches[0]).ndim == 3 else None
    for name, patch, pw, ph in zip(QUADRANT_NAMES, patches, widths, heights):
        patch = np.asarray(patch)
        if patch.ndim != 3:
            raise ValueError(f"{name} patch must be 3-d, got shape {patch.shape}")
        if patch.shape[1] != ph or patch.shape[2] != pw:
            raise ValueError(
                f"{name} patch has size {patch.shape[2]}x{patch.shape[1]}, "
                f"expected {pw}x{ph} for boundary {(w, h)} on canvas "
                f"{canvas_w}x{canvas_h}"
            )
        if patch.shape[0] != channels:
            raise ValueError(
                f"{name} patch has {patch.shape[0]} channels, expected {channels}"
            )

    dtype = np.result_type(*(np.asarray(p).dtype for p in patches))
    out = np.empty((channels, canvas_h, canvas_w), dtype=dtype)
    for patch, (dx, dy), pw, ph in zip(patches, quadrant_offsets(w, h), widths, heights):
        out[:, dy : dy + ph, dx : dx + pw] = patch
    return out
