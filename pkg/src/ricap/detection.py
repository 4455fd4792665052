"""Cropping-and-patching augmentation for object detection samples.

Detection labels are box coordinates regressed with squared-error style
losses, so they cannot be soft-mixed the way class probabilities can. The
detection variant therefore crops and patches the input images only, and
corrects each bounding box against the crop that carried it: the box is
intersected with the crop region, translated into the patched frame, and
dropped when the visible fraction of its original area falls below
``min_visibility`` (0 keeps any positive sliver).

Boxes are center-form (cx, cy, w, h) in absolute pixels; intersection and
translation happen in corner form with exact real arithmetic, so no rounding
accumulates across the transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import _draw_specs
from .image import Rect, patch_compose, quadrant_offsets
from .rng import RngStream
from .validation import check_fraction, check_image_batch

from .image import crop as crop_image


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box: class id, center (cx, cy), extent (w, h), in pixels."""

    class_id: int
    cx: float
    cy: float
    w: float
    h: float

    def corners(self) -> tuple[float, float, float, float]:
        """(x1, y1, x2, y2) corner form."""
        return (
            self.cx - self.w / 2.0,
            self.cy - self.h / 2.0,
            self.cx + self.w / 2.0,
            self.cy + self.h / 2.0,
        )


@dataclass
class DetectionSample:
    """One image with its ground-truth boxes.

    Augmented outputs additionally carry the boundary and crop specs they
    were composed from, for auditing; inputs leave them as None.
    """

    image: np.ndarray
    boxes: list[BBox]
    specs: tuple | None = None
    boundary: tuple[int, int] | None = None


def transform_bbox(
    box: BBox,
    crop: Rect,
    placement: tuple[int, int],
    min_visibility: float = 0.0,
) -> BBox | None:
    """Map ``box`` through a crop placed at ``placement`` in the output frame.

    Returns the corrected box, or None when the box misses the crop entirely
    or its visible fraction falls below ``min_visibility``.
    """
    if box.w <= 0 or box.h <= 0:
        raise ValueError(f"box must have positive area, got w={box.w}, h={box.h}")
    min_visibility = check_fraction(min_visibility, "min_visibility")

    x1, y1, x2, y2 = box.corners()
    ix1 = max(x1, float(crop.x))
    iy1 = max(y1, float(crop.y))
    ix2 = min(x2, float(crop.x + crop.w))
    iy2 = min(y2, float(crop.y + crop.h))
    iw = ix2 - ix1
    ih = iy2 - iy1
    if iw <= 0.0 or ih <= 0.0:
        return None
    if (iw * ih) / (box.w * box.h) < min_visibility:
        return None

    dx = placement[0] - crop.x
    dy = placement[1] - crop.y
    return BBox(
        class_id=box.class_id,
        cx=(ix1 + ix2) / 2.0 + dx,
        cy=(iy1 + iy2) / 2.0 + dy,
        w=iw,
        h=ih,
    )


def _check_boxes(sample: DetectionSample, width: int, height: int, index: int) -> None:
    for box in sample.boxes:
        x1, y1, x2, y2 = box.corners()
        if box.w <= 0 or box.h <= 0:
            raise ValueError(
                f"sample {index}: box must have positive area, got w={box.w}, h={box.h}"
            )
        if x1 < 0 or y1 < 0 or x2 > width or y2 > height:
            raise ValueError(
                f"sample {index}: box {(x1, y1, x2, y2)} outside image bounds "
                f"{width}x{height}"
            )


def ricap_detection_batch(
    samples: list[DetectionSample],
    beta: float,
    rng: RngStream,
    min_visibility: float = 0.0,
    boundary: str = "per-batch",
) -> list[DetectionSample]:
    """Crop and patch detection samples, correcting boxes and mixing no labels.

    Output boxes are the union, over the four quadrants, of every source box
    transformed against that quadrant's crop and placement. Every surviving
    box lies inside its quadrant's placed rectangle.
    """
    if not samples:
        raise ValueError("samples must be a nonempty batch")
    min_visibility = check_fraction(min_visibility, "min_visibility")
    images = check_image_batch([s.image for s in samples])
    canvas_h, canvas_w = images.shape[2], images.shape[3]
    for i, sample in enumerate(samples):
        _check_boxes(sample, canvas_w, canvas_h, i)

    drawn = _draw_specs(len(samples), canvas_w, canvas_h, beta, rng, boundary, False)
    out = []
    for bnd, specs in drawn:
        patches = [crop_image(images[s.source_index], s.rect) for s in specs]
        image = patch_compose(*patches, boundary=bnd, canvas=(canvas_w, canvas_h))
        offsets = quadrant_offsets(*bnd)
        boxes: list[BBox] = []
        for k, spec in enumerate(specs):
            if spec.w == 0 or spec.h == 0:
                continue
            for box in samples[spec.source_index].boxes:
                moved = transform_bbox(box, spec.rect, offsets[k], min_visibility)
                if moved is not None:
                    boxes.append(moved)
        out.append(DetectionSample(image=image, boxes=boxes, specs=specs, boundary=bnd))
    return out
