"""Random image cropping and patching (RICAP) and its comparator variants.

One augmented sample is built from four source images: a boundary position
(w, h) splits the canvas into four quadrants, each quadrant is filled with a
random crop of matching size taken from its source, and the class labels are
mixed with weights proportional to the quadrant areas. The boundary comes
from symmetric Beta(beta, beta) fractions of the canvas size, so beta tunes
how aggressively images get mixed: beta = 0 degenerates to passing originals
through, beta = 1 spreads the boundary uniformly over the canvas.

Two batch semantics are provided. ``per-batch`` draws one boundary per batch,
one whole-batch source permutation per quadrant, and one crop origin per
quadrant shared by every sample; the stream is consumed in exactly that
order. ``per-sample`` gives every output its own boundary, four uniform
source indices, and its own crop origins, drawn from a child stream keyed by
(batch nonce, sample index) so per-sample work is order-independent.

Quadrant weights are kept as exact integer areas over the integer canvas
area; floating-point weights and soft labels are produced by a single final
division, which keeps label mixing bit-identical to a per-pixel count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import Rect, crop, patch_compose, quadrant_offsets
from .rng import RngStream
from .validation import check_beta, check_class_ids, check_image_batch, check_num_classes

BOUNDARY_MODES = ("per-batch", "per-sample")

UL, UR, LL, LR = 0, 1, 2, 3


def round_half_even(value: float) -> int:
    """Round to the nearest integer, ties to the even neighbor."""
    return int(round(float(value)))


@dataclass(frozen=True)
class CropSpec:
    """Provenance of one quadrant: which source was cropped where."""

    quadrant: int
    source_index: int
    x: int
    y: int
    w: int
    h: int

    @property
    def rect(self) -> Rect:
        return Rect(self.x, self.y, self.w, self.h)

    @property
    def area(self) -> int:
        return self.w * self.h


@dataclass(frozen=True)
class QuadrantWeights:
    """Area-proportional mixing weights as exact integer ratios.

    ``areas[k] / total`` is the weight of quadrant k; the integer areas always
    sum to ``total`` exactly, so conservation holds without rounding.
    """

    areas: tuple[int, int, int, int]
    total: int

    def __post_init__(self):
        if sum(self.areas) != self.total:
            raise ValueError(
                f"quadrant areas {self.areas} do not sum to canvas area {self.total}"
            )

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.areas, dtype=np.float64) / float(self.total)

    def argmax(self) -> int:
        """Index of the heaviest quadrant; ties go to the lowest index."""
        return int(np.argmax(self.areas))


@dataclass
class AugmentedSample:
    """One augmented image together with its label and full provenance."""

    image: np.ndarray
    label: np.ndarray
    weights: QuadrantWeights
    specs: tuple[CropSpec, CropSpec, CropSpec, CropSpec]
    boundary: tuple[int, int]


def draw_boundary(
    canvas_w: int, canvas_h: int, beta: float, rng: RngStream
) -> tuple[int, int]:
    """Draw the boundary position (w, h) on a canvas_w x canvas_h canvas.

    w = round(w' * canvas_w) and h = round(h' * canvas_h) with w', h'
    independent Beta(beta, beta) draws; ties round half to even.
    """
    if canvas_w < 1 or canvas_h < 1:
        raise ValueError(f"canvas must be at least 1x1, got {canvas_w}x{canvas_h}")
    beta = check_beta(beta)
    w = round_half_even(rng.beta(beta) * canvas_w)
    h = round_half_even(rng.beta(beta) * canvas_h)
    return w, h


def crop_sizes(
    boundary: tuple[int, int], canvas_w: int, canvas_h: int
) -> tuple[tuple[int, int], ...]:
    """Quadrant crop sizes (w_k, h_k) in order UL, UR, LL, LR."""
    w, h = (int(v) for v in boundary)
    if not (0 <= w <= canvas_w and 0 <= h <= canvas_h):
        raise ValueError(f"boundary {(w, h)} outside canvas {canvas_w}x{canvas_h}")
    return (
        (w, h),
        (canvas_w - w, h),
        (w, canvas_h - h),
        (canvas_w - w, canvas_h - h),
    )


def mix_weights(
    sizes: tuple[tuple[int, int], ...], canvas_w: int, canvas_h: int
) -> QuadrantWeights:
    """Area-proportional weights W_k = w_k * h_k / (canvas_w * canvas_h)."""
    areas = tuple(int(w) * int(h) for w, h in sizes)
    return QuadrantWeights(areas, int(canvas_w) * int(canvas_h))


def mix_labels(classes, weights: QuadrantWeights, num_classes: int) -> np.ndarray:
    """Mix four one-hot labels into a soft label with the quadrant weights.

    Duplicate classes accumulate. Integer areas are summed per class before
    the single division, so the result matches a per-pixel source-class count
    exactly.
    """
    num_classes = check_num_classes(num_classes)
    classes = check_class_ids(classes, 4, num_classes, "classes")
    per_class = np.zeros(num_classes, dtype=np.int64)
    np.add.at(per_class, classes, np.asarray(weights.areas, dtype=np.int64))
    return per_class.astype(np.float64) / float(weights.total)


def _compose(images: np.ndarray, boundary, specs) -> np.ndarray:
    patches = [crop(images[s.source_index], s.rect) for s in specs]
    canvas = (images.shape[3], images.shape[2])
    return patch_compose(*patches, boundary=boundary, canvas=canvas)


def _draw_specs(
    n: int,
    canvas_w: int,
    canvas_h: int,
    beta: float,
    rng: RngStream,
    boundary_mode: str,
    fixed_origins: bool,
) -> list[tuple[tuple[int, int], tuple[CropSpec, ...]]]:
    """Draw per-sample (boundary, four CropSpec) for a batch of size n."""
    if boundary_mode not in BOUNDARY_MODES:
        raise ValueError(
            f"boundary mode must be one of {BOUNDARY_MODES}, got {boundary_mode!r}"
        )

    if boundary_mode == "per-batch":
        boundary = draw_boundary(canvas_w, canvas_h, beta, rng)
        sizes = crop_sizes(boundary, canvas_w, canvas_h)
        offsets = quadrant_offsets(*boundary)
        sources = []
        origins = []
        for k, (wk, hk) in enumerate(sizes):
            sources.append(rng.permutation(n))
            if fixed_origins:
                origins.append(offsets[k])
            else:
                xk = rng.uniform_int(0, canvas_w - wk)
                yk = rng.uniform_int(0, canvas_h - hk)
                origins.append((xk, yk))
        out = []
        for i in range(n):
            specs = tuple(
                CropSpec(k, sources[k][i], origins[k][0], origins[k][1], wk, hk)
                for k, (wk, hk) in enumerate(sizes)
            )
            out.append((boundary, specs))
        return out

    # per-sample: child streams keyed by a batch nonce and the sample index,
    # so fanning samples out across workers cannot change the result.
    nonce = rng.next_u64()
    out = []
    for i in range(n):
        sub = rng.derive(nonce, i)
        boundary = draw_boundary(canvas_w, canvas_h, beta, sub)
        sizes = crop_sizes(boundary, canvas_w, canvas_h)
        offsets = quadrant_offsets(*boundary)
        specs = []
        for k, (wk, hk) in enumerate(sizes):
            src = sub.uniform_int(0, n - 1)
            if fixed_origins:
                xk, yk = offsets[k]
            else:
                xk = sub.uniform_int(0, canvas_w - wk)
                yk = sub.uniform_int(0, canvas_h - hk)
            specs.append(CropSpec(k, src, xk, yk, wk, hk))
        out.append((boundary, tuple(specs)))
    return out


def _augment_batch(
    images,
    labels,
    num_classes: int,
    beta: float,
    rng: RngStream,
    boundary_mode: str,
    fixed_origins: bool,
) -> list[AugmentedSample]:
    images = check_image_batch(images)
    n = images.shape[0]
    num_classes = check_num_classes(num_classes)
    labels = check_class_ids(labels, n, num_classes)
    canvas_h, canvas_w = images.shape[2], images.shape[3]

    drawn = _draw_specs(n, canvas_w, canvas_h, beta, rng, boundary_mode, fixed_origins)
    out = []
    for boundary, specs in drawn:
        sizes = tuple((s.w, s.h) for s in specs)
        weights = mix_weights(sizes, canvas_w, canvas_h)
        classes = [labels[s.source_index] for s in specs]
        label = mix_labels(classes, weights, num_classes)
        out.append(
            AugmentedSample(
                image=_compose(images, boundary, specs),
                label=label,
                weights=weights,
                specs=specs,
                boundary=boundary,
            )
        )
    return out


def ricap_batch(
    images,
    labels,
    num_classes: int,
    beta: float,
    rng: RngStream,
    boundary: str = "per-batch",
) -> list[AugmentedSample]:
    """Augment a batch by random cropping and patching with soft labels.

    ``images`` is a nonempty (N, C, H, W) batch of uniform shape, ``labels``
    the matching integer class ids. Returns one :class:`AugmentedSample` per
    input position; labels can be re-derived from the stored crop specs.
    """
    return _augment_batch(images, labels, num_classes, beta, rng, boundary, False)


def ricap_image_only(
    images,
    labels,
    num_classes: int,
    beta: float,
    rng: RngStream,
    boundary: str = "per-batch",
) -> list[tuple[np.ndarray, int]]:
    """Image mixing without label mixing: hard label of the largest quadrant.

    Produces the same composed images as :func:`ricap_batch` for the same
    stream; the label is the class of the max-weight quadrant, ties broken by
    the lowest quadrant index (upper-left first).
    """
    samples = _augment_batch(images, labels, num_classes, beta, rng, boundary, False)
    labels = np.asarray(labels)
    return [
        (s.image, int(labels[s.specs[s.weights.argmax()].source_index]))
        for s in samples
    ]


def ricap_label_only(
    images,
    labels,
    num_classes: int,
    beta: float,
    rng: RngStream,
    boundary: str = "per-batch",
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Label mixing without image mixing.

    The output image is the untouched source image of the max-weight quadrant
    (ties to upper-left); the label is the full four-way soft label. Draws are
    stream-aligned with :func:`ricap_batch`.
    """
    images = check_image_batch(images)
    samples = _augment_batch(images, labels, num_classes, beta, rng, boundary, False)
    return [
        (images[s.specs[s.weights.argmax()].source_index].copy(), s.label)
        for s in samples
    ]


def four_mixup_batch(
    images,
    labels,
    num_classes: int,
    beta: float,
    rng: RngStream,
    boundary: str = "per-batch",
) -> list[AugmentedSample]:
    """Alpha-blend four whole images with quadrant-area weights.

    The comparator to cropping-and-patching: boundaries, sources and weights
    are drawn exactly as in :func:`ricap_batch` (same stream, same order), but
    the output image is the pixel-wise convex combination sum_k W_k * image_k
    of the whole source images. The stored crop specs record the draw the
    weights came from. Requires real-valued pixels.
    """
    images = check_image_batch(images)
    if not np.issubdtype(images.dtype, np.floating):
        raise ValueError(
            f"four_mixup requires real-valued pixels, got dtype {images.dtype}"
        )
    n = images.shape[0]
    num_classes = check_num_classes(num_classes)
    labels = check_class_ids(labels, n, num_classes)
    canvas_h, canvas_w = images.shape[2], images.shape[3]

    drawn = _draw_specs(n, canvas_w, canvas_h, beta, rng, boundary, False)
    out = []
    for bnd, specs in drawn:
        sizes = tuple((s.w, s.h) for s in specs)
        weights = mix_weights(sizes, canvas_w, canvas_h)
        values = weights.values
        live = [k for k in range(4) if weights.areas[k] > 0]
        if len(live) == 1:
            blended = images[specs[live[0]].source_index].copy()
        else:
            # Anchored form of sum_k W_k v_k: identical inputs and degenerate
            # weights reproduce their source bit for bit.
            anchor = images[specs[live[0]].source_index].astype(np.float64)
            acc = anchor.copy()
            for k in live[1:]:
                acc += values[k] * (images[specs[k].source_index] - anchor)
            blended = acc.astype(images.dtype, copy=False)
        classes = [labels[s.source_index] for s in specs]
        out.append(
            AugmentedSample(
                image=blended,
                label=mix_labels(classes, weights, num_classes),
                weights=weights,
                specs=specs,
                boundary=bnd,
            )
        )
    return out


def four_mixup(
    images,
    labels,
    num_classes: int,
    beta: float,
    rng: RngStream,
    boundary: str = "per-batch",
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Blend four images pixel-wise; returns (image, soft label) pairs."""
    samples = four_mixup_batch(images, labels, num_classes, beta, rng, boundary)
    return [(s.image, s.label) for s in samples]


def derive_label(
    specs, source_classes, num_classes: int, canvas_w: int, canvas_h: int
) -> np.ndarray:
    """Recompute the soft label of a sample from its crop specs.

    ``source_classes`` gives the class id per quadrant in spec order. Used by
    provenance audits to confirm stored labels match stored geometry.
    """
    sizes = tuple((s.w, s.h) for s in specs)
    weights = mix_weights(sizes, canvas_w, canvas_h)
    return mix_labels(source_classes, weights, num_classes)
