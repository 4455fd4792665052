"""Fixed image cropping and patching (FICAP) for position-aligned imagery.

Person re-identification style images keep body parts at stable absolute
positions, so random crop origins would destroy the alignment that retrieval
relies on. FICAP therefore pins each quadrant's crop to the absolute region
it will occupy in the output: the upper-left crop starts at (0, 0), the
upper-right at (w, 0), the lower-left at (0, h), the lower-right at (w, h).
The boundary position itself is still drawn randomly, and labels are mixed by
area exactly as in the random variant.

A direct consequence is that composing four position-preserving crops of one
image reconstructs that image bit for bit, for every boundary.
"""

from __future__ import annotations


from .augment import AugmentedSample, _augment_batch
from .image import quadrant_offsets
from .rng import RngStream


def ficap_crop_origin(quadrant: int, boundary: tuple[int, int]) -> tuple[int, int]:
    """Fixed crop origin of ``quadrant`` (0..3 = UL, UR, LL, LR)."""
    if quadrant not in (0, 1, 2, 3):
        raise ValueError(f"quadrant must be 0..3, got {quadrant}")
    w, h = (int(v) for v in boundary)
    return quadrant_offsets(w, h)[quadrant]


def ficap_batch(
    images,
    labels,
    num_classes: int,
    beta: float,
    rng: RngStream,
    boundary: str = "per-batch",
) -> list[AugmentedSample]:
    """Augment a batch with position-preserving crops.

    Same contract and source selection as random cropping-and-patching, but
    crop origins are fixed by :func:`ficap_crop_origin` and consume no random
    draws: every output pixel at (x, y) comes from its source's pixel (x, y).
    """
    return _augment_batch(images, labels, num_classes, beta, rng, boundary, True)
