"""Random image cropping and patching (RICAP) data augmentation.

Compose each training image from four randomly cropped sources and mix the
class labels in proportion to the cropped areas. Ships the random variant,
its image-only and label-only ablations, the four-image mixup comparator,
fixed-position cropping for aligned imagery, a bounding-box-correcting
variant for detection, embedding mixing, and soft-label loss kernels with a
desk-scale trainer, all reproducible from explicit 64-bit seeds.
"""

from .augment import (
    AugmentedSample,
    CropSpec,
    QuadrantWeights,
    crop_sizes,
    derive_label,
    draw_boundary,
    four_mixup,
    four_mixup_batch,
    mix_labels,
    mix_weights,
    ricap_batch,
    ricap_image_only,
    ricap_label_only,
    round_half_even,
)
from .detection import BBox, DetectionSample, ricap_detection_batch, transform_bbox
from .embedding import mix_embeddings
from .estimators import (
    DetectionAugmenter,
    LinearSoftmaxClassifier,
    RicapAugmenter,
)
from .ficap import ficap_batch, ficap_crop_origin
from .image import Rect, crop, patch_compose, quadrant_offsets
from .io import (
    DatasetManifest,
    ManifestEntry,
    decode_image,
    encode_image,
    load_images,
    load_manifest,
)
from .losses import (
    entropy,
    grad_soft_ce,
    kl_loss,
    log_softmax,
    one_hot,
    soft_ce_loss,
    softmax,
    weighted_ce_loss,
)
from .rng import RngStream
from .selfcheck import run_selfcheck
from .training import (
    LinearSoftmaxModel,
    QuadrantDataset,
    TrainingTrace,
    make_quadrant_dataset,
    train_toy,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentedSample",
    "BBox",
    "CropSpec",
    "DatasetManifest",
    "DetectionAugmenter",
    "DetectionSample",
    "LinearSoftmaxClassifier",
    "LinearSoftmaxModel",
    "ManifestEntry",
    "QuadrantDataset",
    "QuadrantWeights",
    "Rect",
    "RicapAugmenter",
    "RngStream",
    "TrainingTrace",
    "crop",
    "crop_sizes",
    "decode_image",
    "derive_label",
    "draw_boundary",
    "encode_image",
    "entropy",
    "ficap_batch",
    "ficap_crop_origin",
    "four_mixup",
    "four_mixup_batch",
    "grad_soft_ce",
    "kl_loss",
    "load_images",
    "load_manifest",
    "log_softmax",
    "make_quadrant_dataset",
    "mix_embeddings",
    "mix_labels",
    "mix_weights",
    "one_hot",
    "patch_compose",
    "quadrant_offsets",
    "ricap_batch",
    "ricap_detection_batch",
    "ricap_image_only",
    "ricap_label_only",
    "round_half_even",
    "run_selfcheck",
    "soft_ce_loss",
    "softmax",
    "train_toy",
    "transform_bbox",
    "weighted_ce_loss",
]
