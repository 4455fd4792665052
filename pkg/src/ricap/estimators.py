"""Estimator-style wrappers so augmentation composes with the sklearn world.

:class:`RicapAugmenter` is a batch resampler in the spirit of transformer
estimators: parameters live in ``__init__`` (so ``get_params`` / ``clone``
work), ``fit`` validates inputs and seeds the stream, and ``transform``
consumes the stream to produce a fresh augmented batch per call. Because
augmentation rewrites labels as well as pixels, ``transform(X, y)`` returns
an ``(X_aug, y_aug)`` pair rather than images alone.

:class:`LinearSoftmaxClassifier` wraps the desk-scale trainer as a regular
classifier with ``fit`` / ``predict`` / ``predict_proba``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .augment import (
    BOUNDARY_MODES,
    four_mixup_batch,
    ricap_batch,
    ricap_image_only,
    ricap_label_only,
)
from .detection import DetectionSample, ricap_detection_batch
from .ficap import ficap_batch
from .losses import softmax
from .rng import RngStream
from .training import (
    TRAINER_AUGMENTS,
    LinearSoftmaxModel,
    QuadrantDataset,
    train_toy,
)
from .validation import (
    check_beta,
    check_class_ids,
    check_fraction,
    check_image_batch,
    check_num_classes,
    check_seed,
)

CLASSIFICATION_VARIANTS = (
    "ricap",
    "ricap-image-only",
    "ricap-label-only",
    "four-mixup",
    "ficap",
)


class RicapAugmenter(BaseEstimator):
    """Crop-and-patch augmentation with soft labels, as an estimator.

    Parameters
    ----------
    variant : one of "ricap", "ricap-image-only", "ricap-label-only",
        "four-mixup", "ficap".
    beta : concentration of the symmetric Beta boundary draw; 0 passes
        originals through.
    boundary : "per-batch" (one boundary and per-quadrant permutations per
        call) or "per-sample".
    num_classes : number of classes, or None to infer max(y) + 1 in fit.
    seed : stream seed; each transform call advances the stream, refitting
        rewinds it.
    """

    def __init__(
        self,
        variant: str = "ricap",
        beta: float = 0.3,
        boundary: str = "per-batch",
        num_classes: int | None = None,
        seed: int = 0,
    ):
        self.variant = variant
        self.beta = beta
        self.boundary = boundary
        self.num_classes = num_classes
        self.seed = seed

    def _validate(self, X, y):
        if self.variant not in CLASSIFICATION_VARIANTS:
            raise ValueError(
                f"variant must be one of {CLASSIFICATION_VARIANTS}, got {self.variant!r}"
            )
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(
                f"boundary must be one of {BOUNDARY_MODES}, got {self.boundary!r}"
            )
        check_beta(self.beta)
        X = check_image_batch(X, "X")
        if self.num_classes is not None:
            num_classes = check_num_classes(self.num_classes)
        else:
            num_classes = int(np.max(y)) + 1
        y = check_class_ids(y, X.shape[0], num_classes, "y")
        return X, y, num_classes

    def fit(self, X, y):
        X, y, num_classes = self._validate(X, y)
        self.num_classes_ = num_classes
        self.rng_ = RngStream(check_seed(self.seed))
        return self

    def transform(self, X, y):
        """Augment one batch; returns (images, labels).

        Labels are (N, num_classes) soft labels, except for the
        "ricap-image-only" variant which returns hard (N,) class ids.
        """
        if not hasattr(self, "rng_"):
            raise ValueError("this RicapAugmenter instance is not fitted yet")
        X, y, _ = self._validate(X, y)
        num_classes = self.num_classes_
        args = (X, y, num_classes, self.beta, self.rng_, self.boundary)
        if self.variant == "ricap":
            samples = ricap_batch(*args)
            return np.stack([s.image for s in samples]), np.stack(
                [s.label for s in samples]
            )
        if self.variant == "ficap":
            samples = ficap_batch(*args)
            return np.stack([s.image for s in samples]), np.stack(
                [s.label for s in samples]
            )
        if self.variant == "four-mixup":
            samples = four_mixup_batch(*args)
            return np.stack([s.image for s in samples]), np.stack(
                [s.label for s in samples]
            )
        if self.variant == "ricap-image-only":
            pairs = ricap_image_only(*args)
            return np.stack([im for im, _ in pairs]), np.array(
                [c for _, c in pairs], dtype=np.int64
            )
        pairs = ricap_label_only(*args)
        return np.stack([im for im, _ in pairs]), np.stack([lb for _, lb in pairs])

    def fit_transform(self, X, y):
        return self.fit(X, y).transform(X, y)


class DetectionAugmenter(BaseEstimator):
    """Crop-and-patch for detection samples: boxes corrected, labels untouched."""

    def __init__(
        self,
        beta: float = 0.3,
        boundary: str = "per-batch",
        min_visibility: float = 0.0,
        seed: int = 0,
    ):
        self.beta = beta
        self.boundary = boundary
        self.min_visibility = min_visibility
        self.seed = seed

    def fit(self, X: list[DetectionSample], y=None):
        check_beta(self.beta)
        check_fraction(self.min_visibility, "min_visibility")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(
                f"boundary must be one of {BOUNDARY_MODES}, got {self.boundary!r}"
            )
        self.rng_ = RngStream(check_seed(self.seed))
        return self

    def transform(self, X: list[DetectionSample]) -> list[DetectionSample]:
        if not hasattr(self, "rng_"):
            raise ValueError("this DetectionAugmenter instance is not fitted yet")
        return ricap_detection_batch(
            X, self.beta, self.rng_, self.min_visibility, self.boundary
        )

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


class LinearSoftmaxClassifier(BaseEstimator, ClassifierMixin):
    """Linear softmax classifier trained by SGD with optional augmentation.

    ``X`` is a (N, C, H, W) image batch; pixels are flattened into features.
    After fit, ``trace_`` holds the per-step training record.
    """

    def __init__(
        self,
        augment: str = "none",
        beta: float = 0.3,
        steps: int = 2000,
        lr: float = 0.02,
        batch_size: int = 64,
        eval_every: int = 100,
        seed: int = 0,
    ):
        self.augment = augment
        self.beta = beta
        self.steps = steps
        self.lr = lr
        self.batch_size = batch_size
        self.eval_every = eval_every
        self.seed = seed

    def fit(self, X, y, eval_set: tuple | None = None):
        if self.augment not in TRAINER_AUGMENTS:
            raise ValueError(
                f"augment must be one of {TRAINER_AUGMENTS}, got {self.augment!r}"
            )
        X = check_image_batch(X, "X")
        num_classes = int(np.max(y)) + 1
        y = check_class_ids(y, X.shape[0], num_classes, "y")
        if eval_set is not None:
            test_X = check_image_batch(eval_set[0], "eval_set images")
            test_y = check_class_ids(
                eval_set[1], test_X.shape[0], num_classes, "eval_set labels"
            )
        else:
            # Trace test error on the training data when no held-out set given.
            test_X, test_y = X, y
        dataset = QuadrantDataset(X, y, test_X, test_y, num_classes)
        self.model_, self.trace_ = train_toy(
            dataset,
            augment=self.augment,
            beta=self.beta,
            steps=self.steps,
            lr=self.lr,
            batch_size=self.batch_size,
            eval_every=self.eval_every,
            seed=self.seed,
        )
        self.classes_ = np.arange(num_classes)
        return self

    def _check_fitted(self) -> LinearSoftmaxModel:
        if not hasattr(self, "model_"):
            raise ValueError("this LinearSoftmaxClassifier instance is not fitted yet")
        return self.model_

    def decision_function(self, X) -> np.ndarray:
        model = self._check_fitted()
        X = check_image_batch(X, "X")
        return model.logits(X.reshape(X.shape[0], -1).astype(np.float64))

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return self.decision_function(X).argmax(axis=1)
