"""Desk-scale training loop exercising augmentation through real gradients.

The model is a linear softmax classifier on flattened pixels: small enough to
train in seconds, expressive enough to show the characteristic signature of
area-weighted soft labels (training loss that stays bounded away from zero
while clean test accuracy holds up). The dataset is synthetic: each class has
a dominant color, so the classes are linearly separable by construction and a
plain-label baseline drives its training error to zero.

Per mixed minibatch, the trace records the KL divergence between target and
prediction (which, unlike cross-entropy, converges to zero for soft targets
as well), the training error under the highest-occupancy rule (the class of
the largest quadrant counts as correct), and periodically the clean test
error.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .augment import four_mixup_batch, ricap_batch
from .losses import kl_loss, one_hot, softmax
from .rng import RngStream
from .validation import check_seed

TRAINER_AUGMENTS = ("none", "ricap", "ricap-image-only", "four-mixup")


@dataclass
class QuadrantDataset:
    """Synthetic color-coded dataset with a train/test split."""

    train_images: np.ndarray
    train_labels: np.ndarray
    test_images: np.ndarray
    test_labels: np.ndarray
    num_classes: int


def make_quadrant_dataset(
    num_classes: int = 10,
    train_size: int = 2000,
    test_size: int = 500,
    side: int = 16,
    channels: int = 3,
    noise: float = 0.1,
    seed: int = 0,
) -> QuadrantDataset:
    """Build a class-balanced dataset of noisy solid-color images.

    Class c gets the color 0.5 + 0.45 cos(2 pi (c / C + ch / 3)) per channel,
    plus i.i.d. Gaussian pixel noise. Deterministic for a fixed seed.
    """
    check_seed(seed)
    gen = np.random.default_rng(seed)
    palette = np.empty((num_classes, channels), dtype=np.float64)
    for c in range(num_classes):
        for ch in range(channels):
            palette[c, ch] = 0.5 + 0.45 * math.cos(
                2.0 * math.pi * (c / num_classes + ch / 3.0)
            )

    def build(count: int) -> tuple[np.ndarray, np.ndarray]:
        labels = np.arange(count, dtype=np.int64) % num_classes
        images = palette[labels][:, :, None, None] * np.ones(
            (count, channels, side, side)
        )
        images += noise * gen.standard_normal(images.shape)
        return images, labels

    train_images, train_labels = build(train_size)
    test_images, test_labels = build(test_size)
    return QuadrantDataset(
        train_images, train_labels, test_images, test_labels, num_classes
    )


@dataclass
class LinearSoftmaxModel:
    """Linear softmax classifier: logits = pixels @ weights.T + bias."""

    weights: np.ndarray
    bias: np.ndarray

    @classmethod
    def zeros(cls, num_classes: int, num_features: int) -> "LinearSoftmaxModel":
        return cls(
            weights=np.zeros((num_classes, num_features), dtype=np.float64),
            bias=np.zeros(num_classes, dtype=np.float64),
        )

    def logits(self, flat: np.ndarray) -> np.ndarray:
        return flat @ self.weights.T + self.bias

    def predict(self, images: np.ndarray) -> np.ndarray:
        flat = images.reshape(images.shape[0], -1).astype(np.float64)
        return self.logits(flat).argmax(axis=1)

    def error_rate(self, images: np.ndarray, labels: np.ndarray) -> float:
        return float(np.mean(self.predict(images) != labels))


@dataclass
class TraceRow:
    step: int
    train_kl: float
    train_err: float
    test_err: float | None = None


@dataclass
class TrainingTrace:
    """Per-step training record, exportable as CSV for plotting."""

    rows: list[TraceRow] = field(default_factory=list)

    def write_csv(self, dest: str | IO[str]) -> None:
        """Write rows as CSV with header step,train_kl,train_err,test_err."""
        if hasattr(dest, "write"):
            self._write(dest)
        else:
            with open(dest, "w", newline="") as handle:
                self._write(handle)

    def _write(self, handle: IO[str]) -> None:
        writer = csv.writer(handle)
        writer.writerow(["step", "train_kl", "train_err", "test_err"])
        for row in self.rows:
            writer.writerow(
                [
                    row.step,
                    repr(row.train_kl),
                    repr(row.train_err),
                    "" if row.test_err is None else repr(row.test_err),
                ]
            )

    @property
    def final(self) -> TraceRow:
        return self.rows[-1]


def _augment_minibatch(images, labels, num_classes, augment, beta, stream):
    """Returns (batch images, soft targets, highest-occupancy classes)."""
    if augment == "none":
        return images, one_hot(labels, num_classes), labels
    if augment == "ricap":
        samples = ricap_batch(images, labels, num_classes, beta, stream)
        occupancy = np.array(
            [labels[s.specs[s.weights.argmax()].source_index] for s in samples]
        )
        return (
            np.stack([s.image for s in samples]),
            np.stack([s.label for s in samples]),
            occupancy,
        )
    if augment == "ricap-image-only":
        samples = ricap_batch(images, labels, num_classes, beta, stream)
        occupancy = np.array(
            [labels[s.specs[s.weights.argmax()].source_index] for s in samples]
        )
        return (
            np.stack([s.image for s in samples]),
            one_hot(occupancy, num_classes),
            occupancy,
        )
    if augment == "four-mixup":
        samples = four_mixup_batch(images, labels, num_classes, beta, stream)
        occupancy = np.array(
            [labels[s.specs[s.weights.argmax()].source_index] for s in samples]
        )
        return (
            np.stack([s.image for s in samples]),
            np.stack([s.label for s in samples]),
            occupancy,
        )
    raise ValueError(f"augment must be one of {TRAINER_AUGMENTS}, got {augment!r}")


def train_toy(
    dataset: QuadrantDataset,
    augment: str = "none",
    beta: float = 0.3,
    steps: int = 2000,
    lr: float = 0.02,
    batch_size: int = 64,
    eval_every: int = 100,
    seed: int = 0,
) -> tuple[LinearSoftmaxModel, TrainingTrace]:
    """Train the linear softmax model with plain SGD and optional augmentation.

    Every step draws its minibatch and augmentation from a stream keyed by
    (seed, step); identical seeds reproduce the trace bitwise. The loss is the
    KL divergence to the (possibly soft) target; its gradient matches soft
    cross-entropy.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    if lr <= 0:
        raise ValueError(f"lr must be positive, got {lr}")
    if augment not in TRAINER_AUGMENTS:
        raise ValueError(f"augment must be one of {TRAINER_AUGMENTS}, got {augment!r}")

    images = dataset.train_images
    labels = dataset.train_labels
    n, channels, height, width = images.shape
    num_features = channels * height * width
    model = LinearSoftmaxModel.zeros(dataset.num_classes, num_features)
    master = RngStream(seed)
    trace = TrainingTrace()

    for step in range(steps):
        stream = master.derive(step)
        idx = np.array([stream.uniform_int(0, n - 1) for _ in range(batch_size)])
        batch_images, targets, occupancy = _augment_minibatch(
            images[idx], labels[idx], dataset.num_classes, augment, beta, stream
        )
        flat = batch_images.reshape(batch_size, -1).astype(np.float64)

        logits = model.logits(flat)
        probs = softmax(logits)
        grad_logits = (probs - targets) / batch_size
        model.weights -= lr * (grad_logits.T @ flat)
        model.bias -= lr * grad_logits.sum(axis=0)

        test_err = None
        if (step + 1) % eval_every == 0 or step == steps - 1:
            test_err = model.error_rate(dataset.test_images, dataset.test_labels)
        trace.rows.append(
            TraceRow(
                step=step,
                train_kl=float(np.mean(kl_loss(logits, targets))),
                train_err=float(np.mean(logits.argmax(axis=1) != occupancy)),
                test_err=test_err,
            )
        )
    return model, trace
