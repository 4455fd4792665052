"""Embedded invariant suite behind the ``selfcheck`` command.

Runs fast, fully deterministic spot checks of the package's core guarantees:
pixel provenance of composed images, exact conservation of quadrant weights
and soft labels, the algebraic identities tying the three loss forms
together, and analytic-vs-numerical gradient agreement. Each group reports
pass/fail independently so a regression points at the broken layer.

``corrupt_hook`` exists for negative-control testing: it is applied to every
composed image before the provenance comparison, so a hook that flips one
pixel must make exactly the provenance group fail.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .augment import crop_sizes, mix_labels, mix_weights, ricap_batch
from .image import crop, quadrant_offsets
from .losses import entropy, grad_soft_ce, kl_loss, soft_ce_loss
from .rng import RngStream


@dataclass
class CheckResult:
    group: str
    passed: bool
    detail: str


def _check_provenance(corrupt_hook: Callable | None) -> CheckResult:
    rng = RngStream(2024, 1)
    gen = np.random.default_rng(2024)
    mismatches = 0
    cases = 0
    for _ in range(50):
        n = int(gen.integers(2, 6))
        side = int(gen.integers(4, 13))
        images = gen.integers(0, 256, size=(n, 3, side, side), dtype=np.uint8)
        labels = gen.integers(0, 5, size=n)
        beta = float(gen.choice([0.0, 0.3, 1.0]))
        for sample in ricap_batch(images, labels, 5, beta, rng):
            image = sample.image
            if corrupt_hook is not None:
                image = corrupt_hook(image.copy())
            offsets = quadrant_offsets(*sample.boundary)
            for spec in sample.specs:
                expected = crop(images[spec.source_index], spec.rect)
                dx, dy = offsets[spec.quadrant]
                actual = image[:, dy : dy + spec.h, dx : dx + spec.w]
                cases += 1
                if not np.array_equal(expected, actual):
                    mismatches += 1
    ok = bool(mismatches == 0)
    return CheckResult(
        "pixel-provenance", ok, f"{cases} quadrant regions, {mismatches} mismatches"
    )


def _check_weights() -> CheckResult:
    rng = RngStream(7, 2)
    bad = 0
    cases = 0
    for canvas in (8, 17, 32, 224):
        for _ in range(500):
            boundary = (rng.uniform_int(0, canvas), rng.uniform_int(0, canvas))
            weights = mix_weights(crop_sizes(boundary, canvas, canvas), canvas, canvas)
            label = mix_labels([0, 1, 2, 1], weights, 4)
            cases += 1
            if sum(weights.areas) != weights.total:
                bad += 1
            elif abs(label.sum() - 1.0) > 1e-12 or np.any(label < 0):
                bad += 1
    return CheckResult("weight-conservation", bool(bad == 0), f"{cases} boundaries, {bad} bad")


def _check_loss_identities() -> CheckResult:
    gen = np.random.default_rng(11)
    worst = 0.0
    for _ in range(200):
        k = int(gen.integers(3, 12))
        logits = gen.normal(size=k) * 3.0
        target = gen.dirichlet(np.ones(k))
        gap = kl_loss(logits, target) - (soft_ce_loss(logits, target) - entropy(target))
        worst = max(worst, abs(gap))
    ok = bool(worst < 1e-12)
    return CheckResult("loss-identities", ok, f"max |KL - (CE - H)| = {worst:.3e}")


def _check_gradients() -> CheckResult:
    gen = np.random.default_rng(13)
    worst = 0.0
    eps = 1e-5
    for _ in range(25):
        k = int(gen.integers(3, 10))
        logits = gen.normal(size=k) * 2.0
        target = gen.dirichlet(np.ones(k))
        grad = grad_soft_ce(logits, target)
        for j in range(k):
            bump = np.zeros(k)
            bump[j] = eps
            fd = (kl_loss(logits + bump, target) - kl_loss(logits - bump, target)) / (
                2 * eps
            )
            denom = max(abs(fd), abs(grad[j]), 1e-8)
            worst = max(worst, abs(fd - grad[j]) / denom)
    ok = bool(worst < 1e-6)
    return CheckResult("gradient-check", ok, f"max relative error = {worst:.3e}")


def run_selfcheck(corrupt_hook: Callable | None = None) -> list[CheckResult]:
    """Run every invariant group; deterministic, so repeat runs agree."""
    return [
        _check_provenance(corrupt_hook),
        _check_weights(),
        _check_loss_identities(),
        _check_gradients(),
    ]
