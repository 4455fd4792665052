"""Command-line interface: augment a dataset, inspect draws, self-check.

Exit codes: 0 on success, 1 on validation errors (bad flags, unreadable or
mismatched inputs), 2 on internal invariant failures (a self-check group
fails or a post-hoc audit of the written records disagrees with them).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from .augment import (
    BOUNDARY_MODES,
    draw_boundary,
    crop_sizes,
    four_mixup_batch,
    mix_weights,
    ricap_batch,
)
from .detection import DetectionSample, ricap_detection_batch
from .embedding import mix_embeddings
from .ficap import ficap_batch
from .image import quadrant_offsets
from .io import (
    encode_image,
    load_images,
    load_manifest,
    sparse_label,
    write_records,
)
from .rng import RngStream
from .selfcheck import run_selfcheck
from .training import TRAINER_AUGMENTS, make_quadrant_dataset, train_toy
from .validation import check_beta, check_fraction, check_seed

AUGMENT_VARIANTS = (
    "ricap",
    "ricap-image-only",
    "ricap-label-only",
    "four-mixup",
    "ficap",
    "detect",
)


def _fail(message: str, code: int = 1) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


@click.group()
def main():
    """Random image cropping and patching augmentation toolkit."""


def _provenance(entries, batch_start, specs, boundary, canvas) -> list[dict]:
    offsets = quadrant_offsets(*boundary)
    total = canvas[0] * canvas[1]
    return [
        {
            "source_path": entries[batch_start + spec.source_index].source,
            "crop": [spec.x, spec.y, spec.w, spec.h],
            "placement": list(offsets[spec.quadrant]),
            "weight": spec.area / total,
        }
        for spec in specs
    ]


def _audit_label(record: dict, entries_by_source: dict, num_classes: int, canvas) -> bool:
    """Re-derive the soft label from provenance rects; exact match required."""
    canvas_w, canvas_h = canvas
    per_class = np.zeros(num_classes, dtype=np.int64)
    for item in record["provenance"]:
        _, _, w, h = item["crop"]
        class_id = entries_by_source[item["source_path"]]
        per_class[class_id] += w * h
    derived = per_class.astype(np.float64) / float(canvas_w * canvas_h)
    recorded = np.zeros(num_classes)
    for class_id, weight in record["soft_label"]:
        recorded[class_id] = weight
    return bool(np.array_equal(derived, recorded))


def _blend_uint8(samples) -> list[np.ndarray]:
    """Round blended float pixels back to 8-bit, ties to even."""
    return [
        np.clip(np.round(s.image), 0, 255).astype(np.uint8) for s in samples
    ]


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--variant", default="ricap", show_default=True)
@click.option("--beta", default=0.3, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--batch-size", default=32, show_default=True, type=int)
@click.option("--boundary", default="per-batch", show_default=True)
@click.option("--min-visibility", default=0.0, show_default=True, type=float)
def augment(manifest_path, out_dir, variant, beta, seed, batch_size, boundary, min_visibility):
    """Augment a manifest dataset and write PNGs plus a records.jsonl file."""
    try:
        if variant not in AUGMENT_VARIANTS:
            raise ValueError(f"unknown variant {variant!r}, expected one of {AUGMENT_VARIANTS}")
        if boundary not in BOUNDARY_MODES:
            raise ValueError(f"boundary must be one of {BOUNDARY_MODES}, got {boundary!r}")
        check_beta(beta)
        check_seed(seed)
        check_fraction(min_visibility, "min_visibility")
        if batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {batch_size}")

        manifest = load_manifest(manifest_path)
        images = load_images(manifest)
        labels = np.array([e.class_id for e in manifest.entries], dtype=np.int64)
        canvas = (images.shape[3], images.shape[2])
        num_classes = manifest.num_classes
        master = RngStream(seed)

        out_images: list[np.ndarray] = []
        records: list[dict] = []
        for batch_index, start in enumerate(range(0, images.shape[0], batch_size)):
            stop = min(start + batch_size, images.shape[0])
            rng = master.derive(batch_index)
            batch = images[start:stop]
            batch_labels = labels[start:stop]

            if variant == "detect":
                dets = [
                    DetectionSample(batch[i], manifest.entries[start + i].boxes or [])
                    for i in range(stop - start)
                ]
                for sample in ricap_detection_batch(dets, beta, rng, min_visibility, boundary):
                    out_images.append(sample.image)
                    records.append(
                        {
                            "boxes": [
                                [b.class_id, b.cx, b.cy, b.w, b.h] for b in sample.boxes
                            ],
                            "provenance": _provenance(
                                manifest.entries, start, sample.specs,
                                sample.boundary, canvas
                            ),
                        }
                    )
                continue

            if variant == "four-mixup":
                samples = four_mixup_batch(
                    batch.astype(np.float64), batch_labels, num_classes, beta, rng, boundary
                )
                out_images.extend(_blend_uint8(samples))
            else:
                batch_fn = ficap_batch if variant == "ficap" else ricap_batch
                samples = batch_fn(batch, batch_labels, num_classes, beta, rng, boundary)
                if variant == "ricap-label-only":
                    out_images.extend(
                        batch[s.specs[s.weights.argmax()].source_index].copy()
                        for s in samples
                    )
                else:
                    out_images.extend(s.image for s in samples)

            for s in samples:
                if variant == "ricap-image-only":
                    hard = int(
                        batch_labels[s.specs[s.weights.argmax()].source_index]
                    )
                    label = [[hard, 1.0]]
                else:
                    label = sparse_label(s.label)
                records.append(
                    {
                        "soft_label": label,
                        "provenance": _provenance(
                            manifest.entries, start, s.specs, s.boundary, canvas
                        ),
                    }
                )

        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        entries_by_source = {e.source: e.class_id for e in manifest.entries}
        audit_failures = 0
        for i, (image, record) in enumerate(zip(out_images, records)):
            name = f"aug_{i:05d}.png"
            record["image_path"] = name
            encode_image(image, out_dir / name)
            if variant == "detect":
                height, width = image.shape[1], image.shape[2]
                for class_id, cx, cy, w, h in record["boxes"]:
                    if (
                        cx - w / 2 < 0
                        or cy - h / 2 < 0
                        or cx + w / 2 > width
                        or cy + h / 2 > height
                    ):
                        audit_failures += 1
            elif variant != "ricap-image-only":
                # Image-only records a one-hot label by construction; every
                # other label must re-derive exactly from the crop geometry.
                if not _audit_label(record, entries_by_source, num_classes, canvas):
                    audit_failures += 1
        write_records(records, out_dir / "records.jsonl")

        if audit_failures:
            _fail(f"post-hoc audit failed for {audit_failures} records", code=2)
        click.echo(f"wrote {len(out_images)} augmented images to {out_dir}")
    except (ValueError, OSError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--beta", required=True, type=float)
@click.option("--samples", default=100_000, show_default=True, type=int)
@click.option("--canvas", default="32x32", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def stats(beta, samples, canvas, seed, out_path):
    """Sample boundary draws; write histograms as CSV and print moments."""
    try:
        check_beta(beta)
        check_seed(seed)
        if samples < 1:
            raise ValueError(f"samples must be >= 1, got {samples}")
        try:
            canvas_w, canvas_h = (int(part) for part in canvas.lower().split("x"))
        except ValueError:
            raise ValueError(f"canvas must look like 32x32, got {canvas!r}")
        if canvas_w < 1 or canvas_h < 1:
            raise ValueError(f"canvas must be at least 1x1, got {canvas!r}")

        rng = RngStream(seed)
        w_counts = np.zeros(canvas_w + 1, dtype=np.int64)
        h_counts = np.zeros(canvas_h + 1, dtype=np.int64)
        bins = 20
        weight_counts = np.zeros((4, bins), dtype=np.int64)
        for _ in range(samples):
            w, h = draw_boundary(canvas_w, canvas_h, beta, rng)
            w_counts[w] += 1
            h_counts[h] += 1
            weights = mix_weights(
                crop_sizes((w, h), canvas_w, canvas_h), canvas_w, canvas_h
            )
            for k, value in enumerate(weights.values):
                weight_counts[k, min(int(value * bins), bins - 1)] += 1

        lines = ["series,value,count"]
        lines += [f"w,{v},{w_counts[v]}" for v in range(canvas_w + 1)]
        lines += [f"h,{v},{h_counts[v]}" for v in range(canvas_h + 1)]
        for k in range(4):
            lines += [
                f"W{k + 1},{(b + 0.5) / bins:.4f},{weight_counts[k, b]}"
                for b in range(bins)
            ]
        Path(out_path).write_text("\n".join(lines) + "\n")

        expected_var = 0.25 if beta == 0 else 1.0 / (4.0 * (2.0 * beta + 1.0))
        for name, counts, size in (("w", w_counts, canvas_w), ("h", h_counts, canvas_h)):
            fractions = np.repeat(np.arange(size + 1) / size, counts)
            click.echo(
                f"{name}/{'I_x' if name == 'w' else 'I_y'}: "
                f"mean={fractions.mean():.6f} (closed form 0.5), "
                f"variance={fractions.var():.6f} (closed form {expected_var:.6f})"
            )
        click.echo(f"wrote histogram CSV to {out_path}")
    except (ValueError, OSError) as exc:
        _fail(str(exc))


@main.command()
def selfcheck():
    """Run the embedded invariant suite; nonzero exit on any failure."""
    results = run_selfcheck()
    failed = False
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"{result.group}: {status} ({result.detail})")
        failed = failed or not result.passed
    if failed:
        sys.exit(2)


@main.command("mix-embeddings")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--out", "out_path", default=None, type=click.Path())
def mix_embeddings_cmd(input_path, out_path):
    """Mix four embedding vectors: JSON file with "vectors" and "weights"."""
    try:
        try:
            payload = json.loads(Path(input_path).read_text())
        except FileNotFoundError:
            raise ValueError(f"no such input file: {input_path}")
        except json.JSONDecodeError as exc:
            raise ValueError(f"input is not valid JSON: {exc}")
        if not isinstance(payload, dict) or "vectors" not in payload or "weights" not in payload:
            raise ValueError("input JSON must have 'vectors' (four rows) and 'weights'")
        mixed = mix_embeddings(payload["vectors"], payload["weights"])
        text = json.dumps({"mixed": mixed.tolist()}, sort_keys=True)
        if out_path is None:
            click.echo(text)
        else:
            Path(out_path).write_text(text + "\n")
    except (ValueError, OSError) as exc:
        _fail(str(exc))


@main.command("train-toy")
@click.option("--augment", default="none", show_default=True)
@click.option("--beta", default=0.3, show_default=True, type=float)
@click.option("--steps", default=2000, show_default=True, type=int)
@click.option("--lr", default=0.02, show_default=True, type=float)
@click.option("--batch-size", default=64, show_default=True, type=int)
@click.option("--eval-every", default=100, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def train_toy_cmd(augment, beta, steps, lr, batch_size, eval_every, seed, out_path):
    """Train the toy linear model on the synthetic dataset; write trace CSV."""
    try:
        if augment not in TRAINER_AUGMENTS:
            raise ValueError(f"augment must be one of {TRAINER_AUGMENTS}, got {augment!r}")
        check_beta(beta)
        check_seed(seed)
        dataset = make_quadrant_dataset(seed=seed)
        model, trace = train_toy(
            dataset,
            augment=augment,
            beta=beta,
            steps=steps,
            lr=lr,
            batch_size=batch_size,
            eval_every=eval_every,
            seed=seed,
        )
        trace.write_csv(out_path)
        final = trace.final
        train_err = model.error_rate(dataset.train_images, dataset.train_labels)
        click.echo(
            f"final step {final.step}: train_kl={final.train_kl:.6f} "
            f"train_err={train_err:.4f} test_err={final.test_err:.4f}"
        )
        click.echo(f"wrote trace CSV to {out_path}")
    except (ValueError, OSError) as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
