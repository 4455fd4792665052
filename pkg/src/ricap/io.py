"""Dataset manifest and lossless image I/O for the command-line pipeline.

A manifest is a JSON document::

    {
      "num_classes": 10,
      "entries": [
        {"path": "img/cat_0.png", "class_id": 3},
        {"path": "img/dog_1.png", "class_id": 5,
         "boxes": [[5, 16.0, 16.0, 12.0, 8.0]]}
      ]
    }

Paths are resolved relative to the manifest file. Boxes are optional
per-entry lists of (class_id, cx, cy, w, h) in absolute pixels, used by the
detection variant. Images are PNG only: a lossless format is required for the
bitwise provenance guarantees, and all images in one manifest must decode to
the same (channels, height, width).

Augmentation results are written as one PNG per output plus a JSON-lines
records file; each record carries the soft label sparsely and enough
provenance (source path, crop rectangle, placement, weight) to re-derive the
label exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .detection import BBox
from .validation import check_image, check_num_classes

_MODE_FOR_CHANNELS = {1: "L", 3: "RGB", 4: "RGBA"}


@dataclass
class ManifestEntry:
    path: Path
    source: str
    class_id: int
    boxes: list[BBox] | None = None


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry]
    num_classes: int


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse and validate a manifest; every referenced file must exist."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ValueError(f"manifest not found: {path}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"manifest {path} is not valid JSON: {exc}")

    if not isinstance(raw, dict) or "entries" not in raw or "num_classes" not in raw:
        raise ValueError(f"manifest {path} must have 'num_classes' and 'entries'")
    num_classes = check_num_classes(raw["num_classes"])
    if not isinstance(raw["entries"], list) or not raw["entries"]:
        raise ValueError(f"manifest {path} must list at least one entry")

    entries = []
    for i, item in enumerate(raw["entries"]):
        if not isinstance(item, dict) or "path" not in item or "class_id" not in item:
            raise ValueError(f"manifest entry {i} must have 'path' and 'class_id'")
        entry_path = (path.parent / item["path"]).resolve()
        if not entry_path.is_file():
            raise ValueError(f"manifest entry {i}: no such image file: {entry_path}")
        class_id = item["class_id"]
        if not isinstance(class_id, int) or not 0 <= class_id < num_classes:
            raise ValueError(
                f"manifest entry {i}: class_id {class_id!r} outside [0, {num_classes})"
            )
        boxes = None
        if "boxes" in item and item["boxes"] is not None:
            boxes = []
            for j, row in enumerate(item["boxes"]):
                if len(row) != 5:
                    raise ValueError(
                        f"manifest entry {i} box {j}: expected "
                        f"(class_id, cx, cy, w, h), got {row!r}"
                    )
                box_class = int(row[0])
                if not 0 <= box_class < num_classes:
                    raise ValueError(
                        f"manifest entry {i} box {j}: class_id {box_class} "
                        f"outside [0, {num_classes})"
                    )
                boxes.append(
                    BBox(box_class, float(row[1]), float(row[2]), float(row[3]), float(row[4]))
                )
        entries.append(ManifestEntry(entry_path, str(item["path"]), class_id, boxes))
    return DatasetManifest(entries=entries, num_classes=num_classes)


def decode_image(path: str | Path) -> np.ndarray:
    """Decode a PNG into a (C, H, W) uint8 array."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode not in _MODE_FOR_CHANNELS.values():
                img = img.convert("RGB")
            arr = np.asarray(img, dtype=np.uint8)
    except FileNotFoundError:
        raise ValueError(f"no such image file: {path}")
    except Image.UnidentifiedImageError:
        raise ValueError(f"cannot decode image: {path}")
    if arr.ndim == 2:
        arr = arr[None, :, :]
    else:
        arr = np.moveaxis(arr, -1, 0)
    return arr


def encode_image(image: np.ndarray, path: str | Path) -> None:
    """Write a (C, H, W) uint8 array as PNG; round-trips losslessly."""
    image = check_image(image)
    if image.dtype != np.uint8:
        raise ValueError(f"PNG output requires uint8 pixels, got dtype {image.dtype}")
    channels = image.shape[0]
    mode = _MODE_FOR_CHANNELS[channels]
    flat = image[0] if channels == 1 else np.moveaxis(image, 0, -1)
    Image.fromarray(flat, mode=mode).save(Path(path), format="PNG")


def load_images(manifest: DatasetManifest) -> np.ndarray:
    """Decode every manifest image into one (N, C, H, W) batch."""
    images = []
    shape = None
    for i, entry in enumerate(manifest.entries):
        arr = decode_image(entry.path)
        if shape is None:
            shape = arr.shape
        elif arr.shape != shape:
            raise ValueError(
                f"manifest entry {i} ({entry.path.name}) has shape {arr.shape}, "
                f"expected {shape} shared by the dataset"
            )
        images.append(arr)
    return np.stack(images)


def sparse_label(label: np.ndarray) -> list[list]:
    """Soft label as a sparse [[class_id, weight], ...] list, ascending ids."""
    return [[int(j), float(label[j])] for j in np.nonzero(label)[0]]


def write_records(records: list[dict], path: str | Path) -> None:
    """Write augmentation records as JSON lines with a stable key order."""
    with open(path, "w") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True))
            handle.write("\n")


def read_records(path: str | Path) -> list[dict]:
    with open(path) as handle:
        return [json.loads(line) for line in handle if line.strip()]
