import numpy as np
import pytest

from ricap import (
    BBox,
    DetectionSample,
    Rect,
    RngStream,
    ricap_detection_batch,
    transform_bbox,
)


def mask_oracle(box, crop, placement, span=256):
    """Rasterize the box, crop the mask, return the tight box in center form.

    A pixel (row, col) counts as covered when its center lies inside the box.
    Returns None when no covered pixel survives the crop.
    """
    x1, y1, x2, y2 = box.corners()
    cols = np.arange(span) + 0.5
    rows = np.arange(span) + 0.5
    mask = (
        (cols[None, :] >= x1)
        & (cols[None, :] < x2)
        & (rows[:, None] >= y1)
        & (rows[:, None] < y2)
    )
    cropped = mask[crop.y : crop.y + crop.h, crop.x : crop.x + crop.w]
    if not cropped.any():
        return None
    ys, xs = np.nonzero(cropped)
    lo_x, hi_x = xs.min(), xs.max() + 1
    lo_y, hi_y = ys.min(), ys.max() + 1
    dx, dy = placement
    return BBox(
        class_id=box.class_id,
        cx=(lo_x + hi_x) / 2.0 + dx,
        cy=(lo_y + hi_y) / 2.0 + dy,
        w=float(hi_x - lo_x),
        h=float(hi_y - lo_y),
    )


def random_integer_case(gen, span=64):
    x1 = int(gen.integers(0, span - 1))
    y1 = int(gen.integers(0, span - 1))
    x2 = int(gen.integers(x1 + 1, span + 1))
    y2 = int(gen.integers(y1 + 1, span + 1))
    box = BBox(0, (x1 + x2) / 2.0, (y1 + y2) / 2.0, float(x2 - x1), float(y2 - y1))
    cw = int(gen.integers(1, span + 1))
    ch = int(gen.integers(1, span + 1))
    cx = int(gen.integers(0, span - cw + 1))
    cy = int(gen.integers(0, span - ch + 1))
    crop = Rect(cx, cy, cw, ch)
    placement = (int(gen.integers(0, 32)), int(gen.integers(0, 32)))
    return box, crop, placement


class TestTransformBbox:
    def test_full_image_box_through_center_crop(self):
        box = BBox(1, 16.0, 16.0, 32.0, 32.0)
        out = transform_bbox(box, Rect(8, 8, 16, 16), (0, 0), 0.0)
        assert out == BBox(1, 8.0, 8.0, 16.0, 16.0)

    def test_box_outside_crop_dropped(self):
        box = BBox(0, 4.0, 4.0, 4.0, 4.0)
        assert transform_bbox(box, Rect(16, 16, 8, 8), (0, 0), 0.0) is None

    def test_identity_crop_preserves_box(self):
        box = BBox(2, 10.5, 7.25, 3.5, 2.75)
        out = transform_bbox(box, Rect(0, 0, 32, 32), (0, 0), 0.0)
        assert out == box

    def test_placement_translates(self):
        box = BBox(0, 4.0, 4.0, 8.0, 8.0)
        out = transform_bbox(box, Rect(0, 0, 8, 8), (10, 20), 0.0)
        assert out == BBox(0, 14.0, 24.0, 8.0, 8.0)

    def test_matches_mask_oracle_on_integer_cases(self):
        gen = np.random.default_rng(42)
        compared = 0
        for _ in range(500):
            box, crop, placement = random_integer_case(gen)
            ours = transform_bbox(box, crop, placement, 0.0)
            oracle = mask_oracle(box, crop, placement)
            assert (ours is None) == (oracle is None)
            if ours is not None:
                assert ours == oracle
                compared += 1
        assert compared > 100

    def test_matches_mask_oracle_within_half_pixel_subpixel(self):
        gen = np.random.default_rng(43)
        compared = 0
        for _ in range(600):
            x1, y1 = gen.uniform(0, 40, size=2)
            w, h = gen.uniform(0.5, 20, size=2)
            box = BBox(0, x1 + w / 2, y1 + h / 2, w, h)
            cw, ch = int(gen.integers(2, 32)), int(gen.integers(2, 32))
            crop = Rect(int(gen.integers(0, 30)), int(gen.integers(0, 30)), cw, ch)
            ours = transform_bbox(box, crop, (0, 0), 0.0)
            oracle = mask_oracle(box, crop, (0, 0))
            if ours is None or oracle is None:
                continue
            for got, want in zip(ours.corners(), oracle.corners()):
                assert abs(got - want) <= 0.5 + 1e-9
            compared += 1
        assert compared > 100

    def test_min_visibility_threshold(self):
        box = BBox(0, 8.0, 8.0, 16.0, 16.0)  # area 256
        crop = Rect(0, 0, 8, 8)  # visible area 64, ratio 0.25
        assert transform_bbox(box, crop, (0, 0), 0.2) is not None
        assert transform_bbox(box, crop, (0, 0), 0.25) is not None
        assert transform_bbox(box, crop, (0, 0), 0.26) is None

    def test_monotonic_in_min_visibility(self):
        gen = np.random.default_rng(44)
        for _ in range(200):
            box, crop, placement = random_integer_case(gen)
            kept = [
                transform_bbox(box, crop, placement, v) is not None
                for v in (0.0, 0.25, 0.5, 0.75, 1.0)
            ]
            # once dropped, stays dropped
            assert kept == sorted(kept, reverse=True)

    def test_survivor_contained_in_placed_rect(self):
        gen = np.random.default_rng(45)
        for _ in range(300):
            box, crop, placement = random_integer_case(gen)
            out = transform_bbox(box, crop, placement, 0.0)
            if out is None:
                continue
            x1, y1, x2, y2 = out.corners()
            assert x1 >= placement[0] - 1e-9
            assert y1 >= placement[1] - 1e-9
            assert x2 <= placement[0] + crop.w + 1e-9
            assert y2 <= placement[1] + crop.h + 1e-9

    def test_degenerate_box_rejected(self):
        with pytest.raises(ValueError, match="positive area"):
            transform_bbox(BBox(0, 1.0, 1.0, 0.0, 2.0), Rect(0, 0, 4, 4), (0, 0))


def make_detection_batch(gen, n=4, side=32, boxes_per=2):
    samples = []
    for _ in range(n):
        image = gen.integers(0, 256, size=(3, side, side), dtype=np.uint8)
        boxes = []
        for _ in range(boxes_per):
            x1 = int(gen.integers(0, side - 2))
            y1 = int(gen.integers(0, side - 2))
            x2 = int(gen.integers(x1 + 1, side + 1))
            y2 = int(gen.integers(y1 + 1, side + 1))
            boxes.append(
                BBox(int(gen.integers(0, 5)), (x1 + x2) / 2, (y1 + y2) / 2,
                     float(x2 - x1), float(y2 - y1))
            )
        samples.append(DetectionSample(image, boxes))
    return samples


class TestDetectionBatch:
    def test_beta_zero_passthrough(self):
        gen = np.random.default_rng(0)
        samples = make_detection_batch(gen)
        out = ricap_detection_batch(samples, 0.0, RngStream(3))
        for result in out:
            source = next(
                s for s in samples if np.array_equal(s.image, result.image)
            )
            assert result.boxes == source.boxes

    def test_full_image_box_becomes_quadrant_boxes(self):
        gen = np.random.default_rng(1)
        image = gen.integers(0, 256, size=(1, 32, 32), dtype=np.uint8)
        sample = DetectionSample(image, [BBox(0, 16.0, 16.0, 32.0, 32.0)])

        class Forced:
            def beta(self, b):
                return 0.5

            def uniform_int(self, lo, hi):
                return lo

            def permutation(self, n):
                return list(range(n))

        out = ricap_detection_batch([sample], 1.0, Forced())
        got = {(b.cx, b.cy, b.w, b.h) for b in out[0].boxes}
        assert got == {
            (8.0, 8.0, 16.0, 16.0),
            (24.0, 8.0, 16.0, 16.0),
            (8.0, 24.0, 16.0, 16.0),
            (24.0, 24.0, 16.0, 16.0),
        }

    def test_every_output_box_inside_image(self):
        gen = np.random.default_rng(2)
        rng = RngStream(17)
        for _ in range(20):
            samples = make_detection_batch(gen, n=5)
            for mode in ("per-batch", "per-sample"):
                for result in ricap_detection_batch(samples, 0.5, rng, 0.0, mode):
                    height, width = result.image.shape[1:]
                    for box in result.boxes:
                        x1, y1, x2, y2 = box.corners()
                        assert x1 >= -1e-9 and y1 >= -1e-9
                        assert x2 <= width + 1e-9 and y2 <= height + 1e-9

    def test_raising_visibility_never_adds_boxes(self):
        gen = np.random.default_rng(3)
        samples = make_detection_batch(gen, n=4)
        counts = []
        for vis in (0.0, 0.3, 0.6, 0.9):
            out = ricap_detection_batch(samples, 0.5, RngStream(8), vis)
            counts.append(sum(len(r.boxes) for r in out))
        assert counts == sorted(counts, reverse=True)

    def test_out_of_bounds_input_box_rejected(self):
        image = np.zeros((1, 16, 16), dtype=np.uint8)
        bad = DetectionSample(image, [BBox(0, 15.0, 8.0, 6.0, 4.0)])
        with pytest.raises(ValueError, match="outside image bounds"):
            ricap_detection_batch([bad], 0.3, RngStream(0))

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            ricap_detection_batch([], 0.3, RngStream(0))

    def test_images_match_classification_variant_geometry(self):
        gen = np.random.default_rng(4)
        samples = make_detection_batch(gen, n=3)
        out = ricap_detection_batch(samples, 0.7, RngStream(5))
        assert all(r.image.shape == samples[0].image.shape for r in out)
