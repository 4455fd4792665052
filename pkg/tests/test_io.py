import json

import numpy as np
import pytest

from ricap import decode_image, encode_image, load_images, load_manifest


def write_manifest(tmp_path, entries, num_classes=4):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"num_classes": num_classes, "entries": entries}))
    return path


class TestPngRoundTrip:
    @pytest.mark.parametrize("channels", [1, 3, 4])
    def test_lossless(self, tmp_path, channels):
        gen = np.random.default_rng(channels)
        image = gen.integers(0, 256, size=(channels, 9, 7), dtype=np.uint8)
        path = tmp_path / "img.png"
        encode_image(image, path)
        decoded = decode_image(path)
        assert np.array_equal(decoded, image)
        # re-encoding identical pixels produces identical bytes
        second = tmp_path / "img2.png"
        encode_image(decoded, second)
        assert path.read_bytes() == second.read_bytes()

    def test_header_shape(self, tmp_path):
        image = np.zeros((3, 32, 32), dtype=np.uint8)
        path = tmp_path / "img.png"
        encode_image(image, path)
        assert decode_image(path).shape == (3, 32, 32)

    def test_float_pixels_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="uint8"):
            encode_image(np.zeros((1, 4, 4)), tmp_path / "x.png")

    def test_undecodable_file_rejected(self, tmp_path):
        path = tmp_path / "not_an_image.png"
        path.write_bytes(b"definitely not a png")
        with pytest.raises(ValueError, match="cannot decode"):
            decode_image(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="no such image"):
            decode_image(tmp_path / "absent.png")


class TestManifest:
    def test_load_and_decode(self, tmp_path):
        gen = np.random.default_rng(0)
        entries = []
        for i in range(3):
            image = gen.integers(0, 256, size=(3, 8, 8), dtype=np.uint8)
            encode_image(image, tmp_path / f"im{i}.png")
            entries.append({"path": f"im{i}.png", "class_id": i})
        manifest = load_manifest(write_manifest(tmp_path, entries))
        assert manifest.num_classes == 4
        assert [e.class_id for e in manifest.entries] == [0, 1, 2]
        images = load_images(manifest)
        assert images.shape == (3, 3, 8, 8)

    def test_missing_image_names_path(self, tmp_path):
        path = write_manifest(tmp_path, [{"path": "ghost.png", "class_id": 0}])
        with pytest.raises(ValueError, match="ghost.png"):
            load_manifest(path)

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="not valid JSON"):
            load_manifest(path)

    def test_class_id_out_of_range(self, tmp_path):
        encode_image(np.zeros((1, 4, 4), dtype=np.uint8), tmp_path / "a.png")
        path = write_manifest(tmp_path, [{"path": "a.png", "class_id": 9}])
        with pytest.raises(ValueError, match="class_id"):
            load_manifest(path)

    def test_boxes_parsed(self, tmp_path):
        encode_image(np.zeros((1, 16, 16), dtype=np.uint8), tmp_path / "a.png")
        path = write_manifest(
            tmp_path,
            [{"path": "a.png", "class_id": 0, "boxes": [[1, 8.0, 8.0, 4.0, 4.0]]}],
        )
        manifest = load_manifest(path)
        box = manifest.entries[0].boxes[0]
        assert (box.class_id, box.cx, box.cy, box.w, box.h) == (1, 8.0, 8.0, 4.0, 4.0)

    def test_box_class_out_of_range(self, tmp_path):
        encode_image(np.zeros((1, 4, 4), dtype=np.uint8), tmp_path / "a.png")
        path = write_manifest(
            tmp_path,
            [{"path": "a.png", "class_id": 0, "boxes": [[7, 2.0, 2.0, 1.0, 1.0]]}],
        )
        with pytest.raises(ValueError, match="box 0"):
            load_manifest(path)

    def test_size_mismatch_rejected(self, tmp_path):
        encode_image(np.zeros((1, 4, 4), dtype=np.uint8), tmp_path / "a.png")
        encode_image(np.zeros((1, 5, 4), dtype=np.uint8), tmp_path / "b.png")
        manifest = load_manifest(
            write_manifest(
                tmp_path,
                [{"path": "a.png", "class_id": 0}, {"path": "b.png", "class_id": 1}],
            )
        )
        with pytest.raises(ValueError, match="shape"):
            load_images(manifest)
