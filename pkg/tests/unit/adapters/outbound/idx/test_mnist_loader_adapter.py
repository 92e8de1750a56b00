import gzip
import struct

import numpy as np
import pytest

from wassdim.adapters.outbound.idx import IdxMnistLoaderAdapter
from wassdim.adapters.outbound.idx.mnist_loader_adapter import (
    IMAGE_MAGIC,
    LABEL_MAGIC,
    load_idx_images,
    load_idx_labels,
    read_idx_header,
    write_idx_images,
    write_idx_labels,
)
from wassdim.domain.errors import IdxFormatError, IdxLengthError, InvalidInputError


@pytest.fixture
def images():
    generator = np.random.default_rng(0)
    return generator.integers(0, 256, size=(6, 4, 3), dtype=np.uint8)


@pytest.fixture
def labels():
    return np.array([7, 1, 7, 0, 9, 7], dtype=np.uint8)


@pytest.fixture
def mnist_dir(tmp_path, images, labels):
    write_idx_images(tmp_path / "t10k-images-idx3-ubyte", images)
    write_idx_labels(tmp_path / "t10k-labels-idx1-ubyte", labels)
    write_idx_images(tmp_path / "train-images-idx3-ubyte.gz", images[:4], compress=True)
    write_idx_labels(tmp_path / "train-labels-idx1-ubyte.gz", labels[:4], compress=True)
    return tmp_path


def test_header_layout(tmp_path, images):
    path = write_idx_images(tmp_path / "images", images)
    raw = path.read_bytes()
    assert struct.unpack(">IIII", raw[:16]) == (IMAGE_MAGIC, 6, 4, 3)
    assert len(raw) == 16 + images.size
    assert read_idx_header(path) == (IMAGE_MAGIC, (6, 4, 3))


def test_images_are_flattened_and_scaled(tmp_path, images):
    path = write_idx_images(tmp_path / "images", images)
    decoded = load_idx_images(path)
    assert decoded.shape == (6, 12)
    np.testing.assert_array_equal(decoded, images.reshape(6, 12) / 255.0)
    assert decoded.min() >= 0.0 and decoded.max() <= 1.0


def test_gzip_files_are_read_transparently(tmp_path, labels):
    path = write_idx_labels(tmp_path / "labels.gz", labels, compress=True)
    assert path.read_bytes()[:2] == b"\x1f\x8b"
    np.testing.assert_array_equal(load_idx_labels(path), labels)


def test_wrong_magic_is_rejected(tmp_path, images):
    path = tmp_path / "swapped"
    path.write_bytes(struct.pack(">II", LABEL_MAGIC, 1) + b"\x03")
    with pytest.raises(IdxFormatError):
        load_idx_images(path)

    image_path = write_idx_images(tmp_path / "images", images)
    with pytest.raises(IdxFormatError):
        load_idx_labels(image_path)


def test_truncated_payload_is_rejected(tmp_path, images):
    raw = write_idx_images(tmp_path / "images", images).read_bytes()
    truncated = tmp_path / "truncated"
    truncated.write_bytes(raw[:-5])
    with pytest.raises(IdxLengthError):
        load_idx_images(truncated)

    short = tmp_path / "short"
    short.write_bytes(b"\x00\x00")
    with pytest.raises(IdxLengthError):
        load_idx_labels(short)

    labels_only_header = tmp_path / "labels"
    labels_only_header.write_bytes(struct.pack(">II", LABEL_MAGIC, 3) + b"\x01")
    with pytest.raises(IdxLengthError):
        load_idx_labels(labels_only_header)


def test_empty_files_decode_to_empty_arrays(tmp_path):
    images = write_idx_images(tmp_path / "images", np.zeros((0, 28, 28), dtype=np.uint8))
    labels = write_idx_labels(tmp_path / "labels", np.zeros(0, dtype=np.uint8))
    assert load_idx_images(images).shape == (0, 784)
    assert load_idx_labels(labels).shape == (0,)


def test_writer_rejects_wrong_dtype(tmp_path):
    with pytest.raises(InvalidInputError):
        write_idx_images(tmp_path / "images", np.zeros((2, 3, 3)))


def test_loader_reads_both_splits(mnist_dir, images, labels):
    loader = IdxMnistLoaderAdapter(mnist_dir)

    test = loader.load("test")
    assert test.cloud.n == 6
    assert test.cloud.dim == 12
    np.testing.assert_array_equal(test.labels, labels)
    assert test.filter_by_digit(7).n == 3

    train = loader.load("train")
    assert train.cloud.n == 4


def test_loader_accepts_dotted_file_names(tmp_path, images, labels):
    write_idx_images(tmp_path / "t10k-images.idx3-ubyte", images)
    write_idx_labels(tmp_path / "t10k-labels.idx1-ubyte", labels)
    assert IdxMnistLoaderAdapter(tmp_path).load("test").cloud.n == 6


def test_loader_reports_missing_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        IdxMnistLoaderAdapter(tmp_path).load("test")


def test_loader_rejects_unknown_split(mnist_dir):
    with pytest.raises(InvalidInputError):
        IdxMnistLoaderAdapter(mnist_dir).load("validation")


def test_loader_rejects_count_mismatch(tmp_path, images, labels):
    write_idx_images(tmp_path / "t10k-images-idx3-ubyte", images)
    write_idx_labels(tmp_path / "t10k-labels-idx1-ubyte", labels[:5])
    with pytest.raises(IdxFormatError):
        IdxMnistLoaderAdapter(tmp_path).load("test")


def test_hand_written_idx_bytes(tmp_path):
    image_path = tmp_path / "two-images"
    image_path.write_bytes(
        struct.pack(">IIII", 0x00000803, 2, 2, 2) + bytes([0, 255, 128, 0, 255, 255, 0, 0])
    )
    label_path = tmp_path / "two-labels"
    label_path.write_bytes(struct.pack(">II", 0x00000801, 2) + bytes([3, 7]))

    images = load_idx_images(image_path)
    np.testing.assert_allclose(images, [[0.0, 1.0, 128 / 255, 0.0], [1.0, 1.0, 0.0, 0.0]])
    np.testing.assert_array_equal(load_idx_labels(label_path), [3, 7])


def test_broken_gzip_is_a_format_error(tmp_path):
    path = tmp_path / "labels.gz"
    path.write_bytes(b"\x1f\x8b\x08not really gzip")
    with pytest.raises(IdxFormatError):
        load_idx_labels(path)
