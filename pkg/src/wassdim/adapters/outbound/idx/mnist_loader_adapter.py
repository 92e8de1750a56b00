"""
IDX reader and writer, and an MNIST dataset loader built on them.

IDX layout (big-endian):

    [offset] [type]          [value]
    0000     32 bit integer  0x00000803 (images) or 0x00000801 (labels)
    0004     32 bit integer  number of items
    0008     32 bit integer  number of rows     (images only)
    0012     32 bit integer  number of columns  (images only)
    ....     unsigned byte   pixels row-wise, or one label per item

Files compressed with gzip are recognized by their two-byte header and
decompressed transparently.
"""

import gzip
import logging
import struct
from pathlib import Path
from typing import List, Tuple

import numpy as np

from wassdim.domain.errors import IdxFormatError, IdxLengthError, InvalidInputError
from wassdim.domain.model import LabeledCloud, PointCloud
from wassdim.ports.outbound.dataset_loader_port import DatasetLoaderPort

logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
GZIP_HEADER = b"\x1f\x8b"


def _read_bytes(path: Path) -> bytes:
    raw = Path(path).read_bytes()
    if raw[:2] == GZIP_HEADER:
        try:
            return gzip.decompress(raw)
        except (OSError, EOFError) as e:
            raise IdxFormatError(f"{path}: unreadable gzip stream: {e}") from e
    return raw


def _check_magic(raw: bytes, expected: int, path: Path) -> None:
    if len(raw) < 4:
        raise IdxLengthError(f"{path}: file too short for an IDX header")
    (magic,) = struct.unpack(">I", raw[:4])
    if magic != expected:
        raise IdxFormatError(
            f"{path}: magic number 0x{magic:08x}, expected 0x{expected:08x}"
        )


def read_idx_header(path: Path) -> Tuple[int, Tuple[int, ...]]:
    """Return the magic number and the dimension sizes of an IDX file."""
    raw = _read_bytes(path)
    if len(raw) < 4:
        raise IdxLengthError(f"{path}: file too short for an IDX header")
    (magic,) = struct.unpack(">I", raw[:4])
    n_dims = magic & 0xFF
    if len(raw) < 4 + 4 * n_dims:
        raise IdxLengthError(f"{path}: truncated IDX header")
    dims = struct.unpack(f">{n_dims}I", raw[4 : 4 + 4 * n_dims])
    return magic, tuple(dims)


def load_idx_images(path: Path) -> np.ndarray:
    """Decode an IDX image file into flattened vectors scaled to [0, 1].

    Args:
        path: IDX3 file, plain or gzip-compressed

    Returns:
        Array of shape (n, rows * cols) with pixel values divided by 255

    Raises:
        IdxFormatError: If the magic number is not 0x00000803
        IdxLengthError: If the header or pixel payload is truncated
    """
    path = Path(path)
    raw = _read_bytes(path)
    _check_magic(raw, IMAGE_MAGIC, path)
    if len(raw) < 16:
        raise IdxLengthError(f"{path}: truncated image header")
    _, count, rows, cols = struct.unpack(">IIII", raw[:16])

    expected = count * rows * cols
    if len(raw) - 16 < expected:
        raise IdxLengthError(
            f"{path}: expected {expected} pixel bytes, found {len(raw) - 16}"
        )
    if expected == 0:
        return np.zeros((count, rows * cols))
    pixels = np.frombuffer(raw, dtype=np.uint8, count=expected, offset=16)
    logger.debug(f"Decoded {count} images of {rows}x{cols} from {path}")
    return pixels.reshape(count, rows * cols).astype(np.float64) / 255.0


def load_idx_labels(path: Path) -> np.ndarray:
    """Decode an IDX label file.

    Raises:
        IdxFormatError: If the magic number is not 0x00000801
        IdxLengthError: If fewer labels follow than the header announces
    """
    path = Path(path)
    raw = _read_bytes(path)
    _check_magic(raw, LABEL_MAGIC, path)
    if len(raw) < 8:
        raise IdxLengthError(f"{path}: truncated label header")
    _, count = struct.unpack(">II", raw[:8])
    if len(raw) - 8 < count:
        raise IdxLengthError(f"{path}: expected {count} labels, found {len(raw) - 8}")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    return np.frombuffer(raw, dtype=np.uint8, count=count, offset=8).astype(np.int64)


def _write(path: Path, payload: bytes, compress: bool) -> Path:
    path = Path(path)
    path.write_bytes(gzip.compress(payload) if compress else payload)
    return path


def write_idx_images(path: Path, images: np.ndarray, compress: bool = False) -> Path:
    """Encode unsigned-byte images of shape (n, rows, cols) as IDX3."""
    images = np.asarray(images)
    if images.ndim != 3 or images.dtype != np.uint8:
        raise InvalidInputError("Images must be a uint8 array of shape (n, rows, cols)")
    header = struct.pack(">IIII", IMAGE_MAGIC, *images.shape)
    return _write(path, header + images.tobytes(order="C"), compress)


def write_idx_labels(path: Path, labels: np.ndarray, compress: bool = False) -> Path:
    """Encode unsigned-byte labels as IDX1."""
    labels = np.asarray(labels, dtype=np.uint8)
    header = struct.pack(">II", LABEL_MAGIC, labels.shape[0])
    return _write(path, header + labels.tobytes(), compress)


class IdxMnistLoaderAdapter(DatasetLoaderPort):
    """
    Loads MNIST from a directory holding the four standard IDX files.

    Attributes:
        mnist_dir: Directory searched for the files
    """

    SPLIT_PREFIXES = {"train": "train", "test": "t10k"}

    def __init__(self, mnist_dir: Path):
        self.mnist_dir = Path(mnist_dir)

    def _candidates(self, prefix: str, kind: str, ndim: int) -> List[Path]:
        names = [
            f"{prefix}-{kind}-idx{ndim}-ubyte",
            f"{prefix}-{kind}.idx{ndim}-ubyte",
        ]
        return [
            self.mnist_dir / f"{name}{suffix}" for name in names for suffix in ("", ".gz")
        ]

    def _resolve(self, prefix: str, kind: str, ndim: int) -> Path:
        for candidate in self._candidates(prefix, kind, ndim):
            if candidate.is_file():
                return candidate
        raise FileNotFoundError(
            f"No {prefix} {kind} file in {self.mnist_dir} "
            f"(expected {prefix}-{kind}-idx{ndim}-ubyte[.gz])"
        )

    def load(self, split: str = "test") -> LabeledCloud:
        """
        Load one MNIST split.

        Args:
            split: "train" (60000 images) or "test" (10000 images)

        Returns:
            LabeledCloud with 784-dimensional rows in [0, 1]
        """
        if split not in self.SPLIT_PREFIXES:
            raise InvalidInputError(
                f"Unsupported split: {split}. "
                f"Supported splits are: {list(self.SPLIT_PREFIXES.keys())}"
            )
        prefix = self.SPLIT_PREFIXES[split]
        images = load_idx_images(self._resolve(prefix, "images", 3))
        labels = load_idx_labels(self._resolve(prefix, "labels", 1))
        if images.shape[0] != labels.shape[0]:
            raise IdxFormatError(
                f"{images.shape[0]} images but {labels.shape[0]} labels in the "
                f"{split} split"
            )
        logger.info(f"Loaded MNIST {split} split: {images.shape[0]} images")
        return LabeledCloud(cloud=PointCloud(images), labels=labels)
