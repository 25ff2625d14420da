"""Dataset ingestion: UCI agaricus-lepiota CSV and MNIST IDX files."""
from dataclasses import dataclass, field
import functools
import gzip
import os
from pathlib import Path

import numpy as np

from .errors import ConsistencyError, DataError, EncodingError, FormatError, ParseError

MUSHROOM_ATTRIBUTES = 22
MUSHROOM_FILENAME = "agaricus-lepiota.data"
IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
MNIST_FILES = [
    ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    ("mnist5k-images-idx3-ubyte", "mnist5k-labels-idx1-ubyte"),
]
BUNDLED_DIR = Path(__file__).parent / "data"
DATA_ENV_VAR = "TOPK_BANDIT_DATA"


@dataclass
class MushroomPool:
    """Parsed mushroom records with per-attribute category tables (first-seen order)."""

    source: str
    labels: list
    attributes: list
    categories: list = field(default_factory=list)
    _index: list = field(default_factory=list, repr=False)

    def __len__(self):
        return len(self.labels)

    @property
    def edible(self):
        return np.array([lab == "e" for lab in self.labels])

    @property
    def dim(self):
        return sum(len(c) for c in self.categories)

    def encode(self, record):
        return encode_one_hot(self, record)

    @functools.cached_property
    def features(self):
        """One-hot matrix for every record, shape (records, dim)."""
        out = np.zeros((len(self), self.dim))
        for row, rec in enumerate(self.attributes):
            out[row] = encode_one_hot(self, rec)
        return out


def parse_mushroom_csv(path):
    """Read the 23-field comma-separated mushroom file (label first, then 22 attributes).

    The missing-value marker ``?`` is kept as an ordinary category.
    """
    labels, attrs = [], []
    categories = [[] for _ in range(MUSHROOM_ATTRIBUTES)]
    try:
        fh = open(path, encoding="ascii")
    except OSError as exc:
        raise DataError(f"cannot read mushroom data {path}: {exc.strerror}") from None
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != MUSHROOM_ATTRIBUTES + 1:
                raise ParseError(f"expected {MUSHROOM_ATTRIBUTES + 1} fields, got {len(fields)}", lineno)
            if any(len(f) != 1 for f in fields):
                raise ParseError("every field must be a single character", lineno)
            if fields[0] not in ("e", "p"):
                raise ParseError(f"label must be 'e' or 'p', got {fields[0]!r}", lineno)
            labels.append(fields[0])
            rec = tuple(fields[1:])
            attrs.append(rec)
            for table, value in zip(categories, rec):
                if value not in table:
                    table.append(value)
    if not labels:
        raise ParseError(f"{path}: no records")
    pool = MushroomPool(str(path), labels, attrs, categories)
    pool._index = [{v: i for i, v in enumerate(table)} for table in categories]
    return pool


def encode_one_hot(pool, record):
    """Concatenate one one-hot block per attribute; exactly 22 entries are 1."""
    if len(record) != MUSHROOM_ATTRIBUTES:
        raise EncodingError(f"record has {len(record)} attributes, expected {MUSHROOM_ATTRIBUTES}")
    out = np.zeros(pool.dim)
    offset = 0
    for a, (value, index) in enumerate(zip(record, pool._index)):
        try:
            out[offset + index[value]] = 1.0
        except KeyError:
            raise EncodingError(f"attribute {a}: unseen category {value!r}") from None
        offset += len(index)
    return out


@dataclass
class MnistPool:
    source: str
    images: np.ndarray  # (count, rows*cols) in [0, 1]
    labels: np.ndarray
    shape: tuple = (28, 28)

    def __len__(self):
        return len(self.labels)


def _read_bytes(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read IDX file {path}: {exc.strerror}") from None
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    return raw


def _idx_header(raw, path, magic, ndim):
    if len(raw) < 4 + 4 * ndim:
        raise FormatError(f"{path}: truncated IDX header")
    header = np.frombuffer(raw, dtype=">u4", count=1 + ndim)
    if int(header[0]) != magic:
        raise FormatError(f"{path}: bad magic 0x{int(header[0]):08x}, expected 0x{magic:08x}")
    dims = tuple(int(d) for d in header[1:])
    expected = 4 + 4 * ndim + int(np.prod(dims))
    if len(raw) != expected:
        raise FormatError(f"{path}: {len(raw)} bytes, header implies {expected}")
    return dims


def parse_idx(images_path, labels_path):
    """Load an IDX image/label pair (optionally gzip-compressed); pixels are divided by 255."""
    raw = _read_bytes(images_path)
    count, rows, cols = _idx_header(raw, images_path, IDX_IMAGES_MAGIC, 3)
    pixels = np.frombuffer(raw, dtype=np.uint8, offset=16).reshape(count, rows * cols)
    raw_labels = _read_bytes(labels_path)
    (n_labels,) = _idx_header(raw_labels, labels_path, IDX_LABELS_MAGIC, 1)
    if n_labels != count:
        raise ConsistencyError(f"{count} images but {n_labels} labels ({images_path}, {labels_path})")
    labels = np.frombuffer(raw_labels, dtype=np.uint8, offset=8).astype(np.int64)
    return MnistPool(str(images_path), pixels / 255.0, labels, (rows, cols))


def _data_root():
    root = os.environ.get(DATA_ENV_VAR)
    return Path(root) if root else None


def _find(directory, stem):
    for name in (stem, stem + ".gz"):
        if (directory / name).is_file():
            return directory / name
    return None


def resolve_mnist_paths(data_path=None):
    """Locate an (images, labels) IDX pair.

    ``data_path`` may name a directory holding ``train-*`` or ``mnist5k-*`` files
    (plain or ``.gz``).  Without it, ``$TOPK_BANDIT_DATA`` and its ``mnist/``
    subdirectory are searched, then the bundled 5,000-image subset.
    """
    if data_path:
        dirs = [Path(data_path)]
    else:
        root = _data_root()
        dirs = [root, root / "mnist"] if root else []
        dirs.append(BUNDLED_DIR)
    for d in dirs:
        for img, lab in MNIST_FILES:
            pi, pl = _find(d, img), _find(d, lab)
            if pi and pl:
                return pi, pl
    raise DataError(f"no MNIST IDX files found in {', '.join(str(d) for d in dirs)}")


def resolve_mushroom_path(data_path=None):
    if data_path:
        p = Path(data_path)
        return p / MUSHROOM_FILENAME if p.is_dir() else p
    root = _data_root()
    if root is None:
        raise DataError(f"mushroom data needs env.data_path or ${DATA_ENV_VAR}/{MUSHROOM_FILENAME}")
    return root / MUSHROOM_FILENAME


@functools.lru_cache(maxsize=8)
def load_mushroom(path):
    return parse_mushroom_csv(path)


@functools.lru_cache(maxsize=4)
def load_mnist(images_path, labels_path):
    return parse_idx(images_path, labels_path)
