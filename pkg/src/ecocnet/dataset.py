"""Labelled feature tables and the ways to obtain them."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InconsistentImages, ParseError

PIXEL_SCALE = 256.0


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray  # N x l
    labels: np.ndarray  # N, integers 0..C-1

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise ValueError(f"features {features.shape} and labels {labels.shape} do not line up")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def class_count(self) -> int:
        return int(self.labels.max()) + 1 if len(self) else 0

    def subset(self, indices) -> Dataset:
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[indices], self.labels[indices])


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian-blob stand-in for a face corpus; defaults mirror 15 people x 11 images."""

    class_count: int = 15
    dim: int = 30
    samples_per_class: int = 11
    cluster_spread: float = 1.1
    seed: int = 0

    def __post_init__(self):
        if min(self.class_count, self.dim, self.samples_per_class) < 1:
            raise ValueError("synthetic counts must be positive")
        if self.cluster_spread < 0:
            raise ValueError("cluster_spread must be non-negative")


def generate_synthetic(spec: SyntheticSpec = SyntheticSpec()) -> Dataset:
    """Isotropic Gaussian cluster of radius ``cluster_spread`` around a standard-normal centre per class."""
    rng = np.random.default_rng(spec.seed)
    centres = rng.standard_normal((spec.class_count, spec.dim))
    noise = rng.standard_normal((spec.class_count, spec.samples_per_class, spec.dim))
    features = centres[:, None, :] + spec.cluster_spread * noise
    labels = np.repeat(np.arange(spec.class_count), spec.samples_per_class)
    return Dataset(features.reshape(-1, spec.dim), labels)


def _check_labels(labels, where):
    present = np.unique(labels)
    if present.size == 0 or present[0] != 0 or present[-1] != present.size - 1:
        raise ParseError(f"{where}: labels must be contiguous from 0, got {present.tolist()}")


def load_csv(path) -> Dataset:
    """Read a table with header ``f0,...,f{l-1},label``.

    Raises
    ------
    ParseError
        On a bad header, a ragged row, an unparsable or non-finite value, or
        labels that are not the contiguous range ``0..C-1``. The message
        names the offending line.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        l = len(header) - 1
        if l < 1 or header != [f"f{j}" for j in range(l)] + ["label"]:
            raise ParseError(f"{path}:1: header must be f0,...,f{{l-1}},label")
        rows, labels = [], []
        for row in reader:
            lineno = reader.line_num
            if not row:
                continue
            if len(row) != l + 1:
                raise ParseError(f"{path}:{lineno}: expected {l + 1} fields, got {len(row)}")
            try:
                values = [float(v) for v in row[:l]]
                label = int(row[l])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError(f"{path}:{lineno}: non-finite feature value")
            rows.append(values)
            labels.append(label)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    labels = np.array(labels)
    if labels.min() < 0:
        raise ParseError(f"{path}:{2 + int(np.argmin(labels))}: negative label")
    _check_labels(labels, path)
    return Dataset(np.array(rows), labels)


def save_csv(dataset: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{j}" for j in range(dataset.dim)] + ["label"])
        for x, y in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])


def _pgm_tokens(data, count, pos):
    tokens = []
    while len(tokens) < count:
        while pos < len(data) and (data[pos:pos + 1].isspace() or data[pos:pos + 1] == b"#"):
            if data[pos:pos + 1] == b"#":
                while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated header")
        tokens.append(data[start:pos])
    return tokens, pos + 1  # one whitespace byte ends the header


def read_pgm(path) -> np.ndarray:
    """Decode a binary (P5) 8-bit PGM into a ``height x width`` uint8 array."""
    try:
        data = Path(path).read_bytes()
        (magic, w, h, maxval), pos = _pgm_tokens(data, 4, 0)
        if magic != b"P5":
            raise ValueError(f"not a binary PGM (magic {magic!r})")
        width, height, maxval = int(w), int(h), int(maxval)
        if width < 1 or height < 1 or not 0 < maxval <= 255:
            raise ValueError(f"unsupported geometry/maxval {width}x{height}/{maxval}")
        raster = data[pos:pos + width * height]
        if len(raster) != width * height:
            raise ValueError("truncated raster")
    except (OSError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def write_pgm(path, image) -> None:
    image = np.asarray(image, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (image.shape[1], image.shape[0]))
        fh.write(image.tobytes())


def load_image_dir(path) -> Dataset:
    """Load one sub-directory of PGM images per class.

    Classes are numbered by sorted sub-directory name. Each image is flattened
    row-major and divided by 256. Every entry is either loaded or reported:
    stray files at the top level or undecodable images raise ``ParseError``,
    and images of differing sizes raise ``InconsistentImages``.
    """
    root = Path(path)
    if not root.is_dir():
        raise ParseError(f"{root}: not a directory")
    entries = sorted(os.scandir(root), key=lambda e: e.name)
    strays = [e.name for e in entries if not e.is_dir()]
    if strays:
        raise ParseError(f"{root}: files outside class directories: {strays}")
    features, labels, shape = [], [], None
    for label, class_dir in enumerate(entries):
        files = sorted(os.scandir(class_dir.path), key=lambda e: e.name)
        if not files:
            raise ParseError(f"{class_dir.path}: class directory is empty")
        for entry in files:
            if not entry.is_file():
                raise ParseError(f"{entry.path}: not a regular file")
            image = read_pgm(entry.path)
            if shape is None:
                shape = image.shape
            elif image.shape != shape:
                raise InconsistentImages(
                    f"{entry.path}: size {image.shape[::-1]} differs from {shape[::-1]}"
                )
            features.append(image.reshape(-1) / PIXEL_SCALE)
            labels.append(label)
    if not features:
        raise ParseError(f"{root}: no class directories")
    return Dataset(np.array(features), np.array(labels))


def load_source(source) -> Dataset:
    """Dataset from a directory of class folders or a CSV file."""
    return load_image_dir(source) if Path(source).is_dir() else load_csv(source)
