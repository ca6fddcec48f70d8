"""Dataset ingestion: NPY/CSV parsing, cube flattening, and binary task assembly."""

import ast
import csv
import struct
from dataclasses import dataclass, field

import numpy as np

from .validation import as_label_vector

_NPY_MAGIC = b"\x93NUMPY"

# Supported on-disk element types: little-endian floats, 8/16-bit integers.
_SUPPORTED_DESCRS = {
    "<f8": np.dtype("<f8"),
    "<f4": np.dtype("<f4"),
    "|u1": np.dtype("u1"),
    "|i1": np.dtype("i1"),
    "<u2": np.dtype("<u2"),
    "<i2": np.dtype("<i2"),
}


@dataclass
class SpectralDataset:
    """Labeled sample matrix: one row per point, one column per spectral band."""

    samples: np.ndarray
    labels: np.ndarray
    band_count: int = 0
    source: str = ""

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        self.labels = as_label_vector(self.labels)
        if self.samples.ndim != 2:
            raise ValueError("samples must be a 2-d matrix")
        m, n = self.samples.shape
        if m < 2 or n < 2:
            raise ValueError(f"dataset needs at least 2 samples and 2 bands, got {m}x{n}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain NaN or infinite entries")
        if self.labels.shape[0] != m:
            raise ValueError(
                f"labels length {self.labels.shape[0]} does not match sample count {m}"
            )
        if np.any(self.labels < 0):
            raise ValueError("class ids must be non-negative")
        if self.band_count == 0:
            self.band_count = n
        elif self.band_count != n:
            raise ValueError(f"band_count {self.band_count} does not match {n} columns")

    @property
    def sample_count(self):
        return self.samples.shape[0]

    def class_counts(self):
        values, counts = np.unique(self.labels, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}


@dataclass
class HsiCube:
    """Hyperspectral cube (H x W x B reflectance) with per-pixel ground truth (H x W)."""

    data: np.ndarray
    ground_truth: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        gt = np.asarray(self.ground_truth)
        self.ground_truth = as_label_vector(gt.reshape(-1)).reshape(gt.shape)
        if self.data.ndim != 3:
            raise ValueError("cube data must be a 3-d H x W x B array")
        if self.ground_truth.ndim != 2:
            raise ValueError("ground truth must be a 2-d H x W array")
        if self.data.shape[:2] != self.ground_truth.shape:
            raise ValueError(
                f"cube spatial shape {self.data.shape[:2]} does not match "
                f"ground truth shape {self.ground_truth.shape}"
            )
        if self.data.shape[2] < 1:
            raise ValueError("cube needs at least one band")


@dataclass(frozen=True)
class ClassPairTask:
    """A binary classification task between two distinct class ids."""

    class_a: int
    class_b: int

    def __post_init__(self):
        if self.class_a == self.class_b:
            raise ValueError("class_a and class_b must differ")
        if self.class_a < 0 or self.class_b < 0:
            raise ValueError("class ids must be non-negative")

    def __str__(self):
        return f"{self.class_a}/{self.class_b}"

    @classmethod
    def parse(cls, text):
        """Parse 'a/b' notation, e.g. '3/10'."""
        parts = str(text).split("/")
        if len(parts) != 2:
            raise ValueError(f"task must be 'a/b', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))


def load_npy(path):
    """Read a version-1.0 NPY file holding a 1-, 2-, or 3-d array.

    Accepts C-contiguous little-endian float64/float32 and 8/16-bit integer
    payloads; anything else is rejected so that silent reinterpretation of
    reflectance or label data is impossible.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:6] != _NPY_MAGIC:
        raise ValueError(f"{path}: bad magic string, not an NPY file")
    if raw[6:8] != b"\x01\x00":
        raise ValueError(
            f"{path}: unsupported NPY version {raw[6]}.{raw[7]} (only 1.0 supported)"
        )
    if len(raw) < 10:
        raise ValueError(f"{path}: truncated NPY header")
    (header_len,) = struct.unpack("<H", raw[8:10])
    header_end = 10 + header_len
    if len(raw) < header_end:
        raise ValueError(f"{path}: truncated NPY header")
    try:
        header = ast.literal_eval(raw[10:header_end].decode("ascii"))
    except (ValueError, SyntaxError, UnicodeDecodeError) as exc:
        raise ValueError(f"{path}: malformed NPY header dict") from exc
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise ValueError(f"{path}: malformed NPY header dict")
    descr = header["descr"]
    if descr not in _SUPPORTED_DESCRS:
        raise ValueError(f"{path}: unsupported dtype descr {descr!r}")
    if header["fortran_order"]:
        raise ValueError(f"{path}: fortran-order arrays are not supported")
    shape = header["shape"]
    if (
        not isinstance(shape, tuple)
        or not 1 <= len(shape) <= 3
        or not all(isinstance(d, int) and d >= 0 for d in shape)
    ):
        raise ValueError(f"{path}: unsupported shape {shape!r}")
    dtype = _SUPPORTED_DESCRS[descr]
    expected = int(np.prod(shape)) * dtype.itemsize
    payload = raw[header_end:]
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload has {len(payload)} bytes, expected {expected} "
            f"for shape {shape} and dtype {descr}"
        )
    return np.frombuffer(payload, dtype=dtype).reshape(shape).copy()


def write_npy(path, array):
    """Write an array as a version-1.0 NPY file (C order, 64-byte-aligned header)."""
    a = np.ascontiguousarray(array)
    descr = {
        ("f", 8): "<f8",
        ("f", 4): "<f4",
        ("u", 1): "|u1",
        ("i", 1): "|i1",
        ("u", 2): "<u2",
        ("i", 2): "<i2",
    }.get((a.dtype.kind, a.dtype.itemsize))
    if descr is None:
        raise ValueError(f"unsupported dtype {a.dtype} for NPY export")
    if not 1 <= a.ndim <= 3:
        raise ValueError(f"only 1-, 2-, or 3-d arrays supported, got ndim={a.ndim}")
    shape_repr = "(" + ", ".join(str(d) for d in a.shape) + ("," if a.ndim == 1 else "") + ")"
    header = f"{{'descr': '{descr}', 'fortran_order': False, 'shape': {shape_repr}, }}"
    # total of magic+version+length+header must be a multiple of 64, newline-terminated
    unpadded = len(_NPY_MAGIC) + 2 + 2 + len(header) + 1
    header = header + " " * (-unpadded % 64) + "\n"
    with open(path, "wb") as fh:
        fh.write(_NPY_MAGIC)
        fh.write(b"\x01\x00")
        fh.write(struct.pack("<H", len(header)))
        fh.write(header.encode("ascii"))
        fh.write(a.astype(np.dtype(descr), copy=False).tobytes(order="C"))


def load_csv(path, has_header=False, label_column="last"):
    """Parse a rectangular numeric CSV into a SpectralDataset.

    ``label_column`` selects the class-id column by index, or ``"last"``.
    """
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for row in reader:
            rows.append(row)
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: empty CSV file")
    width = len(rows[0])
    if width < 2:
        raise ValueError(f"{path}: need at least one feature column plus a label column")
    label_idx = width - 1 if label_column == "last" else int(label_column)
    if not 0 <= label_idx < width:
        raise ValueError(f"{path}: label column {label_idx} out of range for {width} columns")
    samples = np.empty((len(rows), width - 1), dtype=np.float64)
    labels = np.empty(len(rows), dtype=np.int64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: row {i} has {len(row)} cells, expected {width}")
        k = 0
        for j, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric cell {cell!r} at row {i}, column {j}"
                ) from None
            if j == label_idx:
                if value != round(value):
                    raise ValueError(
                        f"{path}: label {cell!r} at row {i} is not an integer"
                    )
                labels[i] = int(round(value))
            else:
                samples[i, k] = value
                k += 1
    return SpectralDataset(samples, labels, source=str(path))


def save_csv(dataset, path):
    """Write a dataset as CSV with a header row and the label in the last column."""
    n = dataset.samples.shape[1]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join([f"band_{j}" for j in range(n)] + ["label"]) + "\n")
        for row, label in zip(dataset.samples, dataset.labels):
            cells = [format(v, ".17g") for v in row]
            cells.append(str(int(label)))
            fh.write(",".join(cells) + "\n")


def flatten_cube(cube, keep_classes):
    """Flatten labeled cube pixels (raster order) into a SpectralDataset.

    Pixels labeled 0 are unlabeled by convention and always dropped, even if
    0 is requested.
    """
    keep = {int(c) for c in keep_classes}
    keep.discard(0)
    if not keep:
        raise ValueError("keep_classes must name at least one labeled class")
    gt = cube.ground_truth
    mask = np.isin(gt, sorted(keep))
    if not mask.any():
        raise ValueError(f"no samples for requested classes {sorted(keep)}")
    # boolean indexing of the H x W mask walks rows then columns: raster order
    samples = cube.data[mask]
    labels = gt[mask]
    return SpectralDataset(samples, labels, source="flattened cube")


def select_pair(dataset, task):
    """Extract the two-class subset for ``task``, relabeling to {0, 1}.

    Row order of the retained samples is preserved.
    """
    mask_a = dataset.labels == task.class_a
    mask_b = dataset.labels == task.class_b
    if not mask_a.any():
        raise ValueError(f"class {task.class_a} not present in dataset")
    if not mask_b.any():
        raise ValueError(f"class {task.class_b} not present in dataset")
    mask = mask_a | mask_b
    labels = np.where(dataset.labels[mask] == task.class_b, 1, 0)
    return SpectralDataset(
        dataset.samples[mask],
        labels,
        source=f"{dataset.source} [{task}]" if dataset.source else f"[{task}]",
    )
