"""Delimited-data ingestion, schema validation, normalization, and stratified folds."""
from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from importlib import resources

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed input data or invalid fold parameters."""


@dataclass
class Schema:
    """Column layout of a delimited source file."""
    class_column: int
    id_column: int | None = None
    missing_marker: str = "?"
    label_map: dict[str, str] | None = None


# Wisconsin breast-cancer file layout: sample code, nine 1-10 attributes, class 2/4.
WBC_SCHEMA = Schema(class_column=10, id_column=0, missing_marker="?",
                    label_map={"2": "B", "4": "M"})
WBC_PRIORITY = ["M", "B"]


@dataclass
class Dataset:
    """Labeled n-D points on a common coordinate schema, raw units."""
    coordinate_names: list[str]
    ids: np.ndarray            # shape (N,), unique int point ids
    values: np.ndarray         # shape (N, n), float
    labels: list[str]          # per-point class label
    class_labels: list[str]    # distinct labels in first-appearance order
    dropped_rows: int = 0

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise DatasetError("values must be a 2-D array")
        n_points, n_coords = self.values.shape
        if len(self.ids) != n_points or len(self.labels) != n_points:
            raise DatasetError("ids, values, and labels must align")
        if len(self.coordinate_names) != n_coords:
            raise DatasetError("coordinate_names must match value width")
        if len(set(self.ids.tolist())) != n_points:
            raise DatasetError("point ids must be unique")
        if not np.all(np.isfinite(self.values)):
            raise DatasetError("all values must be finite")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def class_counts(self) -> dict[str, int]:
        counts = {label: 0 for label in self.class_labels}
        for label in self.labels:
            counts[label] += 1
        return counts

    def subset(self, ids: list[int]) -> "Dataset":
        """Restrict to the given point ids, preserving dataset order."""
        keep = set(ids)
        idx = [i for i, pid in enumerate(self.ids.tolist()) if pid in keep]
        return Dataset(
            coordinate_names=list(self.coordinate_names),
            ids=self.ids[idx],
            values=self.values[idx],
            labels=[self.labels[i] for i in idx],
            class_labels=list(self.class_labels),
        )

    def fingerprint(self) -> str:
        """Stable content hash used to tie models to their source data."""
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.values).tobytes())
        digest.update(",".join(self.labels).encode())
        digest.update(",".join(self.coordinate_names).encode())
        return digest.hexdigest()


@dataclass
class NormalizedDataset(Dataset):
    """Dataset view with per-coordinate min-max scaling onto [0, 1]."""
    raw_min: np.ndarray = field(default_factory=lambda: np.zeros(0))
    raw_max: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def denormalize(self, values: np.ndarray) -> np.ndarray:
        """Map normalized values back to raw units."""
        span = self.raw_max - self.raw_min
        return self.raw_min + np.asarray(values) * span

    def subset(self, ids: list[int]) -> "NormalizedDataset":
        base = Dataset.subset(self, ids)
        return NormalizedDataset(
            coordinate_names=base.coordinate_names,
            ids=base.ids,
            values=base.values,
            labels=base.labels,
            class_labels=base.class_labels,
            raw_min=self.raw_min.copy(),
            raw_max=self.raw_max.copy(),
        )


def _looks_numeric(cell: str, missing_marker: str) -> bool:
    if cell == missing_marker:
        return True
    try:
        float(cell)
        return True
    except ValueError:
        return False


def load_csv(source, schema: Schema) -> Dataset:
    """Parse delimiter-separated text into a Dataset.

    Rows containing the missing marker in any feature cell are dropped and
    counted.  ``source`` may be a path, a text stream, or a byte stream.
    Point ids are assigned sequentially over kept rows; the source id column,
    if any, is excluded from the features (its values may repeat, so it
    cannot serve as the point id).
    """
    if isinstance(source, (str, bytes)) and not isinstance(source, bytes):
        with open(source, "r", newline="") as handle:
            rows = list(csv.reader(handle))
    else:
        if isinstance(source, bytes):
            text = source.decode()
        elif hasattr(source, "read"):
            raw = source.read()
            text = raw.decode() if isinstance(raw, bytes) else raw
        else:
            raise DatasetError("unsupported source type")
        rows = list(csv.reader(io.StringIO(text)))

    rows = [r for r in rows if r]
    if rows and not all(_looks_numeric(c, schema.missing_marker) for c in rows[0]):
        rows = rows[1:]  # header row detected by non-numeric cells
    if not rows:
        raise DatasetError("no data rows in source")

    width = len(rows[0])
    if not 0 <= schema.class_column < width:
        raise DatasetError("class column outside row width")
    skip = {schema.class_column}
    if schema.id_column is not None:
        skip.add(schema.id_column)
    feature_cols = [i for i in range(width) if i not in skip]

    values: list[list[float]] = []
    labels: list[str] = []
    dropped = 0
    for row_number, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DatasetError(f"row {row_number}: expected {width} cells, got {len(row)}")
        cells = [row[i].strip() for i in feature_cols]
        if schema.missing_marker in cells:
            dropped += 1
            continue
        try:
            values.append([float(c) for c in cells])
        except ValueError:
            bad = next(c for c in cells if not _looks_numeric(c, schema.missing_marker))
            raise DatasetError(f"row {row_number}: non-numeric feature value {bad!r}")
        label = row[schema.class_column].strip()
        if schema.label_map:
            label = schema.label_map.get(label, label)
        labels.append(label)

    if not values:
        raise DatasetError("no rows survive missing-value filtering")

    class_labels: list[str] = []
    for label in labels:
        if label not in class_labels:
            class_labels.append(label)

    array = np.asarray(values, dtype=float)
    names = [f"X{i + 1}" for i in range(array.shape[1])]
    return Dataset(coordinate_names=names, ids=np.arange(len(values)),
                   values=array, labels=labels, class_labels=class_labels,
                   dropped_rows=dropped)


def load_wbc() -> Dataset:
    """Load the bundled Wisconsin breast-cancer file (683 usable cases)."""
    data = resources.files("hyperblocks.data").joinpath("breast-cancer-wisconsin.data")
    return load_csv(str(data), WBC_SCHEMA)


def normalize(d: Dataset) -> NormalizedDataset:
    """Min-max scale each coordinate onto [0, 1]; constant coordinates map to 0.5."""
    if d.size == 0:
        raise DatasetError("cannot normalize an empty dataset")
    raw_min = d.values.min(axis=0)
    raw_max = d.values.max(axis=0)
    span = raw_max - raw_min
    constant = span == 0
    safe_span = np.where(constant, 1.0, span)
    scaled = (d.values - raw_min) / safe_span
    scaled[:, constant] = 0.5
    return NormalizedDataset(
        coordinate_names=list(d.coordinate_names),
        ids=d.ids.copy(),
        values=scaled,
        labels=list(d.labels),
        class_labels=list(d.class_labels),
        dropped_rows=d.dropped_rows,
        raw_min=raw_min,
        raw_max=raw_max,
    )


def stratified_folds(d: Dataset, k: int, seed: int) -> list[list[int]]:
    """Split point ids into k folds with per-class counts balanced within 1.

    Per class, ids are shuffled with a seeded generator and dealt round-robin.
    The dealing pointer continues across classes (it does not reset), which
    keeps overall fold sizes as even as the per-class remainders allow.
    """
    if k < 1:
        raise DatasetError("fold count must be positive")
    counts = d.class_counts()
    smallest = min(counts.values())
    if k > smallest:
        raise DatasetError(f"fold count {k} exceeds smallest class size {smallest}")

    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    pointer = 0
    for label in d.class_labels:
        ids = [int(pid) for pid, lab in zip(d.ids.tolist(), d.labels) if lab == label]
        ids.sort()
        order = rng.permutation(len(ids))
        for j in order:
            folds[pointer % k].append(ids[j])
            pointer += 1
    return [sorted(fold) for fold in folds]
