"""Axis-aligned interval boxes: hypercubes and hyper-blocks with membership queries."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import NormalizedDataset


class GeometryError(ValueError):
    """Raised for dimension mismatches and degenerate geometry arguments."""


@dataclass
class HyperBlock:
    """A box of per-coordinate closed intervals with its member points.

    ``bounds`` has shape (n, 2) with bounds[:, 0] = lower and bounds[:, 1] =
    upper edges in normalized units.  ``lo_open``/``hi_open`` mark bounds that
    exclude their endpoint; they are produced only by decision-tree branch
    conversion and are ignored by the closed-interval geometry here.
    """
    bounds: np.ndarray
    member_ids: tuple[int, ...] = ()
    class_counts: dict[str, int] = field(default_factory=dict)
    kind: str = "pure"  # pure | mixed | seed
    lo_open: np.ndarray | None = None
    hi_open: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.bounds = np.asarray(self.bounds, dtype=float)
        if self.bounds.ndim != 2 or self.bounds.shape[1] != 2:
            raise GeometryError("bounds must have shape (n, 2)")
        if np.any(self.bounds[:, 0] > self.bounds[:, 1]):
            raise GeometryError("lower bounds must not exceed upper bounds")
        self.member_ids = tuple(sorted(int(i) for i in self.member_ids))

    @property
    def dimension(self) -> int:
        return self.bounds.shape[0]

    @property
    def member_count(self) -> int:
        return len(self.member_ids)

    @property
    def center(self) -> np.ndarray:
        return self.bounds.mean(axis=1)

    @property
    def volume(self) -> float:
        return float(np.prod(self.bounds[:, 1] - self.bounds[:, 0]))

    def to_json(self) -> dict:
        obj = {
            "bounds": [[float(lo), float(hi)] for lo, hi in self.bounds],
            "members": list(self.member_ids),
            "classCounts": {k: int(v) for k, v in sorted(self.class_counts.items())},
            "dominant": dominant_class(self),
            "kind": self.kind,
        }
        return obj

    @staticmethod
    def from_json(obj: dict) -> "HyperBlock":
        counts = {str(k): int(v) for k, v in obj.get("classCounts", {}).items()}
        kind = obj.get("kind")
        if kind is None:
            kind = "pure" if len([v for v in counts.values() if v > 0]) <= 1 else "mixed"
        return HyperBlock(
            bounds=np.asarray(obj["bounds"], dtype=float),
            member_ids=tuple(obj.get("members", ())),
            class_counts=counts,
            kind=kind,
        )


def _check_same_dimension(a: HyperBlock, b: HyperBlock) -> None:
    if a.dimension != b.dimension:
        raise GeometryError(f"dimension mismatch: {a.dimension} vs {b.dimension}")


def contains(hb: HyperBlock, x: np.ndarray) -> bool:
    """True iff x lies inside every closed interval of the block."""
    x = np.asarray(x, dtype=float)
    if x.shape != (hb.dimension,):
        raise GeometryError(f"point dimension {x.shape} does not match block {hb.dimension}")
    return bool(np.all(x >= hb.bounds[:, 0]) and np.all(x <= hb.bounds[:, 1]))


def contains_batch(bounds: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of ``values`` inside the closed box ``bounds``."""
    return np.all(values >= bounds[:, 0], axis=1) & np.all(values <= bounds[:, 1], axis=1)


def block_from_bounds(bounds: np.ndarray, d: NormalizedDataset, kind: str = "pure") -> HyperBlock:
    """Build a block over the given bounds with members recomputed from d."""
    bounds = np.asarray(bounds, dtype=float)
    inside = contains_batch(bounds, d.values)
    member_ids = tuple(int(i) for i in d.ids[inside])
    counts: dict[str, int] = {}
    for pos in np.flatnonzero(inside):
        label = d.labels[int(pos)]
        counts[label] = counts.get(label, 0) + 1
    nonzero = [c for c in counts.values() if c > 0]
    resolved_kind = kind
    if kind != "seed":
        resolved_kind = "pure" if len(nonzero) <= 1 else "mixed"
    return HyperBlock(bounds=bounds, member_ids=member_ids,
                      class_counts=counts, kind=resolved_kind)


def envelope(a: HyperBlock, b: HyperBlock, d: NormalizedDataset | None = None) -> HyperBlock:
    """Smallest block containing both inputs; members recomputed from d when given."""
    _check_same_dimension(a, b)
    bounds = np.stack([
        np.minimum(a.bounds[:, 0], b.bounds[:, 0]),
        np.maximum(a.bounds[:, 1], b.bounds[:, 1]),
    ], axis=1)
    if d is None:
        merged_ids = tuple(sorted(set(a.member_ids) | set(b.member_ids)))
        counts: dict[str, int] = {}
        for label in set(a.class_counts) | set(b.class_counts):
            counts[label] = a.class_counts.get(label, 0) + b.class_counts.get(label, 0)
        return HyperBlock(bounds=bounds, member_ids=merged_ids, class_counts=counts,
                          kind="pure" if len([c for c in counts.values() if c]) <= 1 else "mixed")
    return block_from_bounds(bounds, d)


def impurity(hb: HyperBlock) -> float:
    """Fraction of members outside the largest class."""
    total = sum(hb.class_counts.values())
    if total == 0:
        raise GeometryError("impurity undefined for an empty block")
    return 1.0 - max(hb.class_counts.values()) / total


def dominant_class(hb: HyperBlock) -> str | None:
    """Largest class by member count; None when the top count is tied or empty."""
    if not hb.class_counts:
        return None
    best = max(hb.class_counts.values())
    winners = [label for label, count in hb.class_counts.items() if count == best]
    return winners[0] if len(winners) == 1 else None


def overlap_coords(a: HyperBlock, b: HyperBlock) -> set[int]:
    """Indices of coordinates where the two blocks' closed intervals intersect."""
    _check_same_dimension(a, b)
    meet = (a.bounds[:, 0] <= b.bounds[:, 1]) & (b.bounds[:, 0] <= a.bounds[:, 1])
    return {int(i) for i in np.flatnonzero(meet)}


@dataclass
class HyperCube:
    """Equal-sided box around a center point, realized as a clipped HyperBlock."""
    center: np.ndarray
    side_length: float

    def __post_init__(self) -> None:
        self.center = np.asarray(self.center, dtype=float)
        if self.side_length <= 0:
            raise GeometryError("side length must be positive")

    def bounds(self) -> np.ndarray:
        half = self.side_length / 2.0
        lo = np.clip(self.center - half, 0.0, 1.0)
        hi = np.clip(self.center + half, 0.0, 1.0)
        return np.stack([lo, hi], axis=1)


def hypercube_from_seed(x: np.ndarray, side_length: float,
                        d: NormalizedDataset | None = None) -> HyperBlock:
    """Box of side ``side_length`` centered at x, clipped to [0,1]^n.

    When a dataset is given, members are computed from it; the block keeps
    kind "seed" so interactive flows can tell it from discovered blocks.
    """
    cube = HyperCube(center=x, side_length=side_length)
    bounds = cube.bounds()
    if d is None:
        return HyperBlock(bounds=bounds, kind="seed")
    block = block_from_bounds(bounds, d, kind="seed")
    return block
