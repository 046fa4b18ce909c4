"""ID3 decision tree, branch/box conversion, and model-size accounting."""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .hyperblock import HyperBlock
from .mhyper import HBModel

# Converted boxes shrink open bounds by this much (normalized units) when a
# closed-interval approximation is required.
EPSILON = 1e-9

COMPARATORS = ("<", "<=", ">", ">=")


class TreeError(ValueError):
    """Raised for invalid tree parameters or inconsistent branch constraints."""


@dataclass
class TreeNode:
    """One node: a (coordinate <= threshold) split, or a leaf with counts."""
    coordinate: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    label: str | None = None
    class_counts: dict[str, int] = field(default_factory=dict)
    member_ids: tuple[int, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.coordinate is None

    def to_json(self) -> dict:
        if self.is_leaf:
            return {"label": self.label,
                    "classCounts": dict(sorted(self.class_counts.items())),
                    "members": list(self.member_ids)}
        return {"coordinate": self.coordinate, "threshold": self.threshold,
                "left": self.left.to_json(), "right": self.right.to_json()}

    @staticmethod
    def from_json(obj: dict) -> "TreeNode":
        if "label" in obj:
            return TreeNode(label=obj["label"],
                            class_counts={k: int(v) for k, v in obj.get("classCounts", {}).items()},
                            member_ids=tuple(obj.get("members", ())))
        return TreeNode(coordinate=int(obj["coordinate"]), threshold=float(obj["threshold"]),
                        left=TreeNode.from_json(obj["left"]),
                        right=TreeNode.from_json(obj["right"]))


@dataclass
class DecisionTree:
    """A trained binary tree; left branches take (value <= threshold)."""
    root: TreeNode
    n_dims: int
    coordinate_names: tuple[str, ...] = ()

    @property
    def depth(self) -> int:
        def walk(node: TreeNode) -> int:
            if node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    @property
    def branch_count(self) -> int:
        return len(self.leaves())

    @property
    def internal_count(self) -> int:
        def walk(node: TreeNode) -> int:
            if node.is_leaf:
                return 0
            return 1 + walk(node.left) + walk(node.right)
        return walk(self.root)

    def leaves(self) -> list[TreeNode]:
        out: list[TreeNode] = []

        def walk(node: TreeNode) -> None:
            if node.is_leaf:
                out.append(node)
            else:
                walk(node.left)
                walk(node.right)
        walk(self.root)
        return out

    def branches(self) -> list[tuple[list[tuple[int, str, float]], TreeNode]]:
        """Root-to-leaf paths as (constraint list, leaf) pairs."""
        out: list[tuple[list[tuple[int, str, float]], TreeNode]] = []

        def walk(node: TreeNode, path: list[tuple[int, str, float]]) -> None:
            if node.is_leaf:
                out.append((list(path), node))
                return
            walk(node.left, path + [(node.coordinate, "<=", node.threshold)])
            walk(node.right, path + [(node.coordinate, ">", node.threshold)])
        walk(self.root, [])
        return out

    def predict(self, x: np.ndarray) -> str:
        node = self.root
        x = np.asarray(x, dtype=float)
        while not node.is_leaf:
            node = node.left if x[node.coordinate] <= node.threshold else node.right
        return node.label

    def to_json(self) -> dict:
        return {"root": self.root.to_json(), "nDims": self.n_dims,
                "coordinateNames": list(self.coordinate_names)}

    @staticmethod
    def from_json(obj: dict) -> "DecisionTree":
        return DecisionTree(root=TreeNode.from_json(obj["root"]), n_dims=int(obj["nDims"]),
                            coordinate_names=tuple(obj.get("coordinateNames", ())))


@dataclass
class TreeConfig:
    """Stopping controls for id3_train."""
    max_depth: int | None = None
    min_leaf: int = 1


def _entropy(labels: list[str]) -> float:
    counts = np.array(list(Counter(labels).values()), dtype=float)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def _split_candidates(values: np.ndarray) -> list[tuple[int, float]]:
    """Midpoints between consecutive distinct values, per coordinate."""
    out: list[tuple[int, float]] = []
    for coord in range(values.shape[1]):
        distinct = np.unique(values[:, coord])
        for lo, hi in zip(distinct[:-1], distinct[1:]):
            out.append((coord, float((lo + hi) / 2.0)))
    return out


def id3_train(d: Dataset, cfg: TreeConfig | None = None) -> DecisionTree:
    """Grow a tree by maximum information gain on (coordinate, threshold) splits.

    Gain ties break toward the lower coordinate index, then lower threshold,
    so zero-gain splits still fire on impure nodes (the XOR case needs them).
    """
    cfg = cfg or TreeConfig()
    if d.size == 0:
        raise TreeError("cannot train on an empty dataset")

    def build(rows: np.ndarray, depth: int) -> TreeNode:
        labels = [d.labels[int(r)] for r in rows]
        counts = {label: labels.count(label) for label in sorted(set(labels))}
        majority = max(sorted(counts), key=lambda lab: counts[lab])
        leaf = TreeNode(label=majority, class_counts=counts,
                        member_ids=tuple(int(d.ids[int(r)]) for r in rows))
        if len(counts) == 1 or (cfg.max_depth is not None and depth >= cfg.max_depth):
            return leaf

        values = d.values[rows]
        base = _entropy(labels)
        best: tuple[float, int, float] | None = None  # (-gain, coord, threshold)
        for coord, threshold in _split_candidates(values):
            left = values[:, coord] <= threshold
            n_left = int(left.sum())
            if n_left < cfg.min_leaf or len(rows) - n_left < cfg.min_leaf:
                continue
            left_labels = [labels[i] for i in np.flatnonzero(left)]
            right_labels = [labels[i] for i in np.flatnonzero(~left)]
            split = (n_left * _entropy(left_labels)
                     + (len(rows) - n_left) * _entropy(right_labels)) / len(rows)
            key = (-(base - split), coord, threshold)
            if best is None or key < best:
                best = key
        if best is None:
            return leaf
        _, coord, threshold = best
        mask = values[:, coord] <= threshold
        return TreeNode(coordinate=coord, threshold=threshold,
                        left=build(rows[mask], depth + 1),
                        right=build(rows[~mask], depth + 1))

    root = build(np.arange(d.size), 0)
    return DecisionTree(root=root, n_dims=d.dimension,
                        coordinate_names=tuple(d.coordinate_names))


def _normalize_domain(domain, n_dims: int) -> np.ndarray:
    domain = np.asarray(domain, dtype=float)
    if domain.shape == (2,):
        domain = np.tile(domain, (n_dims, 1))
    if domain.shape != (n_dims, 2) or np.any(domain[:, 0] >= domain[:, 1]):
        raise TreeError("domain must be one (lo, hi) pair or one per coordinate")
    return domain


def branch_to_hb(branch: list[tuple[int, str, float]], domain,
                 n_dims: int | None = None) -> HyperBlock:
    """Intersect branch constraints into a box; open bounds keep a flag.

    Unconstrained coordinates span the full domain.  Contradictory constraints
    (an empty interval) raise.
    """
    if n_dims is None:
        if not branch:
            raise TreeError("cannot infer dimension from an empty branch")
        n_dims = max(coord for coord, _, _ in branch) + 1
    domain = _normalize_domain(domain, n_dims)
    lo, hi = domain[:, 0].copy(), domain[:, 1].copy()
    lo_open = np.zeros(n_dims, dtype=bool)
    hi_open = np.zeros(n_dims, dtype=bool)
    for coord, comparator, threshold in branch:
        if comparator not in COMPARATORS:
            raise TreeError(f"unknown comparator {comparator!r}")
        if not 0 <= coord < n_dims:
            raise TreeError(f"coordinate {coord} outside dimension {n_dims}")
        t = float(threshold)
        if comparator in (">", ">="):
            is_open = comparator == ">"
            if t > lo[coord] or (t == lo[coord] and is_open and not lo_open[coord]):
                lo[coord], lo_open[coord] = t, is_open
        else:
            is_open = comparator == "<"
            if t < hi[coord] or (t == hi[coord] and is_open and not hi_open[coord]):
                hi[coord], hi_open[coord] = t, is_open
    for coord in range(n_dims):
        empty = lo[coord] > hi[coord] or (
            lo[coord] == hi[coord] and (lo_open[coord] or hi_open[coord]))
        if empty:
            raise TreeError(f"contradictory constraints empty coordinate {coord}")
    return HyperBlock(bounds=np.stack([lo, hi], axis=1), kind="pure",
                      lo_open=lo_open, hi_open=hi_open)


def hb_to_branch(hb: HyperBlock, domain) -> list[tuple[int, str, float]]:
    """Emit the threshold conjunction describing a box inside the domain."""
    domain = _normalize_domain(domain, hb.dimension)
    lo_open = hb.lo_open if hb.lo_open is not None else np.zeros(hb.dimension, dtype=bool)
    hi_open = hb.hi_open if hb.hi_open is not None else np.zeros(hb.dimension, dtype=bool)
    out: list[tuple[int, str, float]] = []
    for coord in range(hb.dimension):
        lo, hi = hb.bounds[coord]
        if lo < domain[coord, 0] or hi > domain[coord, 1]:
            raise TreeError(f"block bounds leave the domain in coordinate {coord}")
        if lo > domain[coord, 0] or lo_open[coord]:
            out.append((coord, ">" if lo_open[coord] else ">=", float(lo)))
        if hi < domain[coord, 1] or hi_open[coord]:
            out.append((coord, "<" if hi_open[coord] else "<=", float(hi)))
    return out


def hb_contains_open(hb: HyperBlock, x: np.ndarray) -> bool:
    """Membership test honoring the open/closed flags of converted blocks."""
    x = np.asarray(x, dtype=float)
    lo_open = hb.lo_open if hb.lo_open is not None else np.zeros(hb.dimension, dtype=bool)
    hi_open = hb.hi_open if hb.hi_open is not None else np.zeros(hb.dimension, dtype=bool)
    above = np.where(lo_open, x > hb.bounds[:, 0], x >= hb.bounds[:, 0])
    below = np.where(hi_open, x < hb.bounds[:, 1], x <= hb.bounds[:, 1])
    return bool(np.all(above) and np.all(below))


def shrink_open_bounds(hb: HyperBlock) -> HyperBlock:
    """Closed-interval approximation: pull open bounds inward by EPSILON."""
    lo_open = hb.lo_open if hb.lo_open is not None else np.zeros(hb.dimension, dtype=bool)
    hi_open = hb.hi_open if hb.hi_open is not None else np.zeros(hb.dimension, dtype=bool)
    lo = np.where(lo_open, hb.bounds[:, 0] + EPSILON, hb.bounds[:, 0])
    hi = np.where(hi_open, hb.bounds[:, 1] - EPSILON, hb.bounds[:, 1])
    return HyperBlock(bounds=np.stack([lo, hi], axis=1), member_ids=hb.member_ids,
                      class_counts=dict(hb.class_counts), kind=hb.kind)


def tree_to_hbs(tree: DecisionTree, domain) -> list[HyperBlock]:
    """Convert every leaf's branch into a box carrying the leaf's counts."""
    out: list[HyperBlock] = []
    for path, leaf in tree.branches():
        hb = branch_to_hb(path, domain, n_dims=tree.n_dims)
        kind = "pure" if len(leaf.class_counts) <= 1 else "mixed"
        out.append(HyperBlock(bounds=hb.bounds, member_ids=leaf.member_ids,
                              class_counts=dict(leaf.class_counts), kind=kind,
                              lo_open=hb.lo_open, hi_open=hb.hi_open))
    return out


def common_root_merge(branch_a: list[tuple[int, str, float]],
                      branch_b: list[tuple[int, str, float]]):
    """Merge two branches that split the same coordinate at the same threshold.

    Returns (coordinate, threshold, rest_a, rest_b) when one branch carries
    (x_i <= t) and the other (x_i > t); otherwise None.
    """
    for ia, (coord_a, cmp_a, t_a) in enumerate(branch_a):
        for ib, (coord_b, cmp_b, t_b) in enumerate(branch_b):
            if coord_a != coord_b or t_a != t_b:
                continue
            if {cmp_a, cmp_b} == {"<=", ">"} or {cmp_a, cmp_b} == {"<", ">="}:
                rest_a = branch_a[:ia] + branch_a[ia + 1:]
                rest_b = branch_b[:ib] + branch_b[ib + 1:]
                return coord_a, t_a, rest_a, rest_b
    return None


def render_branch(branch: list[tuple[int, str, float]],
                  names: tuple[str, ...] | None = None) -> str:
    """Text form like "x1 > 5 & x2 < 6 & x3 > 2"."""
    def name(coord: int) -> str:
        return names[coord] if names and coord < len(names) else f"x{coord + 1}"
    return " & ".join(f"{name(c)} {cmp} {t:g}" for c, cmp, t in branch)


_TERM = re.compile(r"^\s*([A-Za-z_]\w*?)(\d+)\s*(<=|>=|<|>)\s*([-+]?\d+(?:\.\d+)?)\s*$")


def parse_branch(text: str) -> list[tuple[int, str, float]]:
    """Parse "x1>5 & x2<6" into (coordinate, comparator, threshold) triples."""
    out: list[tuple[int, str, float]] = []
    for term in text.split("&"):
        m = _TERM.match(term)
        if not m:
            raise TreeError(f"cannot parse branch term {term.strip()!r}")
        out.append((int(m.group(2)) - 1, m.group(3), float(m.group(4))))
    return out


@dataclass(frozen=True)
class ComplexityReport:
    """How many scalars a model stores, and how small its units run."""
    numbers_stored: int
    smallest_unit_size: int
    unit_sizes: tuple[int, ...]
    convention: str

    def units_below(self, n: int) -> int:
        return sum(1 for s in self.unit_sizes if s < n)

    def fraction_below(self, n: int) -> float:
        return self.units_below(n) / len(self.unit_sizes) if self.unit_sizes else 0.0

    def to_json(self) -> dict:
        return {"numbersStored": self.numbers_stored,
                "smallestUnitSize": self.smallest_unit_size,
                "unitSizes": list(self.unit_sizes),
                "convention": self.convention}


def complexity(model: DecisionTree | HBModel) -> ComplexityReport:
    """Scalar-count conventions: DT = 2 per internal + 1 per leaf; HB = 2n+1 each."""
    if isinstance(model, DecisionTree):
        sizes = tuple(sum(leaf.class_counts.values()) for leaf in model.leaves())
        numbers = 2 * model.internal_count + model.branch_count
        convention = "decision tree: coordinate+threshold per internal node, class per leaf"
    elif isinstance(model, HBModel):
        if not model.blocks:
            raise TreeError("complexity of an empty block model is undefined")
        sizes = tuple(b.member_count for b in model.blocks)
        numbers = sum(2 * b.dimension + 1 for b in model.blocks)
        convention = "hyper-blocks: two bounds per coordinate plus a class per block"
    else:
        raise TreeError(f"unsupported model type {type(model).__name__}")
    return ComplexityReport(numbers_stored=numbers, smallest_unit_size=min(sizes),
                            unit_sizes=sizes, convention=convention)
