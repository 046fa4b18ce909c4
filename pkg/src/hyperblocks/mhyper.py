"""Greedy hyper-block discovery: grow maximal pure blocks from single-point
seeds, then merge them into dominant blocks under an impurity threshold."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import NormalizedDataset
from .hyperblock import (HyperBlock, block_from_bounds, contains, contains_batch,
                         dominant_class, envelope, hypercube_from_seed, impurity)

COMBINE_MODES = ("envelope-M1", "shared-point-M2", "shared-face-M3")


@dataclass
class MHyperConfig:
    """Knobs for the merge passes.

    ``seed_order`` of None means dataset order (ascending point id).  The
    combine mode gates candidate pairs during dominant merging; the default
    envelope mode applies no gate, since center-containment checks would rule
    out merges between single-point blocks.
    """
    impurity_threshold: float = 0.1
    seed_order: tuple[int, ...] | None = None
    allow_overlap: bool = True
    combine_mode: str = "envelope-M1"

    def __post_init__(self) -> None:
        if not 0.0 <= self.impurity_threshold < 1.0:
            raise ValueError("impurity threshold must be in [0, 1)")
        if self.combine_mode not in COMBINE_MODES:
            raise ValueError(f"unknown combine mode {self.combine_mode!r}")

    def to_json(self) -> dict:
        return {
            "impurityThreshold": self.impurity_threshold,
            "seedOrder": list(self.seed_order) if self.seed_order is not None else None,
            "allowOverlap": self.allow_overlap,
            "combineMode": self.combine_mode,
        }

    @staticmethod
    def from_json(obj: dict) -> "MHyperConfig":
        order = obj.get("seedOrder")
        return MHyperConfig(
            impurity_threshold=obj.get("impurityThreshold", 0.1),
            seed_order=tuple(order) if order is not None else None,
            allow_overlap=obj.get("allowOverlap", True),
            combine_mode=obj.get("combineMode", "envelope-M1"),
        )


@dataclass
class HBModel:
    """Discovered blocks plus the ones refused for exceeding the threshold."""
    blocks: list[HyperBlock]
    refused: list[HyperBlock] = field(default_factory=list)
    config: MHyperConfig = field(default_factory=MHyperConfig)
    provenance: str = ""

    def to_json(self) -> dict:
        return {
            "blocks": [b.to_json() for b in self.blocks],
            "refused": [b.to_json() for b in self.refused],
            "config": self.config.to_json(),
            "provenance": self.provenance,
        }

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @staticmethod
    def from_json(obj: dict) -> "HBModel":
        return HBModel(
            blocks=[HyperBlock.from_json(b) for b in obj.get("blocks", [])],
            refused=[HyperBlock.from_json(b) for b in obj.get("refused", [])],
            config=MHyperConfig.from_json(obj.get("config", {})),
            provenance=obj.get("provenance", ""),
        )


def merge_pure(d: NormalizedDataset, cfg: MHyperConfig | None = None) -> list[HyperBlock]:
    """Grow maximal pure blocks from single-point seeds over a shrinking pool.

    Every point starts as an unclaimed singleton.  Seeds are visited in
    order; a point that is already inside a built block does not seed a new
    one, but stays in the pool as a merge candidate.  The seed block scans
    unclaimed same-class points in ascending order and commits any envelope
    whose recomputed membership over the full dataset stays pure, claiming
    the merged point.  Because envelopes only grow, a candidate that fails
    once can never succeed later, so a single ascending pass reaches the
    same fixpoint as rescanning after every commit.
    """
    cfg = cfg or MHyperConfig()
    values = d.values
    n_points = d.size
    labels = np.asarray(d.labels)
    order = list(cfg.seed_order) if cfg.seed_order is not None else list(range(n_points))
    if sorted(order) != list(range(n_points)):
        raise ValueError("seed order must be a permutation of point positions")

    claimed = np.zeros(n_points, dtype=bool)
    covered = np.zeros(n_points, dtype=bool)
    blocks: list[HyperBlock] = []
    class_positions = {label: np.flatnonzero(labels == label) for label in d.class_labels}

    for seed in order:
        if claimed[seed] or covered[seed]:
            continue
        label = d.labels[seed]
        opposite = labels != label
        claimed[seed] = True
        lo = values[seed].copy()
        hi = values[seed].copy()
        inside = np.zeros(n_points, dtype=bool)
        inside[seed] = True
        for p in class_positions[label]:
            if claimed[p]:
                continue
            if inside[p]:
                claimed[p] = True  # already in the envelope: merging is a no-op
                continue
            cand_lo = np.minimum(lo, values[p])
            cand_hi = np.maximum(hi, values[p])
            cand_inside = np.all(values >= cand_lo, axis=1) & np.all(values <= cand_hi, axis=1)
            if np.any(cand_inside & opposite):
                continue
            lo, hi, inside = cand_lo, cand_hi, cand_inside
            claimed[p] = True
        block = block_from_bounds(np.stack([lo, hi], axis=1), d)
        blocks.append(block)
        covered |= inside
    return blocks


def combine_mode_check(a: HyperBlock, b: HyperBlock, mode: str, eps: float = 0.0) -> bool:
    """Literal pair-combination predicates.

    envelope-M1: each block's center lies inside the other's bounds.
    shared-point-M2: some dataset point is a member of both blocks.
    shared-face-M3: the interval sets agree (within eps) in all but at most
    one coordinate, and in that coordinate each center lies inside the other
    block's interval.
    """
    if a.dimension != b.dimension:
        raise ValueError("dimension mismatch")
    if mode == "envelope-M1":
        return contains(a, b.center) and contains(b, a.center)
    if mode == "shared-point-M2":
        return bool(set(a.member_ids) & set(b.member_ids))
    if mode == "shared-face-M3":
        same = (np.abs(a.bounds[:, 0] - b.bounds[:, 0]) <= eps) & \
               (np.abs(a.bounds[:, 1] - b.bounds[:, 1]) <= eps)
        differing = np.flatnonzero(~same)
        if len(differing) == 0:
            return True
        if len(differing) > 1:
            return False
        i = int(differing[0])
        ca, cb = a.center[i], b.center[i]
        return bool(b.bounds[i, 0] <= ca <= b.bounds[i, 1]
                    and a.bounds[i, 0] <= cb <= a.bounds[i, 1])
    raise ValueError(f"unknown combine mode {mode!r}")


def merge_dominant(blocks: list[HyperBlock], d: NormalizedDataset,
                   cfg: MHyperConfig | None = None) -> HBModel:
    """Merge blocks greedily while the joint impurity stays below threshold.

    Each round evaluates every allowed pair's envelope on the full dataset
    and commits the lowest-impurity one (ties: smaller envelope volume, then
    lower pair index).  The merged block replaces the pair at the end of the
    list.  Blocks left with impurity above the threshold are refused.
    """
    cfg = cfg or MHyperConfig()
    work = list(blocks)
    gate = cfg.combine_mode != "envelope-M1"
    while len(work) >= 2:
        best = None
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                if gate and not combine_mode_check(work[i], work[j], cfg.combine_mode):
                    continue
                joint = envelope(work[i], work[j], d)
                imp = impurity(joint)
                if imp >= cfg.impurity_threshold:
                    continue
                key = (imp, joint.volume, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j, joint)
        if best is None:
            break
        _, i, j, joint = best
        work = [b for t, b in enumerate(work) if t not in (i, j)]
        work.append(joint)

    kept, refused = [], []
    for block in work:
        (kept if impurity(block) <= cfg.impurity_threshold else refused).append(block)
    return HBModel(blocks=kept, refused=refused, config=cfg, provenance=d.fingerprint())


def dedup(blocks: list[HyperBlock]) -> list[HyperBlock]:
    """Drop blocks whose bounds exactly repeat an earlier block's bounds."""
    out: list[HyperBlock] = []
    for block in blocks:
        if not any(np.array_equal(block.bounds, kept.bounds) for kept in out):
            out.append(block)
    return out


def discover(d: NormalizedDataset, cfg: MHyperConfig | None = None) -> HBModel:
    """Full pipeline: pure growth, then dominant merging when the threshold allows."""
    cfg = cfg or MHyperConfig()
    pure = merge_pure(d, cfg)
    if cfg.impurity_threshold > 0.0:
        return merge_dominant(pure, d, cfg)
    return HBModel(blocks=pure, refused=[], config=cfg, provenance=d.fingerprint())


def seeded_blocks(d: NormalizedDataset, side_length: float) -> list[HyperBlock]:
    """Seed one hypercube per point and drop exact duplicates.

    This is the bulk form of the workbench's click-to-seed action: the cube
    around each point keeps whatever other points fall inside, so the result
    generally mixes classes and overlaps heavily.
    """
    cubes = [hypercube_from_seed(d.values[i], side_length, d) for i in range(d.size)]
    return dedup(cubes)
