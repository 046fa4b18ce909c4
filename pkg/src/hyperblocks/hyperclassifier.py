"""Hyper classification: R1 membership, R2 nearest block, R3 k-NN block voting."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import NormalizedDataset, stratified_folds
from .hyperblock import HyperBlock, contains_batch, dominant_class, impurity
from .mhyper import HBModel, MHyperConfig, discover

REFUSED = "refused"
DISTANCE_VARIANTS = ("N1", "N2", "N3")


class ClassifierError(ValueError):
    """Raised for invalid classifier configuration or degenerate learning splits."""


@dataclass
class HyperModel:
    """A block model plus the voting parameters that make it a classifier.

    ``class_priority`` orders labels highest-risk first; it settles dominant-
    class ties and exact distance ties.
    """
    hb_model: HBModel
    k: int = 3
    distance_variant: str = "N2"
    class_priority: tuple[str, ...] = ()
    accuracy_threshold_q: float = 0.0
    k_search_range: tuple[int, ...] = (1, 3, 5)
    low_confidence: bool = False
    learn_record: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.distance_variant not in DISTANCE_VARIANTS:
            raise ClassifierError(f"unknown distance variant {self.distance_variant!r}")
        self.k_search_range = tuple(int(k) for k in self.k_search_range)
        if not self.k_search_range or min(self.k_search_range) < 1:
            raise ClassifierError("k_search_range must contain positive integers")
        if self.k not in self.k_search_range:
            raise ClassifierError(f"k={self.k} lies outside the search range {self.k_search_range}")
        self.class_priority = tuple(self.class_priority)

    def to_json(self) -> dict:
        return {
            "hbModel": self.hb_model.to_json(),
            "k": self.k,
            "distanceVariant": self.distance_variant,
            "classPriority": list(self.class_priority),
            "accuracyThresholdQ": self.accuracy_threshold_q,
            "kSearchRange": list(self.k_search_range),
            "lowConfidence": self.low_confidence,
            "learnRecord": self.learn_record,
        }

    @staticmethod
    def from_json(obj: dict) -> "HyperModel":
        return HyperModel(
            hb_model=HBModel.from_json(obj["hbModel"]),
            k=int(obj.get("k", 3)),
            distance_variant=obj.get("distanceVariant", "N2"),
            class_priority=tuple(obj.get("classPriority", ())),
            accuracy_threshold_q=float(obj.get("accuracyThresholdQ", 0.0)),
            k_search_range=tuple(obj.get("kSearchRange", (1, 3, 5))),
            low_confidence=bool(obj.get("lowConfidence", False)),
            learn_record=dict(obj.get("learnRecord", {})),
        )


@dataclass(frozen=True)
class Classification:
    """Outcome of classifying one point: a class label or an explicit refusal.

    ``evidence`` lists (block index, distance) pairs for the blocks consulted;
    R1 hits carry distance 0.0.
    """
    outcome: str
    rule_fired: str  # R1 | R2 | R3 | refusal
    evidence: tuple[tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        if (self.outcome == REFUSED) != (self.rule_fired == "refusal"):
            raise ClassifierError("refused outcome must pair with the refusal rule")

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "ruleFired": self.rule_fired,
            "evidence": [[i, float(dist)] for i, dist in self.evidence],
        }


def block_decision(hb: HyperBlock, priority: tuple[str, ...] = ()) -> str | None:
    """The class a block votes for: dominant class, ties settled by priority."""
    if not hb.class_counts:
        return None
    top = max(hb.class_counts.values())
    tied = sorted(label for label, count in hb.class_counts.items() if count == top)
    if len(tied) == 1:
        return tied[0]
    ranked = [label for label in priority if label in tied]
    return ranked[0] if ranked else tied[0]


def resolution_key(hb: HyperBlock, priority: tuple[str, ...] = ()):
    """Sort key settling overlap conflicts: purer, then larger, then priority."""
    decision = block_decision(hb, priority)
    rank = priority.index(decision) if decision in priority else len(priority)
    return (impurity(hb), -hb.member_count, rank)


def distance_to_hb(x: np.ndarray, hb: HyperBlock, variant: str,
                   d: NormalizedDataset | None = None) -> float:
    """Euclidean distance from x to a block under one of the N1-N3 variants."""
    x = np.asarray(x, dtype=float)
    if x.shape != (hb.dimension,):
        raise ClassifierError(f"point dimension {x.shape} does not match block {hb.dimension}")
    if variant == "N1":
        return float(np.linalg.norm(x - hb.center))
    if variant not in DISTANCE_VARIANTS:
        raise ClassifierError(f"unknown distance variant {variant!r}")
    if d is None:
        raise ClassifierError(f"variant {variant} needs the dataset holding the block members")
    members = _member_rows(hb, d)
    if members.shape[0] == 0:
        raise ClassifierError(f"variant {variant} is undefined for an empty block")
    if variant == "N2":
        return float(np.linalg.norm(x - members.mean(axis=0)))
    return float(np.min(np.linalg.norm(members - x, axis=1)))


def _member_rows(hb: HyperBlock, d: NormalizedDataset) -> np.ndarray:
    pos = {int(pid): row for row, pid in enumerate(d.ids.tolist())}
    rows = [pos[int(pid)] for pid in hb.member_ids if int(pid) in pos]
    return d.values[rows]


def _distance_matrix(blocks: list[HyperBlock], points: np.ndarray, variant: str,
                     d: NormalizedDataset) -> np.ndarray:
    """(n_blocks, n_points) distances under the given variant."""
    if variant == "N1":
        centers = np.stack([b.center for b in blocks])
        return np.linalg.norm(points[None, :, :] - centers[:, None, :], axis=2)
    out = np.empty((len(blocks), points.shape[0]))
    for i, b in enumerate(blocks):
        members = _member_rows(b, d)
        if members.shape[0] == 0:
            raise ClassifierError(f"variant {variant} is undefined for an empty block")
        if variant == "N2":
            out[i] = np.linalg.norm(points - members.mean(axis=0), axis=1)
        else:
            gaps = np.linalg.norm(points[:, None, :] - members[None, :, :], axis=2)
            out[i] = gaps.min(axis=1)
    return out


def classify_batch(points: np.ndarray, m: HyperModel,
                   d: NormalizedDataset) -> list[Classification]:
    """Classify each row of ``points`` (normalized units) with R1 then R3."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    blocks = list(m.hb_model.blocks)
    priority = m.class_priority
    results: list[Classification] = [None] * points.shape[0]  # type: ignore[list-item]

    if not blocks:
        return [Classification(REFUSED, "refusal")] * points.shape[0]

    order = sorted(range(len(blocks)), key=lambda i: resolution_key(blocks[i], priority))
    inside = np.stack([contains_batch(blocks[i].bounds, points) for i in order])
    covered = inside.any(axis=0)
    first = inside.argmax(axis=0)
    for p in np.flatnonzero(covered):
        bi = order[int(first[p])]
        outcome = block_decision(blocks[bi], priority)
        if outcome is None:
            results[p] = Classification(REFUSED, "refusal", ((bi, 0.0),))
        else:
            results[p] = Classification(outcome, "R1", ((bi, 0.0),))

    open_rows = np.flatnonzero(~covered)
    if open_rows.size == 0:
        return results
    if len(blocks) < m.k:  # not enough blocks in the vicinity to vote
        for p in open_rows:
            results[p] = Classification(REFUSED, "refusal")
        return results

    dist = _distance_matrix(blocks, points[open_rows], m.distance_variant, d)
    decisions = [block_decision(b, priority) for b in blocks]
    for col, p in enumerate(open_rows):
        ranked = sorted(range(len(blocks)), key=lambda i: (dist[i, col], i))
        top = ranked[:m.k]
        evidence = tuple((i, float(dist[i, col])) for i in top)
        votes: dict[str, int] = {}
        for i in top:
            if decisions[i] is not None:
                votes[decisions[i]] = votes.get(decisions[i], 0) + 1
        if not votes:
            results[p] = Classification(REFUSED, "refusal", evidence)
            continue
        best = max(votes.values())
        winners = sorted(label for label, count in votes.items() if count == best)
        if len(winners) == 1:
            results[p] = Classification(winners[0], "R3", evidence)
            continue
        # Split vote: fall back to the single nearest block (R2); an exact
        # distance tie between conflicting blocks is settled by priority.
        d0 = dist[ranked[0], col]
        nearest = sorted({decisions[i] for i in ranked
                          if dist[i, col] == d0 and decisions[i] is not None})
        if len(nearest) == 1:
            results[p] = Classification(nearest[0], "R2", evidence)
        else:
            ranked_priority = [label for label in priority if label in nearest]
            outcome = ranked_priority[0] if ranked_priority else nearest[0]
            results[p] = Classification(outcome, "R2", evidence)
    return results


def classify(x: np.ndarray, m: HyperModel, d: NormalizedDataset) -> Classification:
    """Classify one point; see classify_batch for the rule order."""
    return classify_batch(np.asarray(x, dtype=float)[None, :], m, d)[0]


@dataclass
class LearnConfig:
    """Parameters for learn(): k search, acceptance bar Q, and the data split."""
    k_range: tuple[int, ...] = (1, 3, 5)
    q: float = 0.0
    variant: str = "N2"
    split_ratio: float = 0.8
    split_seed: int = 0
    class_priority: tuple[str, ...] = ()


def learn(train: NormalizedDataset, cfg: MHyperConfig | None = None,
          learn_cfg: LearnConfig | None = None) -> HyperModel:
    """Discover blocks on one slice of the data and pick k on the held-out rest.

    The training data splits into T_rh (block discovery) and T_rk (k tuning)
    stratified by class at ``split_ratio``.  When even the best k stays below
    the Q bar, the model keeps the smallest k and is flagged low-confidence.
    """
    cfg = cfg or MHyperConfig()
    lc = learn_cfg or LearnConfig()
    if len(set(train.labels)) < 2:
        raise ClassifierError("learning needs at least two classes")
    if not 0.0 < lc.split_ratio < 1.0:
        raise ClassifierError("split_ratio must lie strictly between 0 and 1")
    pieces = max(2, round(1.0 / (1.0 - lc.split_ratio)))
    folds = stratified_folds(train, pieces, lc.split_seed)
    rk_ids = folds[0]
    rh_ids = sorted(set(train.ids.tolist()) - set(rk_ids))
    if not rk_ids or not rh_ids:
        raise ClassifierError("degenerate split: one side of the T_rh/T_rk split is empty")
    t_rh = train.subset(rh_ids)
    t_rk = train.subset(rk_ids)

    hb = discover(t_rh, cfg)
    record: dict = {"singletonEvaluation": _singleton_record(hb, t_rh, lc.variant),
                    "kAccuracies": {}}

    best_k, best_acc = None, -1.0
    for k in sorted(set(int(k) for k in lc.k_range)):
        candidate = HyperModel(hb_model=hb, k=k, distance_variant=lc.variant,
                               class_priority=lc.class_priority,
                               accuracy_threshold_q=lc.q, k_search_range=tuple(lc.k_range))
        outcomes = classify_batch(t_rk.values, candidate, t_rh)
        correct = sum(1 for c, label in zip(outcomes, t_rk.labels) if c.outcome == label)
        acc = correct / t_rk.size
        record["kAccuracies"][str(k)] = acc
        if acc > best_acc:
            best_k, best_acc = k, acc
    low_confidence = best_acc < lc.q
    if low_confidence:
        best_k = min(lc.k_range)
    return HyperModel(hb_model=hb, k=best_k, distance_variant=lc.variant,
                      class_priority=lc.class_priority, accuracy_threshold_q=lc.q,
                      k_search_range=tuple(lc.k_range), low_confidence=low_confidence,
                      learn_record=record)


def _singleton_record(hb: HBModel, d: NormalizedDataset, variant: str) -> dict:
    """Score single-point blocks by whether their nearest other block agrees."""
    positive = negative = 0
    for i, b in enumerate(hb.blocks):
        if b.member_count != 1:
            continue
        x = _member_rows(b, d)[0]
        others = [ob for j, ob in enumerate(hb.blocks) if j != i]
        if not others:
            continue
        nearest = min(others, key=lambda ob: distance_to_hb(x, ob, variant, d))
        if block_decision(nearest) == block_decision(b):
            positive += 1
        else:
            negative += 1
    return {"positive": positive, "negative": negative}


def classify_with_small_hb_refusal(m: HyperModel, min_block_size: int) -> HyperModel:
    """Move blocks with fewer than min_block_size members to the refused list."""
    if min_block_size < 1:
        raise ClassifierError("min_block_size must be at least 1")
    kept = [b for b in m.hb_model.blocks if b.member_count >= min_block_size]
    moved = [b for b in m.hb_model.blocks if b.member_count < min_block_size]
    pruned = HBModel(blocks=kept, refused=list(m.hb_model.refused) + moved,
                     config=m.hb_model.config, provenance=m.hb_model.provenance)
    return replace(m, hb_model=pruned,
                   learn_record=dict(m.learn_record, minBlockSize=min_block_size))


@dataclass(frozen=True)
class CoverageReport:
    """R1 coverage of a dataset: how much is covered and how well."""
    total: int
    covered: int
    correct: int

    @property
    def recall(self) -> float:
        return self.covered / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        return self.correct / self.covered if self.covered else 0.0

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "covered": self.covered,
            "correct": self.correct,
            "recall": self.recall,
            "precision": self.precision,
        }


def coverage_report(m: HyperModel, d: NormalizedDataset) -> CoverageReport:
    """Score R1-only classification over the points the model still covers."""
    blocks = list(m.hb_model.blocks)
    if not blocks:
        return CoverageReport(total=d.size, covered=0, correct=0)
    order = sorted(range(len(blocks)), key=lambda i: resolution_key(blocks[i], m.class_priority))
    inside = np.stack([contains_batch(blocks[i].bounds, d.values) for i in order])
    covered = inside.any(axis=0)
    first = inside.argmax(axis=0)
    correct = 0
    for p in np.flatnonzero(covered):
        decision = block_decision(blocks[order[int(first[p])]], m.class_priority)
        correct += (decision == d.labels[int(p)])
    return CoverageReport(total=d.size, covered=int(covered.sum()), correct=int(correct))


def resolution_report(m: HyperModel, d: NormalizedDataset) -> dict:
    """Partition covered points by their resolved block and count disagreements.

    Under overlap resolution each covered point belongs to exactly one block,
    so summing the members that disagree with their block's decision over the
    mixed cells reproduces the R1 training error count.
    """
    blocks = list(m.hb_model.blocks)
    per_block = [dict() for _ in blocks]
    errors = 0
    if blocks:
        order = sorted(range(len(blocks)),
                       key=lambda i: resolution_key(blocks[i], m.class_priority))
        inside = np.stack([contains_batch(blocks[i].bounds, d.values) for i in order])
        covered = inside.any(axis=0)
        first = inside.argmax(axis=0)
        for p in np.flatnonzero(covered):
            bi = order[int(first[p])]
            label = d.labels[int(p)]
            per_block[bi][label] = per_block[bi].get(label, 0) + 1
        for bi, cell in enumerate(per_block):
            decision = block_decision(blocks[bi], m.class_priority)
            errors += sum(count for label, count in cell.items() if label != decision)
    return {
        "resolvedCounts": per_block,
        "decisions": [block_decision(b, m.class_priority) for b in blocks],
        "errors": errors,
    }
