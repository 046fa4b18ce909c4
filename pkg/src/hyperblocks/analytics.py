"""Evaluation harness: cross-validation, threshold rules, overlap heatmaps,
best-pair dimension reduction, and quantile histograms."""
from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, NormalizedDataset, normalize, stratified_folds
from .dtree import DecisionTree, TreeConfig, id3_train
from .hyperblock import HyperBlock, contains_batch, dominant_class, overlap_coords
from .hyperclassifier import (REFUSED, HyperModel, block_decision, classify_batch)
from .mhyper import MHyperConfig, discover


class AnalyticsError(ValueError):
    """Raised for invalid evaluation parameters."""


@dataclass
class ConfusionMatrix:
    """Actual-by-predicted counts with per-class refusals tracked separately."""
    labels: tuple[str, ...]
    counts: np.ndarray | None = None
    refused: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.labels = tuple(self.labels)
        if self.counts is None:
            self.counts = np.zeros((len(self.labels), len(self.labels)), dtype=int)
        self.counts = np.asarray(self.counts, dtype=int)
        if self.counts.shape != (len(self.labels), len(self.labels)):
            raise AnalyticsError("counts must be square over the label list")
        for label in self.labels:
            self.refused.setdefault(label, 0)

    def add(self, actual: str, predicted: str | None) -> None:
        if actual not in self.labels:
            raise AnalyticsError(f"unknown actual label {actual!r}")
        if predicted is None or predicted == REFUSED:
            self.refused[actual] += 1
            return
        if predicted not in self.labels:
            raise AnalyticsError(f"unknown predicted label {predicted!r}")
        self.counts[self.labels.index(actual), self.labels.index(predicted)] += 1

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + sum(self.refused.values())

    @property
    def accuracy(self) -> float:
        evaluated = int(self.counts.sum())
        return float(np.trace(self.counts)) / evaluated if evaluated else 0.0

    def to_json(self) -> dict:
        return {"labels": list(self.labels),
                "counts": self.counts.tolist(),
                "refused": dict(self.refused),
                "total": self.total,
                "accuracy": self.accuracy}

    def to_csv(self) -> str:
        out = io.StringIO()
        header = ["actual\\predicted", *self.labels, "refused"]
        out.write(",".join(header) + "\n")
        for i, label in enumerate(self.labels):
            row = [label, *(str(int(v)) for v in self.counts[i]), str(self.refused[label])]
            out.write(",".join(row) + "\n")
        return out.getvalue()


class HyperLearner:
    """Fits a block model per fold and classifies with fixed k and variant."""

    def __init__(self, mh_cfg: MHyperConfig | None = None, k: int = 3,
                 variant: str = "N2", class_priority: tuple[str, ...] = ()):
        self.mh_cfg = mh_cfg or MHyperConfig()
        self.k = k
        self.variant = variant
        self.class_priority = tuple(class_priority)
        self.name = f"hyper(k={k},{variant})"

    def fit(self, train: NormalizedDataset) -> tuple[HyperModel, NormalizedDataset]:
        hb = discover(train, self.mh_cfg)
        model = HyperModel(hb_model=hb, k=self.k, distance_variant=self.variant,
                           class_priority=self.class_priority, k_search_range=(self.k,))
        return model, train

    def predict_batch(self, fitted, test_values: np.ndarray) -> list[str | None]:
        model, train = fitted
        outcomes = classify_batch(test_values, model, train)
        return [None if c.outcome == REFUSED else c.outcome for c in outcomes]

    def summarize(self, fitted) -> dict:
        model, _ = fitted
        return {"blockCount": len(model.hb_model.blocks),
                "refusedCount": len(model.hb_model.refused)}


class ID3Learner:
    """Fits the from-scratch decision tree per fold."""

    def __init__(self, tree_cfg: TreeConfig | None = None):
        self.tree_cfg = tree_cfg or TreeConfig()
        self.name = "id3"

    def fit(self, train: NormalizedDataset) -> DecisionTree:
        return id3_train(train, self.tree_cfg)

    def predict_batch(self, fitted: DecisionTree, test_values: np.ndarray) -> list[str | None]:
        return [fitted.predict(row) for row in np.atleast_2d(test_values)]

    def summarize(self, fitted: DecisionTree) -> dict:
        return {"depth": fitted.depth, "branches": fitted.branch_count}


@dataclass
class FoldResult:
    index: int
    confusion: ConfusionMatrix
    summary: dict

    @property
    def accuracy(self) -> float:
        return self.confusion.accuracy

    def to_json(self) -> dict:
        return {"fold": self.index, "confusion": self.confusion.to_json(),
                "accuracy": self.accuracy, "summary": self.summary}


@dataclass
class EvaluationReport:
    """Per-fold confusions plus the summary rows reported for each learner."""
    learner: str
    folds: list[FoldResult]

    @property
    def accuracies(self) -> list[float]:
        return [f.accuracy for f in self.folds]

    @property
    def average_accuracy(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def min_accuracy(self) -> float:
        return float(np.min(self.accuracies))

    @property
    def max_accuracy(self) -> float:
        return float(np.max(self.accuracies))

    @property
    def closest_fold(self) -> int:
        """Index of the fold whose accuracy sits nearest the average."""
        avg = self.average_accuracy
        return min(range(len(self.folds)), key=lambda i: (abs(self.accuracies[i] - avg), i))

    def average_summary(self) -> dict:
        keys = sorted({k for f in self.folds for k in f.summary})
        return {k: float(np.mean([f.summary[k] for f in self.folds if k in f.summary]))
                for k in keys}

    def to_json(self) -> dict:
        return {"learner": self.learner,
                "folds": [f.to_json() for f in self.folds],
                "averageAccuracy": self.average_accuracy,
                "minAccuracy": self.min_accuracy,
                "maxAccuracy": self.max_accuracy,
                "closestFold": self.closest_fold,
                "averageSummary": self.average_summary()}


def cross_validate(d: Dataset, learner, k: int, seed: int) -> EvaluationReport:
    """k-fold stratified evaluation; folds and reports are fully deterministic.

    The dataset normalizes once up front so every fold shares one coordinate
    scale, matching how the reference workflows preprocess.
    """
    if k < 2:
        raise AnalyticsError("cross-validation needs at least 2 folds")
    nd = d if isinstance(d, NormalizedDataset) else normalize(d)
    folds = stratified_folds(d, k, seed)
    all_ids = set(nd.ids.tolist())
    results: list[FoldResult] = []
    for i, test_ids in enumerate(folds):
        train = nd.subset(sorted(all_ids - set(test_ids)))
        test = nd.subset(test_ids)
        fitted = learner.fit(train)
        preds = learner.predict_batch(fitted, test.values)
        confusion = ConfusionMatrix(labels=tuple(d.class_labels))
        for label, pred in zip(test.labels, preds):
            confusion.add(label, pred)
        results.append(FoldResult(index=i, confusion=confusion,
                                  summary=learner.summarize(fitted)))
    return EvaluationReport(learner=learner.name, folds=results)


@dataclass(frozen=True)
class ThresholdRule:
    """Conjunction of raw-unit threshold tests: all hold → then_class."""
    conjuncts: tuple[tuple[int, str, float], ...]
    then_class: str
    else_class: str

    def __post_init__(self) -> None:
        coords = [c for c, _, _ in self.conjuncts]
        if len(set(coords)) != len(coords):
            raise AnalyticsError("rule coordinates must be distinct")
        for _, comparator, _ in self.conjuncts:
            if comparator not in ("<", "<=", ">", ">="):
                raise AnalyticsError(f"unknown comparator {comparator!r}")

    def mask(self, values: np.ndarray) -> np.ndarray:
        ops = {"<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal}
        hold = np.ones(values.shape[0], dtype=bool)
        for coord, comparator, threshold in self.conjuncts:
            if coord >= values.shape[1]:
                raise AnalyticsError(f"rule coordinate {coord} outside data width")
            hold &= ops[comparator](values[:, coord], threshold)
        return hold

    def render(self, names: tuple[str, ...] | None = None) -> str:
        def name(coord: int) -> str:
            return names[coord] if names and coord < len(names) else f"x{coord + 1}"
        cond = " & ".join(f"{name(c)} {cmp} {t:g}" for c, cmp, t in self.conjuncts)
        return f"if {cond} then {self.then_class} else {self.else_class}"

    def to_json(self) -> dict:
        return {"conjuncts": [[c, cmp, t] for c, cmp, t in self.conjuncts],
                "thenClass": self.then_class, "elseClass": self.else_class}


@dataclass(frozen=True)
class RuleEvaluation:
    rule: ThresholdRule
    correct: int
    total: int
    confusion: ConfusionMatrix

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_json(self) -> dict:
        return {"rule": self.rule.to_json(), "correct": self.correct,
                "total": self.total, "accuracy": self.accuracy,
                "confusion": self.confusion.to_json()}


def evaluate_rule(rule: ThresholdRule, d: Dataset) -> RuleEvaluation:
    """Apply the conjunction on raw values and count matches."""
    hold = rule.mask(d.values)
    confusion = ConfusionMatrix(labels=tuple(d.class_labels))
    correct = 0
    for i, label in enumerate(d.labels):
        predicted = rule.then_class if hold[i] else rule.else_class
        confusion.add(label, predicted)
        correct += (predicted == label)
    return RuleEvaluation(rule=rule, correct=int(correct), total=d.size, confusion=confusion)


def _threshold_candidates(values: np.ndarray) -> list[float]:
    """Distinct values plus midpoints of consecutive distinct values."""
    distinct = np.unique(values)
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    return sorted(set(float(v) for v in distinct) | set(float(v) for v in mids))


def simple_rule_search(d: Dataset, max_dims: int) -> list[ThresholdRule]:
    """Best strict-< threshold rule per dimensionality, ranked by accuracy.

    Dimensionality 1 is exhaustive over coordinates, thresholds, and class
    orientations; higher dimensionalities extend the previous rule greedily
    with the conjunct that gains the most accuracy.
    """
    if max_dims < 1:
        raise AnalyticsError("max_dims must be at least 1")
    labels = np.asarray(d.labels)
    label_set = sorted(set(d.labels))
    if len(label_set) == 1:
        only = label_set[0]
        rule = ThresholdRule(conjuncts=(), then_class=only, else_class=only)
        return [rule]

    def score(conjuncts: tuple, then_class: str, else_class: str) -> int:
        rule = ThresholdRule(conjuncts=conjuncts, then_class=then_class,
                             else_class=else_class)
        hold = rule.mask(d.values)
        predicted = np.where(hold, then_class, else_class)
        return int((predicted == labels).sum())

    best_1d = None  # (-correct, coord, threshold, then, else)
    for coord in range(d.dimension):
        for threshold in _threshold_candidates(d.values[:, coord]):
            hold = d.values[:, coord] < threshold
            for then_class in label_set:
                for else_class in label_set:
                    if then_class == else_class:
                        continue
                    correct = int((np.where(hold, then_class, else_class) == labels).sum())
                    key = (-correct, coord, threshold, then_class, else_class)
                    if best_1d is None or key < best_1d:
                        best_1d = key
    _, coord, threshold, then_class, else_class = best_1d
    rules = [ThresholdRule(conjuncts=((coord, "<", threshold),),
                           then_class=then_class, else_class=else_class)]

    while len(rules) < max_dims:
        current = rules[-1]
        used = {c for c, _, _ in current.conjuncts}
        if len(used) == d.dimension:
            break
        best_ext = None  # (-correct, coord, threshold)
        for coord in range(d.dimension):
            if coord in used:
                continue
            for threshold in _threshold_candidates(d.values[:, coord]):
                conjuncts = current.conjuncts + ((coord, "<", threshold),)
                correct = score(conjuncts, current.then_class, current.else_class)
                key = (-correct, coord, threshold)
                if best_ext is None or key < best_ext:
                    best_ext = key
        _, coord, threshold = best_ext
        rules.append(ThresholdRule(conjuncts=current.conjuncts + ((coord, "<", threshold),),
                                   then_class=current.then_class,
                                   else_class=current.else_class))
    evaluated = [(evaluate_rule(r, d).correct, -len(r.conjuncts), r) for r in rules]
    evaluated.sort(key=lambda t: (-t[0], t[1]))
    return [r for _, _, r in evaluated]


@dataclass(frozen=True)
class HeatmapReport:
    """Per-coordinate counts of block pairs disjoint in that coordinate."""
    counts: tuple[int, ...]
    total_pairs: int

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.counts))

    def to_json(self) -> dict:
        return {"counts": list(self.counts), "totalPairs": self.total_pairs,
                "argmax": self.argmax}


def nonoverlap_heatmap(blocks: list[HyperBlock]) -> HeatmapReport:
    """Count, per coordinate, the unordered block pairs with disjoint intervals."""
    if len(blocks) < 2:
        raise AnalyticsError("heatmap needs at least 2 blocks")
    n = blocks[0].dimension
    counts = [0] * n
    pairs = 0
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            pairs += 1
            overlapping = overlap_coords(blocks[i], blocks[j])
            for coord in range(n):
                if coord not in overlapping:
                    counts[coord] += 1
    return HeatmapReport(counts=tuple(counts), total_pairs=pairs)


@dataclass(frozen=True)
class PairResult:
    """Outcome of the largest-opposing-pair reduction and its interval rule."""
    separable: bool
    classes: tuple[str, str] = ("", "")
    block_indices: tuple[int, int] = (-1, -1)
    member_counts: tuple[int, int] = (0, 0)
    reduced_dims: tuple[int, ...] = ()
    rule_text: str = ""
    correct: int = 0
    total: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_json(self) -> dict:
        return {"separable": self.separable, "classes": list(self.classes),
                "blockIndices": list(self.block_indices),
                "memberCounts": list(self.member_counts),
                "reducedDims": list(self.reduced_dims), "ruleText": self.rule_text,
                "correct": self.correct, "total": self.total, "accuracy": self.accuracy}


def best_pair_search(blocks: list[HyperBlock], d: NormalizedDataset,
                     class_priority: tuple[str, ...] = ()) -> PairResult:
    """Reduce the largest block of each class to their disjoint coordinates.

    Points inside one block's reduced intervals take its class; points in
    neither take the class of the nearest interval set (per-coordinate gap,
    Euclidean).  Accuracy is scored over all of d.
    """
    largest: dict[str, tuple[int, HyperBlock]] = {}
    for i, b in enumerate(blocks):
        decision = block_decision(b, class_priority)
        if decision is None:
            continue
        if decision not in largest or b.member_count > largest[decision][1].member_count:
            largest[decision] = (i, b)
    if len(largest) < 2:
        raise AnalyticsError("pair search needs blocks from at least 2 classes")
    ranked = sorted(largest.items(), key=lambda kv: (-kv[1][1].member_count, kv[0]))
    (class_a, (idx_a, block_a)), (class_b, (idx_b, block_b)) = ranked[:2]

    disjoint = tuple(sorted(set(range(block_a.dimension))
                            - overlap_coords(block_a, block_b)))
    if not disjoint:
        return PairResult(separable=False, classes=(class_a, class_b),
                          block_indices=(idx_a, idx_b),
                          member_counts=(block_a.member_count, block_b.member_count),
                          total=d.size)

    dims = list(disjoint)

    def gap(block: HyperBlock) -> np.ndarray:
        lo, hi = block.bounds[dims, 0], block.bounds[dims, 1]
        outside = np.maximum(np.maximum(lo - d.values[:, dims], d.values[:, dims] - hi), 0.0)
        return np.sqrt((outside ** 2).sum(axis=1))

    gap_a, gap_b = gap(block_a), gap(block_b)
    ranked_priority = [c for c in class_priority if c in (class_a, class_b)]
    tie_class = ranked_priority[0] if ranked_priority else min(class_a, class_b)
    predicted = np.where(gap_a < gap_b, class_a,
                         np.where(gap_b < gap_a, class_b, tie_class))
    correct = int((predicted == np.asarray(d.labels)).sum())

    names = tuple(d.coordinate_names)
    spans = []
    for coord in dims:
        lo_a, hi_a = d.denormalize(block_a.bounds.T).T[coord]
        spans.append(f"{names[coord]} in [{lo_a:g}, {hi_a:g}] -> {class_a}")
    rule_text = "; ".join(spans) + f"; otherwise nearest intervals ({class_a} vs {class_b})"
    return PairResult(separable=True, classes=(class_a, class_b),
                      block_indices=(idx_a, idx_b),
                      member_counts=(block_a.member_count, block_b.member_count),
                      reduced_dims=disjoint, rule_text=rule_text,
                      correct=correct, total=d.size)


@dataclass(frozen=True)
class QuantileReport:
    """Equal-count bins over one coordinate of a block's members."""
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    value_frequencies: tuple[tuple[float, int], ...]
    mean: float

    def to_json(self) -> dict:
        return {"edges": list(self.edges), "counts": list(self.counts),
                "valueFrequencies": [[v, c] for v, c in self.value_frequencies],
                "mean": self.mean}


def quantile_histogram(hb: HyperBlock, d: NormalizedDataset, coordinate: int,
                       q: int) -> QuantileReport:
    """Split the member values of one coordinate into q equal-count bins.

    Bin boundaries land midway between adjacent sort-order parts; boundaries
    that collide (ties or all-equal values) merge into one wider bin.
    """
    if q < 1:
        raise AnalyticsError("q must be at least 1")
    if hb.member_count == 0:
        raise AnalyticsError("quantiles of an empty block are undefined")
    if not 0 <= coordinate < hb.dimension:
        raise AnalyticsError(f"coordinate {coordinate} outside dimension {hb.dimension}")
    pos = {int(pid): row for row, pid in enumerate(d.ids.tolist())}
    rows = [pos[int(pid)] for pid in hb.member_ids if int(pid) in pos]
    values = np.sort(d.values[rows, coordinate])
    parts = [p for p in np.array_split(values, q) if p.size]

    edges = [float(values[0])]
    for left, right in zip(parts[:-1], parts[1:]):
        edges.append(float((left[-1] + right[0]) / 2.0))
    edges.append(float(values[-1]))
    counts = [int(part.size) for part in parts]
    # Ties can make adjacent boundaries coincide; merge such bins into their
    # left neighbor so edges stay non-decreasing and counts stay positive.
    merged_edges = [edges[0]]
    merged_counts: list[int] = []
    for i, count in enumerate(counts):
        hi = edges[i + 1]
        if merged_counts and hi <= merged_edges[-1]:
            merged_counts[-1] += count
        else:
            merged_edges.append(hi)
            merged_counts.append(count)
    frequencies = tuple(sorted((float(v), int(c)) for v, c in Counter(values.tolist()).items()))
    return QuantileReport(edges=tuple(merged_edges), counts=tuple(merged_counts),
                          value_frequencies=frequencies, mean=float(values.mean()))
