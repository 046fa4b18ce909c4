"""Linguistic summaries: where along each coordinate the data concentrates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

THIRDS = ("lower", "middle", "upper")
SPREAD = "spread"
DEFAULT_THRESHOLD = 0.75


class LinguisticError(ValueError):
    """Raised for empty inputs or out-of-range thresholds."""


@dataclass(frozen=True)
class CoordinateSummary:
    """One coordinate's assigned third (or spread) with its concentration."""
    name: str
    third: str
    concentration: float


@dataclass(frozen=True)
class LinguisticDescription:
    """Per-coordinate thirds, coordinates grouped by shared third, sentences."""
    subject: str
    entries: tuple[CoordinateSummary, ...]
    groups: tuple[tuple[str, tuple[str, ...]], ...]
    sentences: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "entries": [{"coordinate": e.name, "third": e.third,
                         "concentration": e.concentration} for e in self.entries],
            "groups": {third: list(names) for third, names in self.groups},
            "sentences": list(self.sentences),
        }


def third_fractions(values: np.ndarray) -> tuple[float, float, float]:
    """Fractions of values in [0, 1/3), [1/3, 2/3), [2/3, 1]; they sum to 1."""
    values = np.asarray(values, dtype=float)
    lower = np.count_nonzero(values < 1.0 / 3.0)
    middle = np.count_nonzero((values >= 1.0 / 3.0) & (values < 2.0 / 3.0))
    upper = values.size - lower - middle
    return (lower / values.size, middle / values.size, upper / values.size)


def describe(points: np.ndarray, coordinate_names: list[str],
             threshold: float = DEFAULT_THRESHOLD,
             subject: str = "the data") -> LinguisticDescription:
    """Assign each coordinate the third holding at least ``threshold`` of its
    values (else "spread"), group coordinates sharing a third, and render one
    sentence per group and per spread coordinate."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.size == 0:
        raise LinguisticError("cannot describe an empty point set")
    if not 0.5 < threshold <= 1.0:
        raise LinguisticError("threshold must lie in (0.5, 1]")
    if points.shape[1] != len(coordinate_names):
        raise LinguisticError("coordinate_names must match point width")

    entries: list[CoordinateSummary] = []
    for coord, name in enumerate(coordinate_names):
        fractions = third_fractions(points[:, coord])
        peak = int(np.argmax(fractions))
        if fractions[peak] >= threshold:
            entries.append(CoordinateSummary(name, THIRDS[peak], fractions[peak]))
        else:
            entries.append(CoordinateSummary(name, SPREAD, fractions[peak]))

    groups: list[tuple[str, tuple[str, ...]]] = []
    for third in THIRDS:
        names = tuple(e.name for e in entries if e.third == third)
        if names:
            groups.append((third, names))
    spread_names = tuple(e.name for e in entries if e.third == SPREAD)

    sentences: list[str] = []
    for third, names in groups:
        if len(names) == 1:
            sentences.append(f"Coordinate {names[0]} is concentrated in the {third} third.")
        else:
            listed = ", ".join(names)
            sentences.append(f"Coordinates {listed} are concentrated in the {third} third.")
    for name in spread_names:
        sentences.append(f"Coordinate {name} is spread across thirds.")
    if spread_names:
        groups.append((SPREAD, spread_names))

    return LinguisticDescription(subject=subject, entries=tuple(entries),
                                 groups=tuple(groups), sentences=tuple(sentences))
