"""
Continuous privacy-severity scoring.

Per-level attribute counts are turned into a lexicographic score, stretched
within the determined level, and interpolated with a square root into that
level's boundary interval.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from .exceptions import LengthMismatchError, OutOfRangeError
from .taxonomy import LEVELS, BoundarySet, SeverityLevel

logger = logging.getLogger(__name__)

__all__ = [
    'BoundarySet', 'LevelCounts', 'SeverityScore', 'PropertyReport', 'DELTA',
    'determined_level', 'lex_score', 'severity_score', 'bucketize',
    'counts_from_vector', 'counts_from_attributes', 'score_attribute_vector',
    'enumerate_combinations', 'check_properties',
]

# r_norm ceiling for levels 2-4; keeps the maximal combination strictly
# below the next level's lower edge.
DELTA = 1e-9


@dataclass(frozen=True)
class LevelCounts:
    c1: int = 0
    c2: int = 0
    c3: int = 0
    c4: int = 0

    def __post_init__(self):
        for value in self.as_tuple():
            if int(value) != value or value < 0:
                raise OutOfRangeError(value, 0, float('inf'))

    @classmethod
    def of(cls, counts):
        if isinstance(counts, LevelCounts):
            return counts
        counts = tuple(counts)
        if len(counts) != 4:
            raise LengthMismatchError(4, len(counts))
        return cls(*(int(c) for c in counts))

    def as_tuple(self):
        return (self.c1, self.c2, self.c3, self.c4)

    def __getitem__(self, level):
        return self.as_tuple()[level - 1]

    def validate(self, cardinalities):
        for level, (count, cap) in enumerate(zip(self.as_tuple(), cardinalities), start=1):
            if count > cap:
                raise OutOfRangeError(count, 0, cap)
        return self

    def increment(self, level):
        counts = list(self.as_tuple())
        counts[level - 1] += 1
        return LevelCounts(*counts)

    def is_empty(self):
        return not any(self.as_tuple())


@dataclass(frozen=True)
class SeverityScore:
    value: float
    determined_level: Optional[SeverityLevel]

    @property
    def label(self):
        return self.determined_level.label if self.determined_level else 'safe'

    def to_dict(self):
        return {
            'score': self.value,
            'level': int(self.determined_level) if self.determined_level else None,
            'label': self.label,
        }


def determined_level(counts):
    counts = LevelCounts.of(counts)
    for level in LEVELS:
        if counts[level] > 0:
            return SeverityLevel(level)
    return None


def lex_score(counts, weights):
    counts = LevelCounts.of(counts)
    level = determined_level(counts)
    if level is None:
        return 0
    return sum(counts[k] * weights[k - 1] for k in range(level, 5))


def severity_score(counts, registry):
    counts = LevelCounts.of(counts).validate(registry.cardinalities)
    level = determined_level(counts)
    if level is None:
        return SeverityScore(0.0, None)

    weights = registry.weights
    s_lex = lex_score(counts, weights)
    s_max = sum(registry.cardinalities[k - 1] * weights[k - 1] for k in range(level, 5))
    w_level = weights[level - 1]

    # (r - r_min) / (1 - r_min) with r = s_lex / s_max and r_min = w_L / s_max,
    # evaluated on integers so single-attribute and maximal cases are exact
    span = s_max - w_level
    r_norm = (s_lex - w_level) / span if span else 0.0
    if level != SeverityLevel.UNIQUE_IDENTIFIERS:
        r_norm = min(r_norm, 1.0 - DELTA)

    low, high = registry.boundaries.interval(level)
    if r_norm == 1.0:
        return SeverityScore(high, level)
    return SeverityScore(low + (high - low) * math.sqrt(r_norm), level)


def bucketize(score, boundaries):
    return boundaries.bucketize(score)


def counts_from_vector(vector, registry):
    vector = list(vector)
    if len(vector) != len(registry):
        raise LengthMismatchError(len(registry), len(vector))
    counts = [0, 0, 0, 0]
    for value, level in zip(vector, registry.levels):
        if value not in (0, 1):
            raise OutOfRangeError(value, 0, 1)
        counts[level - 1] += int(value)
    return LevelCounts(*counts)


def counts_from_attributes(attribute_ids, registry):
    present = set(attribute_ids)
    unknown = present.difference(registry.ids)
    if unknown:
        raise KeyError(f"Unknown attribute ids: {sorted(unknown)}")
    return counts_from_vector([1 if a in present else 0 for a in registry.ids], registry)


def score_attribute_vector(vector, registry):
    return severity_score(counts_from_vector(vector, registry), registry)


def enumerate_combinations(cardinalities):
    ranges = [range(cap + 1) for cap in cardinalities]
    for combo in itertools.product(*ranges):
        yield LevelCounts(*combo)


@dataclass
class PropertyReport:
    combinations: int
    containment: bool = True
    dominance: bool = True
    monotonicity: bool = True
    alignment: bool = True
    roundtrip: bool = True
    counterexample: Optional[str] = None
    checked: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all((self.containment, self.dominance, self.monotonicity, self.alignment, self.roundtrip))

    def _fail(self, prop, message):
        setattr(self, prop, False)
        if self.counterexample is None:
            self.counterexample = f"{prop}: {message}"


def check_properties(registry):
    """
    Exhaustively score every count combination the registry admits and check
    interval containment, strict cross-level dominance, within-level strict
    monotonicity, single-attribute boundary alignment and bucketize round-trip.
    """
    boundaries = registry.boundaries
    scores = {combo: severity_score(combo, registry) for combo in enumerate_combinations(registry.cardinalities)}
    report = PropertyReport(combinations=len(scores))

    extremes = {}
    for combo, score in scores.items():
        level = score.determined_level
        if level is None:
            if score.value != 0.0:
                report._fail('containment', f"empty counts scored {score.value}")
            continue

        low, high = boundaries.interval(level)
        inside = low <= score.value <= high if level == 1 else low <= score.value < high
        if not inside:
            report._fail('containment', f"{combo.as_tuple()} -> {score.value!r} outside [{low}, {high})")

        if boundaries.bucketize(score.value) != level:
            report._fail('roundtrip', f"{combo.as_tuple()} -> {score.value!r} buckets outside {level.label}")

        if sum(combo.as_tuple()) == 1 and score.value != low:
            report._fail('alignment', f"{combo.as_tuple()} -> {score.value!r} != b_min {low}")

        lowest, highest = extremes.get(level, (None, None))
        if lowest is None or score.value < scores[lowest].value:
            lowest = combo
        if highest is None or score.value > scores[highest].value:
            highest = combo
        extremes[level] = (lowest, highest)

        for k in range(level, 5):
            if combo[k] < registry.cardinalities[k - 1]:
                bigger = combo.increment(k)
                if not scores[bigger].value > score.value:
                    report._fail(
                        'monotonicity',
                        f"{bigger.as_tuple()} -> {scores[bigger].value!r} not above "
                        f"{combo.as_tuple()} -> {score.value!r}",
                    )

    for upper in LEVELS:
        for lower in LEVELS:
            if lower <= upper or upper not in extremes or lower not in extremes:
                continue
            weakest = extremes[upper][0]
            strongest = extremes[lower][1]
            if not scores[weakest].value > scores[strongest].value:
                report._fail(
                    'dominance',
                    f"L{upper} {weakest.as_tuple()} -> {scores[weakest].value!r} not above "
                    f"L{lower} {strongest.as_tuple()} -> {scores[strongest].value!r}",
                )

    report.checked = {f"L{level}": [scores[lo].value, scores[hi].value] for level, (lo, hi) in sorted(extremes.items())}
    logger.info(f"Checked {report.combinations} combinations: {'pass' if report.passed else report.counterexample}")
    return report
