"""
Attribute registry and level assignment for the Compositional Privacy Risk
Taxonomy.

An attribute's level is never set directly: it is derived from the four
ordered decision questions, so extending the taxonomy stays auditable.
Registries are immutable; every "mutation" builds a new registry and
re-validates the lexicographic weight constraint.
"""
import json
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from .exceptions import (
    AllNegativeError,
    DuplicateIdError,
    EmptyInputError,
    InconsistentLevelError,
    InvalidBoundariesError,
    InvalidWeightsError,
    LengthMismatchError,
    OutOfRangeError,
)

logger = logging.getLogger(__name__)

CANONICAL_TAXONOMY_PATH = Path(__file__).resolve().parent / 'assets' / 'cprt_canonical.json'

LEVELS = (1, 2, 3, 4)


class SeverityLevel(IntEnum):
    UNIQUE_IDENTIFIERS = 1
    LINKAGE_IDENTIFIERS = 2
    AGGREGATION_IDENTIFIERS = 3
    BENIGN_CONTEXTUAL = 4

    @property
    def label(self):
        return f"L{int(self)}"


def classify_attribute(answers):
    """Level = index of the first question answered yes (Q1..Q4)."""
    answers = tuple(bool(a) for a in answers)
    if len(answers) != 4:
        raise LengthMismatchError(4, len(answers))
    for index, answer in enumerate(answers, start=1):
        if answer:
            return SeverityLevel(index)
    raise AllNegativeError(answers)


@dataclass(frozen=True)
class BoundarySet:
    """
    Lower edges b_min for levels 1..4. Level i covers [b_min(i), b_min(i-1)),
    level 1 covers [b_min(1), 1.0] with its upper end closed.
    """
    lower: tuple

    def __post_init__(self):
        lower = tuple(float(b) for b in self.lower)
        object.__setattr__(self, 'lower', lower)
        if len(lower) != 4:
            raise InvalidBoundariesError(f"Expected 4 lower edges, got {len(lower)}")
        if lower[3] != 0.0:
            raise InvalidBoundariesError(f"Level 4 must start at 0, got {lower[3]}")
        if not lower[0] < 1.0:
            raise InvalidBoundariesError(f"Level 1 lower edge must be below 1, got {lower[0]}")
        for level in (1, 2, 3):
            if not lower[level - 1] > lower[level]:
                raise InvalidBoundariesError(
                    f"b_min must strictly increase with severity: "
                    f"b_min({level})={lower[level - 1]} <= b_min({level + 1})={lower[level]}"
                )

    @classmethod
    def from_intervals(cls, intervals):
        intervals = [tuple(float(x) for x in interval) for interval in intervals]
        if len(intervals) != 4 or any(len(i) != 2 for i in intervals):
            raise InvalidBoundariesError("Boundaries must be four [low, high] intervals, level 1 first")
        if intervals[0][1] != 1.0:
            raise InvalidBoundariesError(f"Level 1 must end at 1.0, got {intervals[0][1]}")
        for level in (2, 3, 4):
            if intervals[level - 1][1] != intervals[level - 2][0]:
                raise InvalidBoundariesError(
                    f"Interval of level {level} must end where level {level - 1} starts"
                )
        return cls(tuple(low for low, _ in intervals))

    def interval(self, level):
        level = int(level)
        upper = 1.0 if level == 1 else self.lower[level - 2]
        return self.lower[level - 1], upper

    def to_intervals(self):
        return [list(self.interval(level)) for level in LEVELS]

    def bucketize(self, score):
        if not 0.0 <= score <= 1.0:
            raise OutOfRangeError(score)
        for level in (1, 2, 3):
            if score >= self.lower[level - 1]:
                return SeverityLevel(level)
        return SeverityLevel.BENIGN_CONTEXTUAL


CANONICAL_BOUNDARIES = BoundarySet((0.711, 0.514, 0.292, 0.0))


@dataclass(frozen=True)
class AttributeSpec:
    id: str
    name: str
    subcategory: str
    decision_answers: tuple
    question: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'decision_answers', tuple(bool(a) for a in self.decision_answers))
        # raises for malformed or all-negative answers
        classify_attribute(self.decision_answers)

    @property
    def level(self):
        return classify_attribute(self.decision_answers)

    @classmethod
    def from_dict(cls, data):
        spec = cls(
            id=data['id'],
            name=data.get('name', data['id']),
            subcategory=data.get('subcategory', ''),
            decision_answers=tuple(data['answers']),
            question=data.get('question', ''),
        )
        stated = data.get('level')
        if stated is not None and int(stated) != spec.level:
            raise InconsistentLevelError(spec.id, int(stated), int(spec.level))
        return spec

    def to_dict(self):
        return {
            'id': self.id,
            'name': self.name,
            'level': int(self.level),
            'subcategory': self.subcategory,
            'answers': list(self.decision_answers),
            'question': self.question,
        }


def weight_slacks(cardinalities, weights):
    """s_i = w_i - sum_{j>i} |A_j| * w_j for i = 1, 2, 3."""
    return tuple(
        weights[i] - sum(cardinalities[j] * weights[j] for j in range(i + 1, 4))
        for i in range(3)
    )


def validate_weights(cardinalities, weights):
    weights = tuple(weights)
    if len(weights) != 4:
        raise LengthMismatchError(4, len(weights))
    for level, weight in enumerate(weights, start=1):
        if int(weight) != weight or weight <= 0:
            raise InvalidWeightsError(level, weight, 0)
    for i in range(3):
        bound = sum(cardinalities[j] * weights[j] for j in range(i + 1, 4))
        if not weights[i] > bound:
            raise InvalidWeightsError(i + 1, weights[i], bound)


def minimal_valid_weights(cardinalities):
    """Smallest integer weights satisfying the lexicographic constraint, with w4 = 1."""
    if len(cardinalities) != 4:
        raise LengthMismatchError(4, len(cardinalities))
    if any(c < 0 for c in cardinalities):
        raise OutOfRangeError(min(cardinalities), 0, float('inf'))
    weights = [0, 0, 0, 1]
    for i in (2, 1, 0):
        weights[i] = sum(cardinalities[j] * weights[j] for j in range(i + 1, 4)) + 1
    return tuple(weights)


@dataclass(frozen=True)
class TaxonomyRegistry:
    attributes: tuple
    cardinalities: tuple
    weights: tuple
    boundaries: BoundarySet
    name: str = 'CPRT'
    version: str = ''
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, '_index', {spec.id: i for i, spec in enumerate(self.attributes)})

    def __len__(self):
        return len(self.attributes)

    @property
    def ids(self):
        return tuple(spec.id for spec in self.attributes)

    @property
    def levels(self):
        return tuple(int(spec.level) for spec in self.attributes)

    @property
    def slacks(self):
        return weight_slacks(self.cardinalities, self.weights)

    def __contains__(self, attribute_id):
        return attribute_id in self._index

    def index_of(self, attribute_id):
        return self._index[attribute_id]

    def attribute(self, attribute_id):
        return self.attributes[self._index[attribute_id]]

    def ids_at_level(self, level):
        return tuple(spec.id for spec in self.attributes if spec.level == level)

    def with_attribute(self, spec, weights=None):
        return build_registry(
            self.attributes + (spec,),
            weights if weights is not None else self.weights,
            self.boundaries,
            name=self.name,
            version=self.version,
        )

    def with_boundaries(self, boundaries):
        return build_registry(
            self.attributes, self.weights, boundaries, name=self.name, version=self.version
        )

    def to_dict(self):
        return {
            'name': self.name,
            'version': self.version,
            'weights': list(self.weights),
            'boundaries': self.boundaries.to_intervals(),
            'attributes': [spec.to_dict() for spec in self.attributes],
        }


def build_registry(specs, weights, boundaries, name='CPRT', version=''):
    specs = tuple(specs)
    if not specs:
        raise EmptyInputError("attribute list")
    seen = set()
    for spec in specs:
        if spec.id in seen:
            raise DuplicateIdError(spec.id)
        seen.add(spec.id)

    cardinalities = tuple(sum(1 for spec in specs if spec.level == level) for level in LEVELS)
    weights = tuple(int(w) for w in weights)
    validate_weights(cardinalities, weights)

    logger.debug(f"Built registry {name} {version}: cardinalities={cardinalities} weights={weights}")
    return TaxonomyRegistry(
        attributes=specs,
        cardinalities=cardinalities,
        weights=weights,
        boundaries=boundaries,
        name=name,
        version=version,
    )


def registry_from_dict(data):
    return build_registry(
        [AttributeSpec.from_dict(item) for item in data['attributes']],
        data['weights'],
        BoundarySet.from_intervals(data['boundaries']),
        name=data.get('name', 'CPRT'),
        version=str(data.get('version', '')),
    )


def load_registry(path=None):
    path = Path(path) if path else CANONICAL_TAXONOMY_PATH
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    registry = registry_from_dict(data)
    logger.info(f"Loaded taxonomy {registry.name} {registry.version} from {path}: {len(registry)} attributes")
    return registry


def dump_registry(registry, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(json.dumps(registry.to_dict(), indent=2, sort_keys=True))
        f.write('\n')
