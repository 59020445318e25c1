"""
Aggregation of three-valued attribute annotations into binary ground truth,
plus inter-annotator agreement.

Labels are 0 (absent), 0.5 (ambiguous) or 1 (present). Ambiguous labels are
always binarized to 0 before merging or voting.
"""
import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from sklearn.metrics import cohen_kappa_score

from .exceptions import EmptyInputError, IdMismatchError, LengthMismatchError, OutOfRangeError

logger = logging.getLogger(__name__)

LABEL_VALUES = (0.0, 0.5, 1.0)

PAIRWISE = 'pairwise'
CONSENSUS = 'consensus'
CANDIDATE_VS_MAJORITY = 'candidate_vs_majority'


@dataclass(frozen=True)
class AnnotationRecord:
    image_id: str
    annotator_id: str
    labels: tuple
    rationale: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        labels = tuple(float(v) for v in self.labels)
        for value in labels:
            if value not in LABEL_VALUES:
                raise OutOfRangeError(value, 0, 1)
        object.__setattr__(self, 'labels', labels)

    def binarized(self):
        return tuple(binarize(v) for v in self.labels)


def binarize(label):
    return 1 if label == 1 else 0


def merge_dual(a, b):
    """1 only where both annotators answered exactly 1."""
    if a.image_id != b.image_id:
        raise IdMismatchError(a.image_id, b.image_id)
    if len(a.labels) != len(b.labels):
        raise LengthMismatchError(len(a.labels), len(b.labels))
    return tuple(1 if x == 1 and y == 1 else 0 for x, y in zip(a.labels, b.labels))


def majority_vote(labels):
    """Strict majority of 1s after binarization; ties go to 0."""
    labels = [binarize(v) for v in labels]
    if not labels:
        raise EmptyInputError("label list")
    return 1 if 2 * sum(labels) > len(labels) else 0


def majority_vector(records):
    records = list(records)
    if not records:
        raise EmptyInputError("annotation records")
    first = records[0]
    for record in records[1:]:
        if record.image_id != first.image_id:
            raise IdMismatchError(first.image_id, record.image_id)
        if len(record.labels) != len(first.labels):
            raise LengthMismatchError(len(first.labels), len(record.labels))
    return tuple(majority_vote(column) for column in zip(*(r.labels for r in records)))


def percent_agreement(a, b):
    if len(a) != len(b):
        raise LengthMismatchError(len(a), len(b))
    if not len(a):
        raise EmptyInputError("label vectors")
    return sum(1 for x, y in zip(a, b) if x == y) / len(a)


def agreed_positions(vectors):
    """1 at each position where every given vector carries the same label, else 0."""
    vectors = [tuple(v) for v in vectors]
    if not vectors or not vectors[0]:
        raise EmptyInputError("label vectors")
    width = len(vectors[0])
    for v in vectors:
        if len(v) != width:
            raise LengthMismatchError(width, len(v))
    return tuple(1 if len(set(column)) == 1 else 0 for column in zip(*vectors))


class Kappa(NamedTuple):
    value: float
    degenerate: bool = False


def cohen_kappa(a, b):
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise LengthMismatchError(len(a), len(b))
    if len(a) < 2:
        raise EmptyInputError("kappa input (need at least 2 items)")
    if len(set(a) | set(b)) == 1:
        # p_e = 1: kappa undefined
        return Kappa(0.0, True)
    return Kappa(float(cohen_kappa_score(a, b, labels=[0, 1])), False)


@dataclass
class AgreementReport:
    percent_agreement: float
    cohen_kappa: Optional[float]
    per_attribute_agreement: dict
    per_level_agreement: dict
    n_items: int
    mode: str = PAIRWISE
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'percent_agreement': self.percent_agreement,
            'cohen_kappa': self.cohen_kappa,
            'per_attribute_agreement': self.per_attribute_agreement,
            'per_level_agreement': self.per_level_agreement,
            'n_items': self.n_items,
            'mode': self.mode,
            'metadata': self.metadata,
        }


def _group_by_image(records, registry, annotators=None):
    grouped = defaultdict(dict)
    for record in records:
        if len(record.labels) != len(registry):
            raise LengthMismatchError(len(registry), len(record.labels))
        if annotators is not None and record.annotator_id not in annotators:
            continue
        grouped[record.image_id][record.annotator_id] = record.binarized()
    return grouped


def _per_attribute(matches, comparisons, registry):
    per_attribute = {aid: matches[i] / comparisons for i, aid in enumerate(registry.ids)}
    per_level = {}
    for level in sorted(set(registry.levels)):
        values = [per_attribute[aid] for aid in registry.ids_at_level(level)]
        per_level[f"L{level}"] = sum(values) / len(values)
    return per_attribute, per_level


def _pairwise_kappa(grouped, annotators):
    kappas, degenerate = {}, 0
    for first, second in itertools.combinations(annotators, 2):
        shared = sorted(img for img, by in grouped.items() if first in by and second in by)
        if not shared:
            continue
        a = [v for img in shared for v in grouped[img][first]]
        b = [v for img in shared for v in grouped[img][second]]
        kappa = cohen_kappa(a, b)
        if kappa.degenerate:
            degenerate += 1
            continue
        kappas[f"{first}|{second}"] = kappa.value
    return kappas, degenerate


def agreement_report(records, registry, mode=PAIRWISE, annotators=None):
    """
    Group agreement over every image seen by two or more annotators.

    pairwise pools exact label matches over all annotator pairs per image;
    consensus counts a position as agreed only when every annotator matches.
    Kappa is the mean of pairwise Cohen kappas over annotator pairs sharing
    images, with degenerate (single-label) pairs left out.
    """
    if mode not in (PAIRWISE, CONSENSUS):
        raise ValueError(f"Unknown agreement mode: {mode}")
    grouped = _group_by_image(records, registry, set(annotators) if annotators else None)
    images = sorted(img for img, by in grouped.items() if len(by) >= 2)
    if not images:
        raise EmptyInputError("images annotated by two or more annotators")

    width = len(registry)
    matches = [0] * width
    comparisons = 0
    for img in images:
        vectors = [grouped[img][ann] for ann in sorted(grouped[img])]
        if mode == CONSENSUS:
            groups = [vectors]
        else:
            groups = list(itertools.combinations(vectors, 2))
        for group in groups:
            comparisons += 1
            for i, agreed in enumerate(agreed_positions(group)):
                matches[i] += agreed

    per_attribute, per_level = _per_attribute(matches, comparisons, registry)
    all_annotators = sorted({ann for by in grouped.values() for ann in by})
    kappas, degenerate = _pairwise_kappa(grouped, all_annotators)
    if degenerate:
        logger.warning(f"Excluded {degenerate} annotator pair(s) with degenerate kappa")
    kappa = sum(kappas.values()) / len(kappas) if kappas else None

    report = AgreementReport(
        percent_agreement=sum(matches) / (comparisons * width),
        cohen_kappa=kappa,
        per_attribute_agreement=per_attribute,
        per_level_agreement=per_level,
        n_items=len(images),
        mode=mode,
        metadata={
            'annotators': all_annotators,
            'kappa_aggregation': 'pairwise_mean',
            'pairwise_kappa': kappas,
            'degenerate_pairs': degenerate,
            'comparisons': comparisons,
        },
    )
    logger.info(
        f"Agreement over {len(images)} images ({mode}): "
        f"{report.percent_agreement:.4f}, kappa {kappa if kappa is None else round(kappa, 4)}"
    )
    return report


def compare_to_reference(records, registry, candidate, reference):
    """
    Candidate annotator (typically a model) against the majority vote of a
    reference group on the images both have labelled.
    """
    reference = sorted(set(reference) - {candidate})
    if not reference:
        raise EmptyInputError("reference annotators")
    grouped = _group_by_image(records, registry, set(reference) | {candidate})

    cand_labels, ref_labels = [], []
    for img in sorted(grouped):
        by = grouped[img]
        refs = [by[ann] for ann in reference if ann in by]
        if candidate not in by or not refs:
            continue
        cand_labels.append(by[candidate])
        ref_labels.append(tuple(majority_vote(column) for column in zip(*refs)))
    if not cand_labels:
        raise EmptyInputError(f"images labelled by both {candidate} and the reference group")

    width = len(registry)
    matches = [sum(1 for c, r in zip(cand_labels, ref_labels) if c[i] == r[i]) for i in range(width)]
    per_attribute, per_level = _per_attribute(matches, len(cand_labels), registry)
    kappa = cohen_kappa([v for vec in ref_labels for v in vec], [v for vec in cand_labels for v in vec])
    if kappa.degenerate:
        logger.warning(f"Degenerate kappa for {candidate} against {reference}")

    n = len(cand_labels)
    prevalence_delta = {
        aid: (sum(c[i] for c in cand_labels) - sum(r[i] for r in ref_labels)) / n
        for i, aid in enumerate(registry.ids)
    }
    return AgreementReport(
        percent_agreement=sum(matches) / (n * width),
        cohen_kappa=None if kappa.degenerate else kappa.value,
        per_attribute_agreement=per_attribute,
        per_level_agreement=per_level,
        n_items=n,
        mode=CANDIDATE_VS_MAJORITY,
        metadata={
            'candidate': candidate,
            'reference': reference,
            'kappa_degenerate': kappa.degenerate,
            'prevalence_delta': prevalence_delta,
        },
    )
