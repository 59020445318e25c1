"""
Evaluation of predicted severity scores against taxonomy-derived ground truth.
"""
import itertools
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats
from sklearn.metrics import confusion_matrix as sk_confusion_matrix

from . import __version__
from .exceptions import (
    ConstantInputError,
    EmptyInputError,
    EmptyPairsError,
    LengthMismatchError,
    NoEligiblePairsError,
    OutOfRangeError,
    TiedGroundTruthError,
)
from .taxonomy import LEVELS

logger = logging.getLogger(__name__)

INTER = 'inter'
INTRA = 'intra'
SAFE_AS_LEVEL = 4


@dataclass(frozen=True)
class EvaluationRecord:
    image_id: str
    gt_score: float
    gt_level: Optional[int]
    pred_score: float

    def __post_init__(self):
        for value in (self.gt_score, self.pred_score):
            if not 0.0 <= value <= 1.0:
                raise OutOfRangeError(value)
        if self.gt_level is not None and int(self.gt_level) not in LEVELS:
            raise OutOfRangeError(self.gt_level, 1, 4)

    @property
    def level(self):
        """Ground-truth level for level-based metrics; safe images count as L4."""
        return SAFE_AS_LEVEL if self.gt_level is None else int(self.gt_level)


def _paired(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise LengthMismatchError(len(x), len(y))
    if len(x) < 2:
        raise EmptyInputError("correlation input (need at least 2 items)")
    if np.all(x == x[0]):
        raise ConstantInputError('x')
    if np.all(y == y[0]):
        raise ConstantInputError('y')
    return x, y


def pearson(x, y):
    x, y = _paired(x, y)
    return float(stats.pearsonr(x, y)[0])


def spearman(x, y):
    # scipy assigns tied values their average rank
    x, y = _paired(x, y)
    return float(stats.spearmanr(x, y)[0])


def mae_and_bias(pred, gt):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if len(pred) != len(gt):
        raise LengthMismatchError(len(gt), len(pred))
    if not len(pred):
        raise EmptyInputError("score lists")
    diff = pred - gt
    return float(np.mean(np.abs(diff))), float(np.mean(diff))


def pairwise_accuracy(pairs, pred, gt):
    """Fraction of pairs with (gt_i - gt_j) * (pred_i - pred_j) > 0."""
    pairs = list(pairs)
    if not pairs:
        raise EmptyPairsError()
    concordant = 0
    for i, j in pairs:
        gt_diff = gt[i] - gt[j]
        if gt_diff == 0:
            raise TiedGroundTruthError((i, j))
        if gt_diff * (pred[i] - pred[j]) > 0:
            concordant += 1
    return concordant / len(pairs)


def _eligible(mode, levels, scores, i, j):
    if mode == INTER:
        return levels[i] != levels[j]
    return levels[i] == levels[j] and scores[i] != scores[j]


def _count_eligible(mode, levels, scores):
    n = len(levels)
    by_level = Counter(levels)
    same_level = sum(k * (k - 1) // 2 for k in by_level.values())
    if mode == INTER:
        return n * (n - 1) // 2 - same_level
    same_score = Counter(zip(levels, scores))
    return same_level - sum(k * (k - 1) // 2 for k in same_score.values())


def _enumerate_eligible(mode, levels, scores):
    groups = defaultdict(list)
    for index, level in enumerate(levels):
        groups[level].append(index)
    pairs = []
    if mode == INTER:
        for a, b in itertools.combinations(sorted(groups), 2):
            pairs.extend((min(i, j), max(i, j)) for i in groups[a] for j in groups[b])
    else:
        for members in groups.values():
            pairs.extend((i, j) for i, j in itertools.combinations(members, 2) if scores[i] != scores[j])
    return sorted(pairs)


def curate_pairs(records, mode, max_pairs=10000, seed=42):
    """
    Eligible index pairs: inter = different gt level, intra = same gt level with
    different gt score. All of them when they fit in max_pairs, otherwise a
    seeded uniform sample without replacement. Returned sorted.
    """
    if mode not in (INTER, INTRA):
        raise ValueError(f"Unknown pair mode: {mode}")
    records = list(records)
    if max_pairs < 1:
        raise OutOfRangeError(max_pairs, 1, float('inf'))
    if len(records) < 2:
        raise NoEligiblePairsError(mode)
    levels = [r.level for r in records]
    scores = [r.gt_score for r in records]

    eligible = _count_eligible(mode, levels, scores)
    if not eligible:
        raise NoEligiblePairsError(mode)
    if eligible <= max_pairs:
        return _enumerate_eligible(mode, levels, scores)

    rng = np.random.default_rng(seed)
    n = len(records)
    chosen = set()
    while len(chosen) < max_pairs:
        draws = rng.integers(0, n, size=(2 * max_pairs, 2))
        for i, j in draws.tolist():
            if i == j:
                continue
            pair = (min(i, j), max(i, j))
            if pair in chosen or not _eligible(mode, levels, scores, *pair):
                continue
            chosen.add(pair)
            if len(chosen) == max_pairs:
                break
    logger.debug(f"Sampled {max_pairs} of {eligible} eligible {mode}-level pairs")
    return sorted(chosen)


def _require(records):
    records = list(records)
    if not records:
        raise EmptyInputError("evaluation records")
    return records


def level_accuracy(records, boundaries):
    records = _require(records)
    hits = sum(1 for r in records if boundaries.bucketize(r.pred_score) == r.level)
    return hits / len(records)


def confusion_matrix(records, boundaries):
    """Rows are ground-truth levels L1..L4, columns bucketized predictions."""
    records = _require(records)
    y_true = [r.level for r in records]
    y_pred = [int(boundaries.bucketize(r.pred_score)) for r in records]
    return sk_confusion_matrix(y_true, y_pred, labels=list(LEVELS)).astype(int).tolist()


def safe_row(records, boundaries):
    """Bucketized predictions of records whose ground truth has no attributes."""
    row = [0, 0, 0, 0]
    for r in records:
        if r.gt_level is None:
            row[int(boundaries.bucketize(r.pred_score)) - 1] += 1
    return row


def per_level(records):
    groups = defaultdict(list)
    for r in records:
        groups['safe' if r.gt_level is None else f"L{r.gt_level}"].append(r)
    stats_by_level = {}
    for key in sorted(groups):
        members = groups[key]
        mae, bias = mae_and_bias([r.pred_score for r in members], [r.gt_score for r in members])
        stats_by_level[key] = {
            'n': len(members),
            'mean_gt': float(np.mean([r.gt_score for r in members])),
            'mean_pred': float(np.mean([r.pred_score for r in members])),
            'mae': mae,
            'bias': bias,
        }
    return stats_by_level


@dataclass
class MetricsReport:
    n: int
    pearson: Optional[float]
    spearman: Optional[float]
    mae: Optional[float]
    bias: Optional[float]
    level_accuracy: Optional[float]
    inter_acc: Optional[float]
    intra_acc: Optional[float]
    confusion: list
    safe_row: list = field(default_factory=lambda: [0, 0, 0, 0])
    pair_counts: dict = field(default_factory=lambda: {INTER: 0, INTRA: 0})
    per_level: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'n': self.n,
            'pearson': self.pearson,
            'spearman': self.spearman,
            'mae': self.mae,
            'bias': self.bias,
            'level_accuracy': self.level_accuracy,
            'inter_acc': self.inter_acc,
            'intra_acc': self.intra_acc,
            'confusion': self.confusion,
            'safe_row': self.safe_row,
            'pair_counts': self.pair_counts,
            'per_level': self.per_level,
            'metadata': self.metadata,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**{name: data[name] for name in cls.__dataclass_fields__ if name in data})

    @classmethod
    def empty(cls, metadata=None):
        return cls(
            n=0, pearson=None, spearman=None, mae=None, bias=None, level_accuracy=None,
            inter_acc=None, intra_acc=None, confusion=[[0] * 4 for _ in LEVELS], metadata=metadata or {},
        )


def _correlation(fn, pred, gt):
    try:
        return fn(pred, gt)
    except (ConstantInputError, EmptyInputError) as e:
        logger.warning(f"{fn.__name__} undefined, reported as null: {e}")
        return None


def _pair_accuracy(records, mode, max_pairs, seed, pred, gt):
    try:
        pairs = curate_pairs(records, mode, max_pairs=max_pairs, seed=seed)
    except NoEligiblePairsError as e:
        logger.warning(f"{e}; {mode}-level accuracy reported as null")
        return None, 0
    return pairwise_accuracy(pairs, pred, gt), len(pairs)


def evaluate(records, boundaries, seed=42, max_pairs=10000, boundary_source='canonical'):
    """
    Full metric bundle. Records are ordered by image id first, so the result
    does not depend on input order.
    """
    records = sorted(_require(records), key=lambda r: r.image_id)
    pred = [r.pred_score for r in records]
    gt = [r.gt_score for r in records]

    mae, bias = mae_and_bias(pred, gt)
    inter_acc, inter_n = _pair_accuracy(records, INTER, max_pairs, seed, pred, gt)
    intra_acc, intra_n = _pair_accuracy(records, INTRA, max_pairs, seed, pred, gt)

    report = MetricsReport(
        n=len(records),
        pearson=_correlation(pearson, pred, gt),
        spearman=_correlation(spearman, pred, gt),
        mae=mae,
        bias=bias,
        level_accuracy=level_accuracy(records, boundaries),
        inter_acc=inter_acc,
        intra_acc=intra_acc,
        confusion=confusion_matrix(records, boundaries),
        safe_row=safe_row(records, boundaries),
        pair_counts={INTER: inter_n, INTRA: intra_n},
        per_level=per_level(records),
        metadata={
            'seed': seed,
            'max_pairs': max_pairs,
            'boundary_source': boundary_source,
            'boundaries': boundaries.to_intervals(),
            'tool_version': __version__,
            'pair_sampling': 'uniform_without_replacement',
            'spearman_ties': 'average',
            'safe_level': f"L{SAFE_AS_LEVEL}",
        },
    )
    logger.info(
        f"Evaluated {report.n} records: pearson={report.pearson} spearman={report.spearman} "
        f"mae={report.mae:.4f} level_acc={report.level_accuracy:.4f}"
    )
    return report
