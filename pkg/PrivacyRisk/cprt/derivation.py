"""
Data-driven re-derivation of the level boundary intervals.

Multi-hot attribute vectors are embedded with a learned attribute matrix E
(normalize(x^T E)), trained with an ordinal triplet loss whose margin grows
with the level gap. An inverse-distance-weighted severity field over the
embedded samples then yields per-level lower thresholds.
"""
import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import torch
from scipy.spatial.distance import cdist
from sklearn.decomposition import PCA
from torch import nn
from torch.nn import functional as F

from .exceptions import (
    DegenerateDatasetError,
    EmptyInputError,
    EmptyReferencesError,
    LengthMismatchError,
    MissingLevelError,
    NonMonotoneThresholdsError,
    OutOfRangeError,
    ZeroVectorError,
)
from .scoring import counts_from_vector, determined_level
from .taxonomy import LEVELS, BoundarySet

logger = logging.getLogger(__name__)

PERCENTILE_METHOD = 'linear'
IDW_BLOCK_SIZE = 1024


@dataclass(frozen=True)
class EmbeddingConfig:
    dim: int = 16
    base_margin: float = 0.10
    ordinal_scale: float = 0.12
    epochs: int = 30
    learning_rate: float = 1e-3
    batch_size: int = 64
    weight_decay: float = 0.01
    init_scale: float = 0.1
    seed: int = 42
    # None samples one triplet per training vector each epoch
    triplets_per_epoch: Optional[int] = None

    def __post_init__(self):
        for name in ('dim', 'epochs', 'batch_size'):
            value = getattr(self, name)
            if int(value) != value or value <= 0:
                raise OutOfRangeError(value, 1, float('inf'))
        for name in ('base_margin', 'ordinal_scale', 'learning_rate', 'init_scale'):
            if getattr(self, name) <= 0:
                raise OutOfRangeError(getattr(self, name), 0, float('inf'))
        if self.weight_decay < 0:
            raise OutOfRangeError(self.weight_decay, 0, float('inf'))
        if self.triplets_per_epoch is not None and self.triplets_per_epoch <= 0:
            raise OutOfRangeError(self.triplets_per_epoch, 1, float('inf'))

    @classmethod
    def from_dict(cls, data, **overrides):
        known = {k: v for k, v in dict(data or {}).items() if k in cls.__dataclass_fields__}
        known.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**known)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EmbeddingModel:
    matrix: np.ndarray
    config: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    losses: tuple = ()

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != self.config.dim:
            raise LengthMismatchError(self.config.dim, matrix.shape[-1] if matrix.ndim else 0)
        object.__setattr__(self, 'matrix', matrix)

    @property
    def num_attributes(self):
        return self.matrix.shape[0]

    @property
    def dim(self):
        return self.matrix.shape[1]


@dataclass(frozen=True)
class EmbeddedSample:
    z: np.ndarray
    max_level: int

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.float64)
        if abs(np.linalg.norm(z) - 1.0) > 1e-9:
            raise OutOfRangeError(float(np.linalg.norm(z)), 1.0, 1.0)
        if int(self.max_level) not in LEVELS:
            raise OutOfRangeError(self.max_level, 1, 4)
        object.__setattr__(self, 'z', z)
        object.__setattr__(self, 'max_level', int(self.max_level))


class AttributeEmbedding(nn.Module):
    """f(x) = normalize(x^T E) over multi-hot attribute vectors."""

    def __init__(self, num_attributes, config, generator=None):
        super().__init__()
        self.weight = nn.Parameter(
            torch.randn(num_attributes, config.dim, generator=generator, dtype=torch.float64) * config.init_scale
        )

    def forward(self, x):
        return F.normalize(x @ self.weight, dim=-1)


class OrdinalTripletLoss(nn.Module):
    """
    max(0, d(a, p) - d(a, n) + m0 + beta * |m_a - m_n|) with cosine distance
    d(u, v) = 1 - cos(u, v). Returns per-triplet losses; callers reduce.
    """

    def __init__(self, base_margin=0.10, ordinal_scale=0.12):
        super().__init__()
        self.base_margin = base_margin
        self.ordinal_scale = ordinal_scale

    def forward(self, za, zp, zn, gap):
        d_ap = 1.0 - F.cosine_similarity(za, zp, dim=-1)
        d_an = 1.0 - F.cosine_similarity(za, zn, dim=-1)
        return torch.clamp(d_ap - d_an + self.base_margin + self.ordinal_scale * gap, min=0.0)


def _as_unit_tensor(z):
    return torch.as_tensor(np.asarray(z, dtype=np.float64), dtype=torch.float64)


def triplet_loss(za, zp, zn, ma, mn, base_margin=0.10, ordinal_scale=0.12):
    gap = torch.tensor(float(abs(int(ma) - int(mn))), dtype=torch.float64)
    loss = OrdinalTripletLoss(base_margin, ordinal_scale)(
        _as_unit_tensor(za), _as_unit_tensor(zp), _as_unit_tensor(zn), gap
    )
    return float(loss)


def embed(x, model):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.num_attributes,):
        raise LengthMismatchError(model.num_attributes, x.size)
    projected = x @ model.matrix
    norm = np.linalg.norm(projected)
    if not x.any() or norm == 0.0:
        raise ZeroVectorError()
    return projected / norm


def embed_many(vectors, model):
    X = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if X.shape[1] != model.num_attributes:
        raise LengthMismatchError(model.num_attributes, X.shape[1])
    projected = X @ model.matrix
    norms = np.linalg.norm(projected, axis=1)
    if not X.any(axis=1).all() or (norms == 0.0).any():
        raise ZeroVectorError()
    return projected / norms[:, None]


def max_levels(vectors, registry):
    """
    Supervision signal m(x): the determined level of each vector. All-zero
    vectors carry no severity and are dropped.
    """
    kept, levels = [], []
    skipped = 0
    for vector in vectors:
        level = determined_level(counts_from_vector(vector, registry))
        if level is None:
            skipped += 1
            continue
        kept.append(list(vector))
        levels.append(int(level))
    if skipped:
        logger.warning(f"Skipped {skipped} all-zero attribute vector(s) with no max level")
    return np.asarray(kept, dtype=np.float64).reshape(-1, len(registry)), np.asarray(levels, dtype=np.int64), skipped


def _sample_triplets(levels, count, rng):
    anchors = rng.integers(0, len(levels), size=count)
    positives = np.empty(count, dtype=np.int64)
    negatives = np.empty(count, dtype=np.int64)
    anchor_levels = levels[anchors]
    for level in np.unique(levels):
        mask = anchor_levels == level
        k = int(mask.sum())
        if not k:
            continue
        positives[mask] = rng.choice(np.flatnonzero(levels == level), size=k)
        negatives[mask] = rng.choice(np.flatnonzero(levels != level), size=k)
    return anchors, positives, negatives


def train_embeddings(vectors, levels, config=None):
    config = config or EmbeddingConfig()
    X = np.asarray(vectors, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.int64)
    if X.ndim != 2 or len(X) == 0:
        raise EmptyInputError("training samples")
    if len(levels) != len(X):
        raise LengthMismatchError(len(X), len(levels))
    if not X.any(axis=1).all():
        raise ZeroVectorError()
    distinct = np.unique(levels)
    if len(distinct) < 2:
        raise DegenerateDatasetError(distinct.tolist())

    generator = torch.Generator().manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)
    module = AttributeEmbedding(X.shape[1], config, generator=generator)
    criterion = OrdinalTripletLoss(config.base_margin, config.ordinal_scale)
    optimizer = torch.optim.AdamW(module.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay)

    X_t = torch.from_numpy(X)
    levels_t = torch.from_numpy(levels)
    count = config.triplets_per_epoch or len(X)
    losses = []

    logger.info(
        f"Training embeddings on {len(X)} samples, levels {distinct.tolist()}, "
        f"{config.epochs} epochs x {count} triplets"
    )
    for epoch in range(config.epochs):
        anchors, positives, negatives = (torch.from_numpy(a) for a in _sample_triplets(levels, count, rng))
        total = 0.0
        for start in range(0, count, config.batch_size):
            a = anchors[start:start + config.batch_size]
            p = positives[start:start + config.batch_size]
            n = negatives[start:start + config.batch_size]
            gap = (levels_t[a] - levels_t[n]).abs().to(torch.float64)

            loss = criterion(module(X_t[a]), module(X_t[p]), module(X_t[n]), gap).mean()
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item() * len(a)

        losses.append(total / count)
        logger.debug(f"Epoch {epoch + 1}/{config.epochs}: mean triplet loss {losses[-1]:.6f}")

    if losses[-1] > losses[0]:
        logger.warning(f"Triplet loss did not decrease: first epoch {losses[0]:.6f}, last {losses[-1]:.6f}")
    logger.info(f"Finished training: mean triplet loss {losses[0]:.6f} -> {losses[-1]:.6f}")

    return EmbeddingModel(module.weight.detach().numpy().copy(), config, tuple(losses))


def embed_samples(vectors, levels, model):
    Z = embed_many(vectors, model)
    return [EmbeddedSample(z, m) for z, m in zip(Z, levels)]


def _stack(refs):
    refs = list(refs)
    if not refs:
        raise EmptyReferencesError()
    return np.stack([r.z for r in refs]), np.asarray([r.max_level for r in refs], dtype=np.float64)


def idw_score(z, refs, eps=1e-8, exclude_self=False):
    """
    Weighted mean of reference levels with w_j = 1 / (||z - z_j||^2 + eps).
    exclude_self drops the first reference located exactly at z.
    """
    Z, m = _stack(refs)
    z = np.asarray(z, dtype=np.float64)
    d2 = cdist(z[None, :], Z, 'sqeuclidean')[0]
    if exclude_self:
        own = np.flatnonzero(np.all(Z == z, axis=1))
        if own.size:
            d2 = np.delete(d2, own[0])
            m = np.delete(m, own[0])
    if not m.size:
        raise EmptyReferencesError()
    weights = 1.0 / (d2 + eps)
    return float(np.dot(weights, m) / weights.sum())


def idw_scores(queries, refs, eps=1e-8, exclude_self=False):
    """
    Batched idw_score. With exclude_self the queries are the refs themselves
    and each sample's own weight is zeroed (leave-one-out).
    """
    Z, m = _stack(refs)
    Q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if exclude_self:
        if Q.shape != Z.shape:
            raise LengthMismatchError(len(Z), len(Q))
        if len(Z) < 2:
            raise EmptyReferencesError()

    scores = np.empty(len(Q), dtype=np.float64)
    for start in range(0, len(Q), IDW_BLOCK_SIZE):
        block = Q[start:start + IDW_BLOCK_SIZE]
        weights = 1.0 / (cdist(block, Z, 'sqeuclidean') + eps)
        if exclude_self:
            rows = np.arange(len(block))
            weights[rows, start + rows] = 0.0
        scores[start:start + len(block)] = weights @ m / weights.sum(axis=1)
    return scores


def severity_to_unit(s):
    """t(s) = (4 - s) / 3: level 1 maps to 1.0, level 4 to 0.0."""
    return (4.0 - np.asarray(s, dtype=np.float64)) / 3.0


def level_thresholds(refs, percentile=5.0, eps=1e-8):
    refs = list(refs)
    Z, m = _stack(refs)
    for level in LEVELS:
        if not (m == level).any():
            raise MissingLevelError(level)
    t = severity_to_unit(idw_scores(Z, refs, eps=eps, exclude_self=True))
    return tuple(float(np.percentile(t[m == level], percentile, method=PERCENTILE_METHOD)) for level in LEVELS)


def boundaries_from_thresholds(thresholds, min_width=0.01):
    lower = list(thresholds)
    lower[3] = 0.0
    lower[0] = min(lower[0], 1.0 - min_width)
    for i in range(3):
        if not lower[i] > lower[i + 1]:
            raise NonMonotoneThresholdsError(tuple(thresholds))
    return BoundarySet(tuple(lower))


def extract_boundaries(refs, percentile=5.0, eps=1e-8, min_width=0.01):
    return boundaries_from_thresholds(level_thresholds(refs, percentile, eps), min_width)


@dataclass
class BoundaryDerivation:
    boundaries: BoundarySet
    model: EmbeddingModel
    refs: list
    thresholds: tuple
    metadata: dict

    def to_dict(self):
        return {'boundaries': self.boundaries.to_intervals(), 'metadata': self.metadata}


def derive_boundaries(vectors, registry, config=None, percentile=5.0, eps=1e-8, min_width=0.01):
    config = config or EmbeddingConfig()
    X, levels, skipped = max_levels(vectors, registry)
    if not len(X):
        raise EmptyInputError("non-zero attribute vectors")

    model = train_embeddings(X, levels, config)
    refs = embed_samples(X, levels, model)
    thresholds = level_thresholds(refs, percentile, eps)
    boundaries = boundaries_from_thresholds(thresholds, min_width)

    metadata = {
        'seed': config.seed,
        'hyperparams': config.to_dict(),
        'percentile': percentile,
        'percentile_method': PERCENTILE_METHOD,
        'eps': eps,
        'min_width': min_width,
        'normalization': 't(s) = (4 - s) / 3',
        'leave_one_out': True,
        'raw_thresholds': list(thresholds),
        'sample_counts': {f"L{level}": int((levels == level).sum()) for level in LEVELS},
        'skipped_zero_vectors': skipped,
        'epoch_losses': list(model.losses),
        'taxonomy': f"{registry.name} {registry.version}".strip(),
    }
    logger.info(f"Derived boundaries {boundaries.to_intervals()} from {len(X)} samples")
    return BoundaryDerivation(boundaries, model, refs, thresholds, metadata)


def write_boundary_file(boundaries, path, metadata=None):
    payload = {'boundaries': boundaries.to_intervals(), 'metadata': metadata or {}}
    with open(path, 'w', encoding='utf-8') as f:
        f.write(json.dumps(payload, indent=2, sort_keys=True))
        f.write('\n')
    logger.info(f"Wrote boundaries to {path}")


def load_boundary_file(path):
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    return BoundarySet.from_intervals(data['boundaries'] if isinstance(data, dict) else data)


def save_checkpoint(model, path):
    payload = {
        'hyperparams': model.config.to_dict(),
        'losses': list(model.losses),
        'matrix': model.matrix.tolist(),
    }
    with open(path, 'w', encoding='utf-8') as f:
        f.write(json.dumps(payload, sort_keys=True))
        f.write('\n')
    logger.info(f"Saved embedding checkpoint ({model.num_attributes}x{model.dim}) to {path}")


def load_checkpoint(path):
    with open(path, 'r', encoding='utf-8') as f:
        data = json.load(f)
    return EmbeddingModel(
        np.asarray(data['matrix'], dtype=np.float64),
        EmbeddingConfig.from_dict(data.get('hyperparams')),
        tuple(data.get('losses', ())),
    )


def write_projection_csv(refs, path):
    """2-component PCA of the embedded samples, one row per sample."""
    Z, m = _stack(refs)
    projected = PCA(n_components=2, svd_solver='full').fit_transform(Z)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['index', 'max_level', 'pc1', 'pc2'])
        for i, (level, (x, y)) in enumerate(zip(m, projected)):
            writer.writerow([i, int(level), repr(float(x)), repr(float(y))])
    logger.info(f"Wrote {len(Z)} projected samples to {path}")
