"""
End-to-end evaluation and boundary-derivation runs shared by the management
commands and the job worker.
"""
import logging

from django.conf import settings

from .config import embedding_config
from .dataset_io import join_records, resolve_predictions
from .derivation import derive_boundaries
from .metrics import evaluate

logger = logging.getLogger(__name__)


def run_evaluation(ground_truth, predictions, registry, seed=None, max_pairs=None, threads=None,
                   boundary_source='canonical'):
    scores = resolve_predictions(predictions, settings.CPRT_THREADS if threads is None else threads)
    records = join_records(ground_truth, scores)
    return evaluate(
        records,
        registry.boundaries,
        seed=settings.CPRT_SEED if seed is None else seed,
        max_pairs=settings.CPRT_MAX_PAIRS if max_pairs is None else max_pairs,
        boundary_source=boundary_source,
    )


def run_boundary_derivation(vectors, registry, hyperparams=None, seed=None, percentile=None):
    return derive_boundaries(
        vectors,
        registry,
        config=embedding_config(hyperparams, seed),
        percentile=settings.CPRT_BOUNDARY_PERCENTILE if percentile is None else percentile,
        eps=settings.CPRT_IDW_EPS,
        min_width=settings.CPRT_BOUNDARY_MIN_WIDTH,
    )
