"""
Settings-backed defaults for the domain modules.
"""
import logging

from django.conf import settings
from django.core.cache import cache

from .derivation import EmbeddingConfig, load_boundary_file
from .taxonomy import CANONICAL_TAXONOMY_PATH, load_registry

logger = logging.getLogger(__name__)


def taxonomy_path(path=None):
    return str(path or getattr(settings, 'CPRT_TAXONOMY_PATH', None) or CANONICAL_TAXONOMY_PATH)


def boundary_path(path=None):
    return path or getattr(settings, 'CPRT_BOUNDARY_PATH', None) or None


def boundary_source(path=None):
    return str(boundary_path(path) or 'canonical')


def get_registry(path=None, boundaries=None, cached=True):
    """
    Registry for the given (or configured) taxonomy file, with boundaries
    overridden by a derived boundary file when one is given or configured.
    Command-line runs pass cached=False and never touch the cache backend.
    """
    path = taxonomy_path(path)
    boundaries = boundary_path(boundaries)
    cache_key = f"registry_{path}_{boundaries or 'canonical'}"

    registry = cache.get(cache_key) if cached else None
    if registry is not None:
        return registry

    registry = load_registry(path)
    if boundaries:
        registry = registry.with_boundaries(load_boundary_file(boundaries))
        logger.info(f"Using derived boundaries from {boundaries}: {registry.boundaries.to_intervals()}")
    if cached:
        cache.set(cache_key, registry, timeout=settings.CPRT_REGISTRY_CACHE_TIMEOUT)
    return registry


def embedding_config(hyperparams=None, seed=None):
    merged = dict(settings.CPRT_EMBEDDING)
    merged.update(hyperparams or {})
    return EmbeddingConfig.from_dict(merged, seed=seed if seed is not None else settings.CPRT_SEED)
