"""Synthetic desk-scale catalogs with category-structured unit embeddings.

Real CNN embeddings cluster by garment category; to reproduce that at desk
scale each category gets a random unit centroid and every item's vector is a
normalized blend of its centroid and per-item noise. ``category_signal=0``
gives fully unstructured random unit vectors.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import EmbeddingTable, Gender, compose_item_filename
from .errors import ConfigError
from .taxonomy import default_taxonomy


@dataclass(frozen=True)
class SyntheticConfig:
    n_items: int = 240
    dim: int = 64
    seed: int = 42
    category_signal: float = 0.75
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_items < 1:
            raise ConfigError("n_items must be >= 1")
        if self.dim < 2:
            raise ConfigError("dim must be >= 2")
        if not 0.0 <= self.category_signal <= 1.0:
            raise ConfigError("category_signal must be in [0, 1]")


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def synthetic_embeddings(config: SyntheticConfig) -> EmbeddingTable:
    """Embedding table keyed by canonical filenames: genders alternate (so
    both candidate pools stay balanced), categories are drawn uniformly from
    the default taxonomy unless overridden."""
    categories = list(config.categories) or sorted(default_taxonomy().group_of)
    rng = np.random.default_rng(config.seed)
    centroids = {cat: _unit(rng.standard_normal(config.dim)) for cat in categories}

    signal = config.category_signal
    rows = {}
    for i in range(config.n_items):
        gender = Gender.MEN if i % 2 == 0 else Gender.WOMEN
        category = categories[int(rng.integers(0, len(categories)))]
        noise = _unit(rng.standard_normal(config.dim))
        vec = _unit(signal * centroids[category] + (1.0 - signal) * noise)
        name = compose_item_filename(gender, category, f"{i:07d}")
        rows[name] = vec
    return EmbeddingTable(dimension=config.dim, rows=rows)
