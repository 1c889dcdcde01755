"""Fused relevance scoring and Top-K recommendation per purchased item.

relevance = w_v * vis_sim + w_p * (1 - (norm_pop - t)^gamma) + w_c * cat_sim

Scoring is pure over immutable inputs; candidates may be scored in any
order (or in parallel) as long as the final ordering stays deterministic:
descending total, ties broken by ascending item id.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .catalog import Catalog
from .errors import ConfigError, DimensionMismatch, UnknownItem
from .simulate import PurchaseEvent, UserProfile, normalize_popularity
from .taxonomy import CategoryTaxonomy


class ZeroVectorWarning(UserWarning):
    """Cosine similarity saw a zero-norm embedding and returned 0.0."""


@dataclass(frozen=True)
class ScoringWeights:
    w_v: float = 0.7
    w_p: float = 0.3
    w_c: float = 0.0
    gamma: int = 2

    def __post_init__(self):
        if min(self.w_v, self.w_p, self.w_c) < 0:
            raise ConfigError("weights must be non-negative")
        if self.w_v == self.w_p == self.w_c == 0:
            raise ConfigError("at least one weight must be positive")
        if self.gamma < 2 or self.gamma % 2 != 0:
            raise ConfigError(f"gamma must be a positive even integer, got {self.gamma}")


@dataclass
class RelevanceBreakdown:
    vis_sim: float
    norm_pop: float
    pop_term: float
    cat_sim: float
    total: float


@dataclass
class Recommendation:
    source_item_id: str
    candidate_item_id: str
    rank: int
    breakdown: RelevanceBreakdown
    distance_km: float | None = None


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1]. A
    zero-norm input yields 0.0 plus a :class:`ZeroVectorWarning` so one
    degenerate embedding cannot abort a batch run."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector dimensions differ: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        warnings.warn(
            "zero-norm embedding in cosine similarity, returning 0.0",
            ZeroVectorWarning,
            stacklevel=2,
        )
        return 0.0
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return max(-1.0, min(1.0, value))


def popularity_alignment(norm_pop: float, t: float, gamma: int) -> float:
    """1 - (norm_pop - t)^gamma: maximal when an item's normalized popularity
    matches the user's trendiness; the even exponent controls how sharply
    mismatches are penalized."""
    return 1.0 - (norm_pop - t) ** gamma


def relevance(
    weights: ScoringWeights,
    vis_sim: float,
    norm_pop: float,
    t: float,
    cat_sim: float,
) -> RelevanceBreakdown:
    pop_term = popularity_alignment(norm_pop, t, weights.gamma)
    total = weights.w_v * vis_sim + weights.w_p * pop_term + weights.w_c * cat_sim
    return RelevanceBreakdown(
        vis_sim=vis_sim,
        norm_pop=norm_pop,
        pop_term=pop_term,
        cat_sim=cat_sim,
        total=total,
    )


def recommend_for_purchase(
    catalog: Catalog,
    taxonomy: CategoryTaxonomy,
    pop_norm: dict[str, float],
    user: UserProfile,
    purchased: set[str],
    source_item: str,
    weights: ScoringWeights,
    k: int,
) -> list[Recommendation]:
    """Score every same-gender, not-yet-purchased candidate against one
    purchased source item and return the Top-K, ranks 1..K."""
    if k < 1:
        raise ConfigError("K must be >= 1")
    if source_item not in purchased:
        raise ValueError(f"source item {source_item!r} is not in the purchase set")
    source = catalog.item(source_item)
    if source_item not in catalog.embeddings:
        raise UnknownItem(f"source item {source_item!r} has no embedding")
    source_vec = catalog.embeddings.vector(source_item)

    scored: list[tuple[str, RelevanceBreakdown]] = []
    for cand in catalog.candidates(user.gender, exclude=purchased):
        vis = cosine_similarity(source_vec, catalog.embeddings.vector(cand.item_id))
        if cand.item_id not in pop_norm:
            raise UnknownItem(f"candidate {cand.item_id!r} missing from popularity table")
        breakdown = relevance(
            weights,
            vis_sim=vis,
            norm_pop=pop_norm[cand.item_id],
            t=user.trendiness,
            cat_sim=taxonomy.similarity(source.category, cand.category),
        )
        scored.append((cand.item_id, breakdown))

    scored.sort(key=lambda pair: (-pair[1].total, pair[0]))
    return [
        Recommendation(
            source_item_id=source_item,
            candidate_item_id=item_id,
            rank=rank,
            breakdown=breakdown,
        )
        for rank, (item_id, breakdown) in enumerate(scored[:k], start=1)
    ]


def recommend_all(
    catalog: Catalog,
    taxonomy: CategoryTaxonomy,
    users: Sequence[UserProfile],
    events: Sequence[PurchaseEvent],
    popularity: dict[str, float],
    weights: ScoringWeights,
    k: int,
) -> dict[str, dict[str, list[Recommendation]]]:
    """One Top-K list per (user, purchased item). Popularity is min-max
    normalized once over the final table before any scoring; lists for one
    user may overlap (no cross-list deduplication)."""
    pop_norm = normalize_popularity(popularity)
    purchases: dict[str, list[str]] = {}
    for event in events:
        seq = purchases.setdefault(event.user_id, [])
        if event.item_id not in seq:
            seq.append(event.item_id)

    results: dict[str, dict[str, list[Recommendation]]] = {}
    for user in users:
        sources = purchases.get(user.user_id, [])
        owned = set(sources)
        results[user.user_id] = {
            source: recommend_for_purchase(
                catalog, taxonomy, pop_norm, user, owned, source, weights, k
            )
            for source in sources
        }
    return results


# --- flat rows and the recommendations.csv format ---------------------------


@dataclass
class RecommendationRow:
    """One exported recommendation; mirrors the recommendations.csv schema."""

    user_id: str
    source_item_id: str
    rank: int
    candidate_item_id: str
    total: float
    vis_sim: float
    pop_term: float
    cat_sim: float
    distance_km: float | None = None


def flatten_recommendations(
    results: dict[str, dict[str, list[Recommendation]]]
) -> list[RecommendationRow]:
    rows = []
    for user_id, per_source in results.items():
        for source_id, recs in per_source.items():
            for rec in recs:
                rows.append(
                    RecommendationRow(
                        user_id=user_id,
                        source_item_id=source_id,
                        rank=rec.rank,
                        candidate_item_id=rec.candidate_item_id,
                        total=rec.breakdown.total,
                        vis_sim=rec.breakdown.vis_sim,
                        pop_term=rec.breakdown.pop_term,
                        cat_sim=rec.breakdown.cat_sim,
                        distance_km=rec.distance_km,
                    )
                )
    return rows


_CSV_HEADER = [
    "user_id",
    "source_item_id",
    "rank",
    "candidate_item_id",
    "total",
    "vis_sim",
    "pop_term",
    "cat_sim",
    "distance_km",
]


def write_recommendations_csv(rows: Iterable[RecommendationRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_CSV_HEADER)
        for r in rows:
            writer.writerow(
                [
                    r.user_id,
                    r.source_item_id,
                    r.rank,
                    r.candidate_item_id,
                    r.total,
                    r.vis_sim,
                    r.pop_term,
                    r.cat_sim,
                    "" if r.distance_km is None else r.distance_km,
                ]
            )


def read_recommendations_csv(path: str | Path) -> list[RecommendationRow]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                RecommendationRow(
                    user_id=row["user_id"],
                    source_item_id=row["source_item_id"],
                    rank=int(row["rank"]),
                    candidate_item_id=row["candidate_item_id"],
                    total=float(row["total"]),
                    vis_sim=float(row["vis_sim"]),
                    pop_term=float(row["pop_term"]),
                    cat_sim=float(row["cat_sim"]),
                    distance_km=float(row["distance_km"]) if row["distance_km"] else None,
                )
            )
    return rows
