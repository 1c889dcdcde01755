"""Shared test utilities: hand-rolled fixtures, an independent brute-force
ranking oracle, and a cached desk-scale pipeline runner."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from trendrec.catalog import Catalog, EmbeddingTable, Gender, ItemRecord, Store, build_catalog
from trendrec.evaluate import compute_metrics
from trendrec.recommend import ScoringWeights, flatten_recommendations, recommend_all
from trendrec.simulate import SimConfig, UserProfile, normalize_popularity, simulate_histories
from trendrec.synthetic import SyntheticConfig, synthetic_embeddings
from trendrec.taxonomy import default_taxonomy


def make_catalog(item_specs, dim=2, vectors=None, store=("store_0", 10.0, 20.0)):
    """Catalog from (item_id, gender, category) triples; every item shares
    one store and defaults to the [1, 0, ...] embedding."""
    store_obj = Store(store[0], store[1], store[2])
    items, rows = {}, {}
    for item_id, gender, category in item_specs:
        items[item_id] = ItemRecord(
            item_id=item_id, gender=gender, category=category, store_id=store_obj.store_id
        )
        if vectors is not None and item_id in vectors:
            vec = np.asarray(vectors[item_id], dtype=np.float64)
        else:
            vec = np.zeros(dim)
            vec[0] = 1.0
        rows[item_id] = vec
    ordered = {iid: items[iid] for iid in sorted(items)}
    return Catalog(
        items=ordered,
        stores={store_obj.store_id: store_obj},
        embeddings=EmbeddingTable(dimension=dim, rows=rows),
    )


def hand_fixture():
    """Ten hand-scored recommendation rows across two users.

    Category sims: u1 -> 0.8 + 1.0 + 0.2 + 0.3 + 0.8, u2 -> 0.8 + 1.0 + 0.2
    + 0.1 + 0.8; total 6.0 over 10 pairs = 60.0 %.
    Gender: only the w_skirt row under u2 mismatches (9/10 = 90.0 %).
    Popularity diffs: u1 (t=0.4): .1, 0, .25, .5, .05; u2 (t=0.8): .1, .2,
    .3, .8, .65; total 2.95 over 10 -> 29.5.
    """
    from trendrec.recommend import RecommendationRow

    def row(user_id, source, candidate):
        return RecommendationRow(
            user_id=user_id,
            source_item_id=source,
            rank=1,
            candidate_item_id=candidate,
            total=0.0,
            vis_sim=0.0,
            pop_term=0.0,
            cat_sim=0.0,
        )

    catalog = make_catalog(
        [
            ("s_w", Gender.WOMEN, "Sweater"),
            ("w_cardigan", Gender.WOMEN, "Cardigan"),
            ("w_sweater", Gender.WOMEN, "Sweater"),
            ("w_skirt", Gender.WOMEN, "Skirt"),
            ("w_dress", Gender.WOMEN, "Dress"),
            ("w_blouse", Gender.WOMEN, "Blouses-Shirts"),
            ("s_m", Gender.MEN, "Denim"),
            ("m_pants", Gender.MEN, "Pants"),
            ("m_denim", Gender.MEN, "Denim"),
            ("m_coat", Gender.MEN, "Jackets-Coats"),
            ("m_shoes", Gender.MEN, "Shoes"),
        ]
    )
    users = {
        "u1": UserProfile("u1", 0.4, Gender.WOMEN),
        "u2": UserProfile("u2", 0.8, Gender.MEN),
    }
    pop_norm = {
        "w_cardigan": 0.5,
        "w_sweater": 0.4,
        "w_skirt": 0.15,
        "w_dress": 0.9,
        "w_blouse": 0.35,
        "m_pants": 0.7,
        "m_denim": 1.0,
        "m_coat": 0.5,
        "m_shoes": 0.0,
    }
    rows = [
        row("u1", "s_w", "w_cardigan"),
        row("u1", "s_w", "w_sweater"),
        row("u1", "s_w", "w_skirt"),
        row("u1", "s_w", "w_dress"),
        row("u1", "s_w", "w_blouse"),
        row("u2", "s_m", "m_pants"),
        row("u2", "s_m", "m_denim"),
        row("u2", "s_m", "m_coat"),
        row("u2", "s_m", "m_shoes"),
        row("u2", "s_m", "w_skirt"),
    ]
    return catalog, users, pop_norm, rows


HAND_FIXTURE_EXPECTED = {
    "category_similarity_pct": 60.0,
    "gender_alignment_pct": 90.0,
    "popularity_mae": 29.5,
}


# --- independent brute-force ranking oracle ---------------------------------


@dataclass
class OracleEntry:
    item_id: str
    vis: float
    pop_term: float
    cat: float
    total: float


def _oracle_cosine(a, b) -> float:
    dot = 0.0
    sq_a = 0.0
    sq_b = 0.0
    for x, y in zip(a, b):
        dot += float(x) * float(y)
        sq_a += float(x) * float(x)
        sq_b += float(y) * float(y)
    norm_a = math.sqrt(sq_a)
    norm_b = math.sqrt(sq_b)
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot / (norm_a * norm_b)))


def _oracle_cat_sim(taxonomy, cat_a, cat_b) -> float:
    if cat_a == cat_b:
        return 1.0
    group_a = group_b = None
    for group, cats in taxonomy.groups.items():
        if cat_a in cats:
            group_a = group
        if cat_b in cats:
            group_b = group
    if group_a is None or group_b is None:
        return taxonomy.default_cross_group
    if group_a == group_b:
        return 0.8
    if group_b in taxonomy.group_similarity.get(group_a, {}):
        return taxonomy.group_similarity[group_a][group_b]
    if group_a in taxonomy.group_similarity.get(group_b, {}):
        return taxonomy.group_similarity[group_b][group_a]
    return taxonomy.default_cross_group


def brute_force_topk(catalog, taxonomy, pop_norm, user, purchased, source_item, weights, k):
    """Score every candidate from scratch and sort with the engine's
    tie-break (descending total, ascending item id)."""
    source = catalog.items[source_item]
    source_vec = catalog.embeddings.rows[source_item]
    entries = []
    for item_id in sorted(catalog.items):
        record = catalog.items[item_id]
        if record.gender is not user.gender or item_id in purchased:
            continue
        vis = _oracle_cosine(source_vec, catalog.embeddings.rows[item_id])
        pop_term = 1.0 - (pop_norm[item_id] - user.trendiness) ** weights.gamma
        cat = _oracle_cat_sim(taxonomy, source.category, record.category)
        total = weights.w_v * vis + weights.w_p * pop_term + weights.w_c * cat
        entries.append(OracleEntry(item_id, vis, pop_term, cat, total))
    entries.sort(key=lambda e: (-e.total, e.item_id))
    return entries[:k]


# --- desk-scale pipeline -----------------------------------------------------


@dataclass(frozen=True)
class DeskRun:
    catalog: Catalog
    users: tuple
    events: tuple
    popularity: tuple  # (item_id, value) pairs, hashable for caching
    results: dict
    rows: tuple

    @property
    def pop_table(self) -> dict:
        return dict(self.popularity)

    @property
    def pop_norm(self) -> dict:
        return normalize_popularity(self.pop_table)

    @property
    def users_by_id(self) -> dict:
        return {u.user_id: u for u in self.users}

    def metrics(self):
        return compute_metrics(
            list(self.rows), self.catalog, default_taxonomy(), self.pop_norm, self.users_by_id
        )


@functools.lru_cache(maxsize=64)
def desk_run(
    seed: int,
    n_items: int = 240,
    dim: int = 32,
    init_range: tuple = (0.0, 1.0),
    k: int = 5,
    n_users: int = 50,
    max_purchases: int = 5,
    weights: ScoringWeights = ScoringWeights(),
) -> DeskRun:
    """Default desk-scale pipeline, all in memory: synthetic catalog ->
    simulate -> recommend -> flat rows."""
    table = synthetic_embeddings(SyntheticConfig(n_items=n_items, dim=dim, seed=seed))
    catalog = build_catalog(table, n_stores=5, seed=seed)
    config = SimConfig(
        n_users=n_users,
        max_purchases_per_user=max_purchases,
        seed=seed,
        init_popularity_range=init_range,
    )
    users, events, popularity = simulate_histories(catalog, config)
    results = recommend_all(
        catalog, default_taxonomy(), users, events, popularity, weights, k
    )
    rows = flatten_recommendations(results)
    return DeskRun(
        catalog=catalog,
        users=tuple(users),
        events=tuple(events),
        popularity=tuple(sorted(popularity.items())),
        results=results,
        rows=tuple(rows),
    )
