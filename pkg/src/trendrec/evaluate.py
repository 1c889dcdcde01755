"""Recommendation quality metrics, the ablation study and trendiness strata.

All metrics are reported on a 0-100 scale and reduce with ``math.fsum`` so
results are independent of summation order (permutation-invariant and
reproducible under parallel evaluation).
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

from .catalog import Catalog
from .errors import EmptyInput
from .recommend import (
    RecommendationRow,
    ScoringWeights,
    flatten_recommendations,
    recommend_all,
)
from .simulate import PurchaseEvent, UserProfile, normalize_popularity
from .taxonomy import CategoryTaxonomy

ABLATION_VARIANTS = ("full", "no_pop", "no_vis")

# Trendiness strata: Low t < 0.33, Medium 0.33 <= t < 0.66, High t >= 0.66.
STRATUM_BOUNDS = (("Low", 0.0, 0.33), ("Medium", 0.33, 0.66), ("High", 0.66, 1.0))


@dataclass(frozen=True)
class MetricsReport:
    category_similarity_pct: float
    gender_alignment_pct: float
    popularity_mae: float
    n_recommendations: int

    def as_dict(self) -> dict:
        return {
            "category_similarity_pct": self.category_similarity_pct,
            "gender_alignment_pct": self.gender_alignment_pct,
            "popularity_mae": self.popularity_mae,
            "n_recommendations": self.n_recommendations,
        }


@dataclass(frozen=True)
class TrendinessStratum:
    name: str
    t_min: float
    t_max: float
    n_users: int
    report: MetricsReport


def _mean(values) -> float:
    vals = list(values)
    if not vals:
        raise EmptyInput("metric computed over zero recommendations")
    return math.fsum(vals) / len(vals)


def category_similarity_metric(
    rows: Sequence[RecommendationRow], catalog: Catalog, taxonomy: CategoryTaxonomy
) -> float:
    """100 x mean category similarity between each recommendation and the
    purchase that seeded it."""
    return 100.0 * _mean(
        taxonomy.similarity(
            catalog.item(r.source_item_id).category,
            catalog.item(r.candidate_item_id).category,
        )
        for r in rows
    )


def gender_alignment_metric(
    rows: Sequence[RecommendationRow],
    catalog: Catalog,
    users: Mapping[str, UserProfile],
) -> float:
    """100 x fraction of recommendations whose item gender matches the
    recommending user's gender."""
    return 100.0 * _mean(
        1.0 if catalog.item(r.candidate_item_id).gender is users[r.user_id].gender else 0.0
        for r in rows
    )


def popularity_mae_metric(
    rows: Sequence[RecommendationRow],
    pop_norm: Mapping[str, float],
    users: Mapping[str, UserProfile],
) -> float:
    """100 x mean |normalized candidate popularity - user trendiness|."""
    return 100.0 * _mean(
        abs(pop_norm[r.candidate_item_id] - users[r.user_id].trendiness) for r in rows
    )


def compute_metrics(
    rows: Sequence[RecommendationRow],
    catalog: Catalog,
    taxonomy: CategoryTaxonomy,
    pop_norm: Mapping[str, float],
    users: Mapping[str, UserProfile],
) -> MetricsReport:
    return MetricsReport(
        category_similarity_pct=category_similarity_metric(rows, catalog, taxonomy),
        gender_alignment_pct=gender_alignment_metric(rows, catalog, users),
        popularity_mae=popularity_mae_metric(rows, pop_norm, users),
        n_recommendations=len(rows),
    )


def run_ablation(
    catalog: Catalog,
    taxonomy: CategoryTaxonomy,
    users: Sequence[UserProfile],
    events: Sequence[PurchaseEvent],
    popularity: dict[str, float],
    base_weights: ScoringWeights,
    k: int,
) -> dict[str, MetricsReport]:
    """Re-rank and re-measure with scoring components switched off by zeroing
    their weights (no renormalization of the remaining weights)."""
    variants = {
        "full": base_weights,
        "no_pop": replace(base_weights, w_p=0.0),
        "no_vis": replace(base_weights, w_v=0.0),
    }
    pop_norm = normalize_popularity(popularity)
    users_by_id = {u.user_id: u for u in users}
    reports = {}
    for name, weights in variants.items():
        results = recommend_all(catalog, taxonomy, users, events, popularity, weights, k)
        rows = flatten_recommendations(results)
        reports[name] = compute_metrics(rows, catalog, taxonomy, pop_norm, users_by_id)
    return reports


def stratum_name(t: float) -> str:
    if t < 0.33:
        return "Low"
    if t < 0.66:
        return "Medium"
    return "High"


def trendiness_stratification(
    rows: Sequence[RecommendationRow],
    catalog: Catalog,
    taxonomy: CategoryTaxonomy,
    pop_norm: Mapping[str, float],
    users: Mapping[str, UserProfile],
) -> list[TrendinessStratum]:
    """Per-stratum metrics over each stratum's users only. Strata without
    any recommendations are omitted rather than reported as zero."""
    strata = []
    for name, t_min, t_max in STRATUM_BOUNDS:
        stratum_rows = [r for r in rows if stratum_name(users[r.user_id].trendiness) == name]
        if not stratum_rows:
            continue
        stratum_users = {users[r.user_id].user_id for r in stratum_rows}
        strata.append(
            TrendinessStratum(
                name=name,
                t_min=t_min,
                t_max=t_max,
                n_users=len(stratum_users),
                report=compute_metrics(stratum_rows, catalog, taxonomy, pop_norm, users),
            )
        )
    return strata


# --- report output -----------------------------------------------------------


def _dump_json(payload, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_json(report: MetricsReport, path: str | Path) -> None:
    _dump_json(report.as_dict(), path)


def write_ablation_json(reports: Mapping[str, MetricsReport], path: str | Path) -> None:
    _dump_json({name: rep.as_dict() for name, rep in reports.items()}, path)


def write_strata_json(strata: Sequence[TrendinessStratum], path: str | Path) -> None:
    payload = [
        {"name": s.name, "t_min": s.t_min, "t_max": s.t_max, "n_users": s.n_users}
        | s.report.as_dict()
        for s in strata
    ]
    _dump_json(payload, path)


def write_ablation_csv(reports: Mapping[str, MetricsReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["variant", "category_similarity_pct", "gender_alignment_pct", "popularity_mae", "n_recommendations"]
        )
        for name, rep in reports.items():
            writer.writerow(
                [name, rep.category_similarity_pct, rep.gender_alignment_pct, rep.popularity_mae, rep.n_recommendations]
            )


def write_strata_csv(strata: Sequence[TrendinessStratum], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["stratum", "t_min", "t_max", "n_users", "category_similarity_pct", "gender_alignment_pct", "popularity_mae", "n_recommendations"]
        )
        for s in strata:
            rep = s.report
            writer.writerow(
                [s.name, s.t_min, s.t_max, s.n_users, rep.category_similarity_pct, rep.gender_alignment_pct, rep.popularity_mae, rep.n_recommendations]
            )


def format_report_text(report: MetricsReport, title: str = "metrics") -> str:
    lines = [
        f"{title}",
        f"  category similarity   {report.category_similarity_pct:8.2f} %",
        f"  gender alignment      {report.gender_alignment_pct:8.2f} %",
        f"  popularity MAE        {report.popularity_mae:8.2f}",
        f"  recommendations       {report.n_recommendations:8d}",
    ]
    return "\n".join(lines)


def format_ablation_text(reports: Mapping[str, MetricsReport]) -> str:
    lines = [f"{'variant':<10} {'cat sim %':>10} {'gender %':>10} {'pop MAE':>10} {'n':>7}"]
    for name, rep in reports.items():
        lines.append(
            f"{name:<10} {rep.category_similarity_pct:>10.2f} {rep.gender_alignment_pct:>10.2f} "
            f"{rep.popularity_mae:>10.2f} {rep.n_recommendations:>7d}"
        )
    return "\n".join(lines)


def format_strata_text(strata: Sequence[TrendinessStratum]) -> str:
    lines = [f"{'stratum':<8} {'t range':<14} {'users':>5} {'cat sim %':>10} {'pop MAE':>10} {'n':>7}"]
    for s in strata:
        bound = f"[{s.t_min:.2f}, {s.t_max:.2f})" if s.name != "High" else f"[{s.t_min:.2f}, 1.00]"
        lines.append(
            f"{s.name:<8} {bound:<14} {s.n_users:>5d} {s.report.category_similarity_pct:>10.2f} "
            f"{s.report.popularity_mae:>10.2f} {s.report.n_recommendations:>7d}"
        )
    return "\n".join(lines)
