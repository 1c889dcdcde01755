"""Trend-driven synthetic purchase generation with popularity feedback.

The simulation is inherently sequential (every purchase feeds back into item
popularity before the next draw) and fully deterministic for a fixed seed.
"""
from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .catalog import Catalog, Gender
from .errors import (
    ConfigError,
    EmptyCatalog,
    EmptyEligibleSet,
    EmptyTable,
)
from .geo import GeoPoint

# Initial popularity draws land on this grid so that the +1.0 feedback
# updates (and final-minus-initial conservation checks) stay exact in
# float64 for integer-valued range endpoints.
_POPULARITY_GRID = 2**32

_YEAR_START = dt.date(2025, 1, 1)
_DAYS_IN_2025 = 365


@dataclass(frozen=True)
class SimConfig:
    n_users: int = 50
    max_purchases_per_user: int = 5
    seed: int = 42
    init_popularity_range: tuple[float, float] = (0.0, 1.0)
    # Only the uniform/popularity mixture is implemented; the field exists so
    # alternative samplers can be added without changing call sites.
    sampling_strategy: str = "mixture"

    def __post_init__(self):
        if self.n_users < 1:
            raise ConfigError("n_users must be >= 1")
        if self.max_purchases_per_user < 1:
            raise ConfigError("max_purchases_per_user must be >= 1")
        lo, hi = self.init_popularity_range
        if not (0 <= lo <= hi):
            raise ConfigError("init_popularity_range must satisfy 0 <= lo <= hi")
        if self.sampling_strategy != "mixture":
            raise ConfigError(f"unknown sampling strategy {self.sampling_strategy!r}")


@dataclass
class UserProfile:
    user_id: str
    trendiness: float
    gender: Gender


@dataclass(frozen=True)
class PurchaseEvent:
    user_id: str
    item_id: str
    date: dt.date


def init_popularity(
    item_ids: Iterable[str],
    config: SimConfig,
    rng: np.random.Generator | None = None,
) -> dict[str, float]:
    """Independent uniform draw in ``init_popularity_range`` per item,
    deterministic per seed. Items are processed in sorted order."""
    ids = sorted(item_ids)
    if not ids:
        raise EmptyCatalog("cannot initialize popularity for an empty item set")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    lo, hi = config.init_popularity_range
    grid = rng.integers(0, _POPULARITY_GRID, size=len(ids)) / _POPULARITY_GRID
    return {iid: float(lo + u * (hi - lo)) for iid, u in zip(ids, grid)}


def purchase_distribution(
    pop: dict[str, float], eligible: Sequence[str], t: float
) -> np.ndarray:
    """Mixture of uniform exploration and popularity-proportional trend
    following: P(i) = (1-t)/N + t * pop_i / sum(pop). Falls back to uniform
    when all eligible popularity is zero."""
    if len(eligible) == 0:
        raise EmptyEligibleSet("no eligible items to draw from")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"trendiness must be in [0, 1], got {t}")
    n = len(eligible)
    pops = np.array([pop[iid] for iid in eligible], dtype=np.float64)
    total = pops.sum()
    if total == 0.0:
        return np.full(n, 1.0 / n)
    # normalize to shares before scaling by t: subnormal popularity values
    # would otherwise underflow in t * pops and break the sum-to-1 contract
    return (1.0 - t) / n + t * (pops / total)


def simulate_histories(
    catalog: Catalog, config: SimConfig
) -> tuple[list[UserProfile], list[PurchaseEvent], dict[str, float]]:
    """Generate users, their purchase events and the final popularity table.

    Per user: trendiness ~ uniform[0,1]; a purchase count uniform in
    [1, max_purchases_per_user]; the first item is uniform over the whole
    catalog and fixes the user's gender; every later item is drawn from
    :func:`purchase_distribution` over same-gender items the user has not
    bought yet. Each purchase bumps that item's popularity by 1 before the
    next draw. Purchases stop early if the user exhausts the eligible pool.
    """
    if len(catalog) == 0:
        raise EmptyCatalog("cannot simulate on an empty catalog")
    rng = np.random.default_rng(config.seed)
    pop = init_popularity(catalog.items.keys(), config, rng=rng)

    all_ids = list(catalog.items)
    by_gender = {g: catalog.ids_by_gender(g) for g in Gender}

    users: list[UserProfile] = []
    events: list[PurchaseEvent] = []
    for i in range(config.n_users):
        user_id = f"user_{i:03d}"
        t = float(rng.random())
        n_purchases = int(rng.integers(1, config.max_purchases_per_user + 1))

        first = all_ids[int(rng.integers(0, len(all_ids)))]
        gender = catalog.items[first].gender
        users.append(UserProfile(user_id=user_id, trendiness=t, gender=gender))

        purchased = {first}
        pop[first] += 1.0
        events.append(PurchaseEvent(user_id, first, _random_date(rng)))

        for _ in range(n_purchases - 1):
            eligible = [iid for iid in by_gender[gender] if iid not in purchased]
            if not eligible:
                break
            probs = purchase_distribution(pop, eligible, t)
            item = eligible[int(rng.choice(len(eligible), p=probs))]
            purchased.add(item)
            pop[item] += 1.0
            events.append(PurchaseEvent(user_id, item, _random_date(rng)))

    return users, events, pop


def _random_date(rng: np.random.Generator) -> dt.date:
    return _YEAR_START + dt.timedelta(days=int(rng.integers(0, _DAYS_IN_2025)))


def normalize_popularity(pop: dict[str, float]) -> dict[str, float]:
    """Min-max normalize to [0, 1]; a constant table maps everything to 0.5."""
    if not pop:
        raise EmptyTable("cannot normalize an empty popularity table")
    lo = min(pop.values())
    hi = max(pop.values())
    if hi == lo:
        return {iid: 0.5 for iid in pop}
    span = hi - lo
    return {iid: (value - lo) / span for iid, value in pop.items()}


# --- file formats ----------------------------------------------------------


def write_events_csv(
    events: Sequence[PurchaseEvent], users: Sequence[UserProfile], path: str | Path
) -> None:
    trendiness = {u.user_id: u.trendiness for u in users}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "item_id", "date", "trendiness"])
        for e in events:
            writer.writerow([e.user_id, e.item_id, e.date.isoformat(), trendiness[e.user_id]])


def read_events_csv(path: str | Path) -> list[PurchaseEvent]:
    events = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            events.append(
                PurchaseEvent(
                    user_id=row["user_id"],
                    item_id=row["item_id"],
                    date=dt.date.fromisoformat(row["date"]),
                )
            )
    return events


def write_users_csv(
    users: Sequence[UserProfile],
    locations: dict[str, GeoPoint],
    path: str | Path,
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["user_id", "gender", "trendiness", "latitude", "longitude"])
        for u in users:
            loc = locations[u.user_id]
            writer.writerow(
                [u.user_id, u.gender.value, u.trendiness, loc.latitude, loc.longitude]
            )


def read_users_csv(path: str | Path) -> tuple[list[UserProfile], dict[str, GeoPoint]]:
    users, locations = [], {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            users.append(
                UserProfile(
                    user_id=row["user_id"],
                    trendiness=float(row["trendiness"]),
                    gender=Gender(row["gender"]),
                )
            )
            locations[row["user_id"]] = GeoPoint(
                float(row["latitude"]), float(row["longitude"])
            )
    return users, locations


def write_popularity_csv(pop: dict[str, float], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["item_id", "popularity"])
        for item_id in sorted(pop):
            writer.writerow([item_id, pop[item_id]])


def read_popularity_csv(path: str | Path) -> dict[str, float]:
    with open(path, encoding="utf-8", newline="") as fh:
        return {row["item_id"]: float(row["popularity"]) for row in csv.DictReader(fh)}
