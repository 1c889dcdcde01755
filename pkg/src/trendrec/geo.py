"""Great-circle distances between user and store locations.

Distance is annotation-only: it never participates in ranking, but is
attached to recommendations for downstream filtering or visualization.
All functions here are pure.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import asin, cos, radians, sin, sqrt
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import UnknownStore

if TYPE_CHECKING:
    from .catalog import Catalog
    from .recommend import Recommendation

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class GeoPoint:
    """Location in degrees; latitude in [-90, 90], longitude in [-180, 180]."""

    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of [-180, 180]")


def haversine_km(p1: GeoPoint, p2: GeoPoint) -> float:
    """Great-circle distance in km on a sphere of radius 6371 km.

    d = 2r * asin(sqrt(sin^2(dlat/2) + cos(lat1) cos(lat2) sin^2(dlon/2)))
    with coordinates converted to radians.
    """
    lat1, lon1 = radians(p1.latitude), radians(p1.longitude)
    lat2, lon2 = radians(p2.latitude), radians(p2.longitude)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    a = sin(dlat / 2.0) ** 2 + cos(lat1) * cos(lat2) * sin(dlon / 2.0) ** 2
    # a can creep past 1.0 by one ulp for antipodal points
    return 2.0 * EARTH_RADIUS_KM * asin(min(1.0, sqrt(a)))


def random_locations(keys: Sequence[str], seed: int) -> dict[str, GeoPoint]:
    """Seeded uniform lat/lon per key (used for user home locations)."""
    rng = np.random.default_rng(seed)
    lats = rng.uniform(-90.0, 90.0, size=len(keys))
    lons = rng.uniform(-180.0, 180.0, size=len(keys))
    return {
        key: GeoPoint(float(lat), float(lon))
        for key, lat, lon in zip(keys, lats, lons)
    }


def annotate_distances(
    recommendations: list["Recommendation"],
    catalog: "Catalog",
    user_location: GeoPoint,
) -> list["Recommendation"]:
    """Fill ``distance_km`` on each recommendation (user to the candidate
    item's store). Ordering, ranks and scores are left untouched."""
    for rec in recommendations:
        item = catalog.item(rec.candidate_item_id)
        store = catalog.stores.get(item.store_id)
        if store is None:
            raise UnknownStore(
                f"item {item.item_id!r} references unknown store {item.store_id!r}"
            )
        rec.distance_km = haversine_km(
            user_location, GeoPoint(store.latitude, store.longitude)
        )
    return recommendations
