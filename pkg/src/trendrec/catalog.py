"""Item catalog: filename metadata parsing, embedding tables, store assignment.

A catalog is immutable after load and safe for concurrent reads; all loading
is single-threaded and fail-fast.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    DuplicateItem,
    EmptyCatalog,
    MalformedFilename,
    MalformedRecord,
    MissingEmbedding,
    NonFiniteValue,
    UnknownGender,
    UnknownItem,
)

# Canonical item filename: <GENDER>_<Category>_<digits>.<ext>
FILENAME_PATTERN = re.compile(
    r"^(?P<gender>[A-Za-z]+)_(?P<category>[A-Za-z0-9-]+)_(?P<item_id>[0-9]+)\.(?P<ext>[A-Za-z0-9]+)$"
)


class Gender(Enum):
    MEN = "MEN"
    WOMEN = "WOMEN"

    @classmethod
    def parse(cls, token: str) -> "Gender":
        try:
            return cls(token.upper())
        except ValueError:
            raise UnknownGender(f"gender token {token!r} is not MEN or WOMEN") from None


@dataclass
class ItemRecord:
    """One catalog item. ``popularity`` is a snapshot; the authoritative
    dynamic values live in the simulator's popularity tables."""

    item_id: str
    gender: Gender
    category: str
    store_id: str = ""
    popularity: float = 0.0


@dataclass(frozen=True)
class Store:
    store_id: str
    latitude: float
    longitude: float


def parse_item_filename(filename: str) -> tuple[Gender, str, str]:
    """Split a canonical item filename into (gender, category, item id)."""
    m = FILENAME_PATTERN.match(filename)
    if m is None:
        raise MalformedFilename(
            f"{filename!r} does not match <GENDER>_<Category>_<digits>.<ext>"
        )
    gender = Gender.parse(m.group("gender"))
    return gender, m.group("category"), m.group("item_id")


def compose_item_filename(
    gender: Gender, category: str, item_id: str, ext: str = "jpg"
) -> str:
    """Inverse of :func:`parse_item_filename` for canonical inputs."""
    return f"{gender.value}_{category}_{item_id}.{ext}"


@dataclass
class EmbeddingTable:
    """Uniform-dimension map from item id to a finite float64 vector."""

    dimension: int
    rows: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self.rows

    def vector(self, item_id: str) -> np.ndarray:
        try:
            return self.rows[item_id]
        except KeyError:
            raise UnknownItem(f"no embedding for item {item_id!r}") from None


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Read a JSON Lines embedding file (one ``{"item_id", "embedding"}``
    object per line, UTF-8, LF). The resulting table does not depend on row
    order."""
    rows: dict[str, np.ndarray] = {}
    dimension = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"{path}:{lineno}: invalid JSON ({exc})") from None
            if not isinstance(obj, dict) or "item_id" not in obj or "embedding" not in obj:
                raise MalformedRecord(
                    f"{path}:{lineno}: expected an object with item_id and embedding"
                )
            item_id = obj["item_id"]
            if not isinstance(item_id, str):
                raise MalformedRecord(f"{path}:{lineno}: item_id must be a string")
            try:
                vec = np.asarray(obj["embedding"], dtype=np.float64)
            except (TypeError, ValueError):
                raise MalformedRecord(f"{path}:{lineno}: embedding is not a number list") from None
            if vec.ndim != 1 or vec.size == 0:
                raise MalformedRecord(f"{path}:{lineno}: embedding must be a nonempty flat list")
            if not np.isfinite(vec).all():
                raise NonFiniteValue(f"{path}:{lineno}: embedding for {item_id!r} has NaN/inf")
            if item_id in rows:
                raise DuplicateItem(f"{path}:{lineno}: duplicate item id {item_id!r}")
            if dimension is None:
                dimension = vec.size
            elif vec.size != dimension:
                raise DimensionMismatch(
                    f"{path}:{lineno}: {item_id!r} has dimension {vec.size}, expected {dimension}"
                )
            rows[item_id] = vec
    if dimension is None:
        raise EmptyCatalog(f"{path}: embedding file has no rows")
    return EmbeddingTable(dimension=int(dimension), rows=rows)


def write_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    """Write a table back to the JSONL format accepted by
    :func:`load_embeddings` (rows sorted by item id, full float precision)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for item_id in sorted(table.rows):
            vec = [float(x) for x in table.rows[item_id]]
            fh.write(json.dumps({"item_id": item_id, "embedding": vec}) + "\n")


def _store_coordinates(store_ids: list[str], rng: np.random.Generator) -> dict[str, Store]:
    lats = rng.uniform(-90.0, 90.0, size=len(store_ids))
    lons = rng.uniform(-180.0, 180.0, size=len(store_ids))
    return {
        sid: Store(sid, float(lat), float(lon))
        for sid, lat, lon in zip(store_ids, lats, lons)
    }


def assign_stores(
    item_ids: Iterable[str], n_stores: int, seed: int
) -> tuple[dict[str, Store], dict[str, str]]:
    """Place ``n_stores`` stores uniformly on the globe and assign each item
    to one uniformly at random. Deterministic for a fixed seed; items are
    processed in sorted order so the result does not depend on input order."""
    if n_stores < 1:
        raise ConfigError("n_stores must be >= 1")
    ids = sorted(item_ids)
    if not ids:
        raise EmptyCatalog("cannot assign stores for an empty item set")
    rng = np.random.default_rng(seed)
    store_ids = [f"store_{i}" for i in range(n_stores)]
    stores = _store_coordinates(store_ids, rng)
    choice = rng.integers(0, n_stores, size=len(ids))
    assignment = {iid: store_ids[int(c)] for iid, c in zip(ids, choice)}
    return stores, assignment


def read_store_manifest(path: str | Path) -> dict[str, str]:
    """Read the optional ``filename,store_id`` CSV manifest."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != {"filename", "store_id"}:
            raise MalformedRecord(f"{path}: manifest header must be filename,store_id")
        for row in reader:
            name, sid = row["filename"], row["store_id"]
            if name in mapping:
                raise DuplicateItem(f"{path}: duplicate manifest filename {name!r}")
            mapping[name] = sid
    if not mapping:
        raise EmptyCatalog(f"{path}: manifest has no rows")
    return mapping


@dataclass
class Catalog:
    """Immutable bundle of items, stores and embeddings, keyed by item id."""

    items: dict[str, ItemRecord]
    stores: dict[str, Store]
    embeddings: EmbeddingTable

    def __len__(self) -> int:
        return len(self.items)

    def item(self, item_id: str) -> ItemRecord:
        try:
            return self.items[item_id]
        except KeyError:
            raise UnknownItem(f"item {item_id!r} is not in the catalog") from None

    def candidates(
        self, user_gender: Gender, exclude: frozenset[str] | set[str] = frozenset()
    ) -> list[ItemRecord]:
        """All items matching ``user_gender`` whose id is not in ``exclude``,
        in ascending item-id order."""
        return [
            rec
            for rec in self.items.values()
            if rec.gender is user_gender and rec.item_id not in exclude
        ]

    def ids_by_gender(self, gender: Gender) -> list[str]:
        return [rec.item_id for rec in self.items.values() if rec.gender is gender]


def build_catalog(
    embeddings: EmbeddingTable,
    n_stores: int = 5,
    seed: int = 0,
    manifest: Mapping[str, str] | None = None,
) -> Catalog:
    """Construct a catalog from an embedding table keyed by canonical
    filenames.

    Every filename is parsed for gender/category/id and the table is re-keyed
    by item id. When a manifest is given it defines the item set and the
    item-to-store assignment; filenames without an embedding row (or embedding
    rows without a manifest entry) are rejected rather than dropped.
    """
    filenames = sorted(manifest) if manifest is not None else sorted(embeddings.rows)
    if manifest is not None:
        extra = set(embeddings.rows) - set(manifest)
        if extra:
            raise MalformedRecord(
                f"embedding rows missing from manifest: {sorted(extra)[:5]}"
            )
    items: dict[str, ItemRecord] = {}
    rows: dict[str, np.ndarray] = {}
    for name in filenames:
        gender, category, item_id = parse_item_filename(name)
        if item_id in items:
            raise DuplicateItem(f"item id {item_id!r} parsed from more than one filename")
        if name not in embeddings.rows:
            raise MissingEmbedding(f"catalog item {name!r} has no embedding row")
        items[item_id] = ItemRecord(item_id=item_id, gender=gender, category=category)
        rows[item_id] = embeddings.rows[name]

    if manifest is not None:
        store_ids = sorted(set(manifest.values()))
        stores = _store_coordinates(store_ids, np.random.default_rng(seed))
        for name in filenames:
            _, _, item_id = parse_item_filename(name)
            items[item_id].store_id = manifest[name]
    else:
        stores, assignment = assign_stores(items.keys(), n_stores=n_stores, seed=seed)
        for item_id, store_id in assignment.items():
            items[item_id].store_id = store_id

    ordered = {iid: items[iid] for iid in sorted(items)}
    table = EmbeddingTable(dimension=embeddings.dimension, rows=rows)
    return Catalog(items=ordered, stores=stores, embeddings=table)
