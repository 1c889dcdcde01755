"""Semantic category groups and the tiered category-similarity score.

Identical categories score 1.0, different categories within one semantic
group score 0.8, and cross-group pairs score a matrix value in [0.1, 0.4].
Taxonomies are plain config files so experiments can swap them; instances
are immutable after load and safe for concurrent reads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import MalformedRecord

IDENTICAL_SCORE = 1.0
SAME_GROUP_SCORE = 0.8
CROSS_GROUP_MIN = 0.1
CROSS_GROUP_MAX = 0.4


@dataclass
class CategoryTaxonomy:
    groups: dict[str, list[str]]
    group_similarity: dict[str, dict[str, float]]
    default_cross_group: float = 0.25
    group_of: dict[str, str] = field(init=False, repr=False)

    def __post_init__(self):
        self.group_of = {}
        for group, categories in self.groups.items():
            for cat in categories:
                self.group_of.setdefault(cat, group)

    def group(self, category: str) -> str | None:
        return self.group_of.get(category)

    def similarity(self, cat_a: str, cat_b: str) -> float:
        """Tiered similarity; total over all inputs. Unknown categories fall
        back to the default cross-group value unless identical."""
        if cat_a == cat_b:
            return IDENTICAL_SCORE
        group_a = self.group_of.get(cat_a)
        group_b = self.group_of.get(cat_b)
        if group_a is None or group_b is None:
            return self.default_cross_group
        if group_a == group_b:
            return SAME_GROUP_SCORE
        return self._cross_group(group_a, group_b)

    def _cross_group(self, group_a: str, group_b: str) -> float:
        value = self.group_similarity.get(group_a, {}).get(group_b)
        if value is None:
            value = self.group_similarity.get(group_b, {}).get(group_a)
        return self.default_cross_group if value is None else value


def load_taxonomy(path: str | Path) -> CategoryTaxonomy:
    """Read a taxonomy JSON file (keys ``groups``, ``group_similarity``,
    ``default_cross_group``)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        groups = {str(g): [str(c) for c in cats] for g, cats in raw["groups"].items()}
        matrix = {
            str(a): {str(b): float(v) for b, v in row.items()}
            for a, row in raw.get("group_similarity", {}).items()
        }
        default = float(raw.get("default_cross_group", 0.25))
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedRecord(f"{path}: invalid taxonomy structure ({exc})") from None
    return CategoryTaxonomy(groups=groups, group_similarity=matrix, default_cross_group=default)


def default_taxonomy() -> CategoryTaxonomy:
    """The taxonomy shipped with the package (tops / bottoms / outerwear /
    dresses / accessories with pinned cross-group values)."""
    ref = resources.files("trendrec").joinpath("data/default_taxonomy.json")
    with resources.as_file(ref) as path:
        return load_taxonomy(path)


def validate_taxonomy(taxonomy: CategoryTaxonomy) -> list[str]:
    """Diagnostic check; returns a list of violation messages (empty = ok)."""
    violations: list[str] = []
    seen: dict[str, str] = {}
    for group, categories in taxonomy.groups.items():
        for cat in categories:
            if cat in seen and seen[cat] != group:
                violations.append(
                    f"category {cat!r} mapped to multiple groups ({seen[cat]!r}, {group!r})"
                )
            seen.setdefault(cat, group)

    known_groups = set(taxonomy.groups)
    matrix = taxonomy.group_similarity
    for group_a, row in matrix.items():
        if group_a not in known_groups:
            violations.append(f"similarity row for unknown group {group_a!r}")
        for group_b, value in row.items():
            if group_b not in known_groups:
                violations.append(f"similarity entry for unknown group {group_b!r}")
            if group_a == group_b:
                violations.append(f"diagonal entry for group {group_a!r} (same-group tier is fixed)")
                continue
            if not (CROSS_GROUP_MIN <= value <= CROSS_GROUP_MAX):
                violations.append(
                    f"out of range: {group_a!r}/{group_b!r} = {value} not in "
                    f"[{CROSS_GROUP_MIN}, {CROSS_GROUP_MAX}]"
                )
            mirrored = matrix.get(group_b, {}).get(group_a)
            if mirrored is not None and mirrored != value:
                violations.append(
                    f"asymmetric: {group_a!r}/{group_b!r} = {value} but "
                    f"{group_b!r}/{group_a!r} = {mirrored}"
                )
    if not (CROSS_GROUP_MIN <= taxonomy.default_cross_group <= CROSS_GROUP_MAX):
        violations.append(
            f"out of range: default_cross_group = {taxonomy.default_cross_group}"
        )
    return violations
