"""Command-line pipeline: simulate -> recommend -> evaluate, plus one-shot run.

Stages hand off through files in the output directory (events.csv, users.csv,
popularity.csv, recommendations.csv, report.json, ...) so external tools can
interpose between them. Every command is byte-deterministic for a fixed
config and seed. Exit codes: 0 ok, 1 data error, 2 config error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import Catalog, build_catalog, load_embeddings, read_store_manifest
from .errors import ConfigError, TrendRecError
from .evaluate import (
    compute_metrics,
    format_ablation_text,
    format_report_text,
    format_strata_text,
    run_ablation,
    trendiness_stratification,
    write_ablation_csv,
    write_ablation_json,
    write_report_json,
    write_strata_csv,
    write_strata_json,
)
from .geo import annotate_distances, random_locations
from .recommend import (
    ScoringWeights,
    flatten_recommendations,
    read_recommendations_csv,
    recommend_all,
    write_recommendations_csv,
)
from .simulate import (
    SimConfig,
    normalize_popularity,
    read_events_csv,
    read_popularity_csv,
    read_users_csv,
    simulate_histories,
    write_events_csv,
    write_popularity_csv,
    write_users_csv,
)
from .taxonomy import CategoryTaxonomy, default_taxonomy, load_taxonomy

_DEFAULTS = {
    "seed": 42,
    "users": 50,
    "max_purchases": 5,
    "stores": 5,
    "k": 5,
    "weights": "0.7,0.3,0",
    "gamma": 2,
    "ablate": False,
    "strata": False,
}

_CONFIG_KEYS = set(_DEFAULTS) | {
    "embeddings",
    "taxonomy",
    "manifest",
    "out",
    "max_distance_km",
}


@dataclass
class RunConfig:
    embeddings: Path
    out: Path
    taxonomy: Path | None = None
    manifest: Path | None = None
    seed: int = 42
    users: int = 50
    max_purchases: int = 5
    stores: int = 5
    k: int = 5
    weights: ScoringWeights = ScoringWeights()
    ablate: bool = False
    strata: bool = False
    max_distance_km: float | None = None

    def __post_init__(self):
        for name in ("users", "max_purchases", "stores", "k"):
            if getattr(self, name) < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be >= 1")
        if self.max_distance_km is not None and self.max_distance_km <= 0:
            raise ConfigError("--max-distance-km must be positive")


def parse_weights(text: str, gamma: int) -> ScoringWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"--weights expects wv,wp,wc, got {text!r}")
    try:
        w_v, w_p, w_c = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--weights values must be numbers, got {text!r}") from None
    return ScoringWeights(w_v=w_v, w_p=w_p, w_c=w_c, gamma=gamma)


def derive_seeds(seed: int, n: int) -> list[int]:
    """Independent per-stage integer seeds derived from the run seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trendrec",
        description="Trend-aware fashion recommendation pipeline on synthetic purchase histories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file; flags override it")
    common.add_argument("--embeddings", type=Path, help="embedding JSONL file")
    common.add_argument("--taxonomy", type=Path, help="taxonomy JSON (default: built-in)")
    common.add_argument("--manifest", type=Path, help="optional filename,store_id CSV")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--seed", type=int, help="run seed (default 42)")
    common.add_argument("--users", type=int, help="number of simulated users (default 50)")
    common.add_argument("--max-purchases", type=int, help="max purchases per user (default 5)")
    common.add_argument("--stores", type=int, help="number of synthetic stores (default 5)")
    common.add_argument("--k", type=int, help="recommendations per purchase (default 5)")
    common.add_argument("--weights", help="wv,wp,wc (default 0.7,0.3,0)")
    common.add_argument("--gamma", type=int, help="even trend-penalty exponent (default 2)")
    common.add_argument("--ablate", action="store_true", default=None,
                        help="also run the weight-ablation variants (evaluate)")
    common.add_argument("--strata", action="store_true", default=None,
                        help="also report trendiness strata (evaluate)")
    common.add_argument("--max-distance-km", type=float,
                        help="drop recommendations beyond this store distance")

    for name, text in (
        ("simulate", "generate users, purchase events and final popularity"),
        ("recommend", "score candidates and write Top-K recommendations"),
        ("evaluate", "compute metrics (and optionally ablation / strata) from recommendations"),
        ("run", "simulate, recommend and evaluate in one go"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Layer CLI flags over the optional JSON config file over defaults."""
    file_values = {}
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        unknown = set(file_values) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    def pick(name, default=None):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        if name in file_values and file_values[name] is not None:
            return file_values[name]
        return default

    embeddings = pick("embeddings")
    if embeddings is None:
        raise ConfigError("--embeddings is required (flag or config file)")
    out = pick("out")
    if out is None:
        raise ConfigError("--out is required (flag or config file)")

    weights_value = pick("weights", _DEFAULTS["weights"])
    if isinstance(weights_value, (list, tuple)):
        weights_value = ",".join(str(v) for v in weights_value)
    weights = parse_weights(str(weights_value), gamma=int(pick("gamma", _DEFAULTS["gamma"])))

    taxonomy = pick("taxonomy")
    manifest = pick("manifest")
    max_distance = pick("max_distance_km")
    return RunConfig(
        embeddings=Path(embeddings),
        out=Path(out),
        taxonomy=Path(taxonomy) if taxonomy is not None else None,
        manifest=Path(manifest) if manifest is not None else None,
        seed=int(pick("seed", _DEFAULTS["seed"])),
        users=int(pick("users", _DEFAULTS["users"])),
        max_purchases=int(pick("max_purchases", _DEFAULTS["max_purchases"])),
        stores=int(pick("stores", _DEFAULTS["stores"])),
        k=int(pick("k", _DEFAULTS["k"])),
        weights=weights,
        ablate=bool(pick("ablate", False)),
        strata=bool(pick("strata", False)),
        max_distance_km=float(max_distance) if max_distance is not None else None,
    )


def _load_catalog(cfg: RunConfig) -> Catalog:
    table = load_embeddings(cfg.embeddings)
    manifest = read_store_manifest(cfg.manifest) if cfg.manifest else None
    store_seed = derive_seeds(cfg.seed, 3)[0]
    return build_catalog(table, n_stores=cfg.stores, seed=store_seed, manifest=manifest)


def _load_taxonomy(cfg: RunConfig) -> CategoryTaxonomy:
    return load_taxonomy(cfg.taxonomy) if cfg.taxonomy else default_taxonomy()


def cmd_simulate(cfg: RunConfig) -> None:
    """Write events.csv, users.csv and popularity.csv under the out dir."""
    catalog = _load_catalog(cfg)
    _, sim_seed, loc_seed = derive_seeds(cfg.seed, 3)
    sim_config = SimConfig(
        n_users=cfg.users, max_purchases_per_user=cfg.max_purchases, seed=sim_seed
    )
    users, events, popularity = simulate_histories(catalog, sim_config)
    locations = random_locations([u.user_id for u in users], loc_seed)

    cfg.out.mkdir(parents=True, exist_ok=True)
    write_events_csv(events, users, cfg.out / "events.csv")
    write_users_csv(users, locations, cfg.out / "users.csv")
    write_popularity_csv(popularity, cfg.out / "popularity.csv")
    print(f"simulated {len(users)} users, {len(events)} purchases -> {cfg.out}")


def cmd_recommend(cfg: RunConfig) -> None:
    """Write recommendations.csv; runs the simulate stage first if its
    outputs are missing."""
    stage_files = ("events.csv", "users.csv", "popularity.csv")
    if not all((cfg.out / name).exists() for name in stage_files):
        cmd_simulate(cfg)

    catalog = _load_catalog(cfg)
    taxonomy = _load_taxonomy(cfg)
    users, locations = read_users_csv(cfg.out / "users.csv")
    events = read_events_csv(cfg.out / "events.csv")
    popularity = read_popularity_csv(cfg.out / "popularity.csv")

    results = recommend_all(catalog, taxonomy, users, events, popularity, cfg.weights, cfg.k)
    for user in users:
        for recs in results[user.user_id].values():
            annotate_distances(recs, catalog, locations[user.user_id])
    rows = flatten_recommendations(results)
    if cfg.max_distance_km is not None:
        rows = [r for r in rows if r.distance_km is not None and r.distance_km <= cfg.max_distance_km]
    write_recommendations_csv(rows, cfg.out / "recommendations.csv")
    print(f"wrote {len(rows)} recommendations -> {cfg.out / 'recommendations.csv'}")


def cmd_evaluate(cfg: RunConfig) -> None:
    """Write report.json (plus ablation/strata artifacts when flagged) from
    an existing recommendations.csv."""
    rec_path = cfg.out / "recommendations.csv"
    if not rec_path.exists():
        raise TrendRecError(f"{rec_path} not found; run the recommend stage first")

    catalog = _load_catalog(cfg)
    taxonomy = _load_taxonomy(cfg)
    users, _ = read_users_csv(cfg.out / "users.csv")
    users_by_id = {u.user_id: u for u in users}
    popularity = read_popularity_csv(cfg.out / "popularity.csv")
    pop_norm = normalize_popularity(popularity)
    rows = read_recommendations_csv(rec_path)

    report = compute_metrics(rows, catalog, taxonomy, pop_norm, users_by_id)
    write_report_json(report, cfg.out / "report.json")
    print(format_report_text(report, title="overall"))

    if cfg.ablate:
        events = read_events_csv(cfg.out / "events.csv")
        reports = run_ablation(catalog, taxonomy, users, events, popularity, cfg.weights, cfg.k)
        write_ablation_json(reports, cfg.out / "ablation.json")
        write_ablation_csv(reports, cfg.out / "ablation.csv")
        print(format_ablation_text(reports))

    if cfg.strata:
        strata = trendiness_stratification(rows, catalog, taxonomy, pop_norm, users_by_id)
        write_strata_json(strata, cfg.out / "strata.json")
        write_strata_csv(strata, cfg.out / "strata.csv")
        print(format_strata_text(strata))


def cmd_run(cfg: RunConfig) -> None:
    cmd_simulate(cfg)
    cmd_recommend(cfg)
    cmd_evaluate(cfg)


_COMMANDS = {
    "simulate": cmd_simulate,
    "recommend": cmd_recommend,
    "evaluate": cmd_evaluate,
    "run": cmd_run,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (TrendRecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
