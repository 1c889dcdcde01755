"""CLI: extract --backbone B --images DIR [--masks DIR] --out FILE"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .extract import BACKBONE_DIMS, ExtractionConfig, extract_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="Embed garment images with a pretrained CNN backbone and "
        "write the recommendation engine's JSONL embedding format.",
    )
    parser.add_argument("--backbone", choices=sorted(BACKBONE_DIMS), default="resnet50")
    parser.add_argument("--images", type=Path, required=True, help="image directory")
    parser.add_argument("--masks", type=Path, help="segmentation label image directory")
    parser.add_argument("--out", type=Path, required=True, help="output JSONL file")
    parser.add_argument(
        "--garment-labels",
        help="comma-separated label values that count as garment (default: any nonzero)",
    )
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--device", default="cpu")
    parser.add_argument(
        "--no-pretrained",
        action="store_true",
        help="use randomly initialized weights (offline smoke runs only)",
    )
    parser.add_argument("--seed", type=int, default=0, help="weight init seed with --no-pretrained")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    labels = None
    if args.garment_labels:
        try:
            labels = frozenset(int(v) for v in args.garment_labels.split(","))
        except ValueError:
            print(f"bad --garment-labels value: {args.garment_labels!r}", file=sys.stderr)
            return 2
    config = ExtractionConfig(
        backbone=args.backbone,
        images=args.images,
        masks=args.masks,
        out=args.out,
        garment_labels=labels,
        pretrained=not args.no_pretrained,
        batch_size=args.batch_size,
        device=args.device,
        seed=args.seed,
    )
    try:
        summary = extract_embeddings(config)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {summary.written} embeddings -> {config.out} (skipped {len(summary.skipped)})")
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
