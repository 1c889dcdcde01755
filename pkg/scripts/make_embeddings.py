#!/usr/bin/env python
"""Generate a synthetic embedding JSONL file for desk-scale experiments.

Vectors are unit-norm with a tunable amount of per-category structure
(--signal 0 gives fully random directions)."""
from __future__ import annotations

import argparse
from pathlib import Path

from trendrec.catalog import write_embeddings
from trendrec.synthetic import SyntheticConfig, synthetic_embeddings


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--items", type=int, default=240, help="number of items (default 240)")
    parser.add_argument("--dim", type=int, default=64, help="embedding dimension (default 64)")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument(
        "--signal",
        type=float,
        default=0.75,
        help="category structure strength in [0, 1] (default 0.75)",
    )
    parser.add_argument("--out", type=Path, required=True, help="output JSONL path")
    args = parser.parse_args()

    table = synthetic_embeddings(
        SyntheticConfig(
            n_items=args.items, dim=args.dim, seed=args.seed, category_signal=args.signal
        )
    )
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_embeddings(table, args.out)
    print(f"wrote {len(table)} embeddings (dim {table.dimension}) -> {args.out}")


if __name__ == "__main__":
    main()
