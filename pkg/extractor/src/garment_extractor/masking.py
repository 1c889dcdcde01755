"""Garment-aware masking from precomputed segmentation label images.

This tool does not run a segmentation model; it consumes label images in
which some set of label values marks garment pixels (by default, anything
nonzero). Pixels outside the garment set are blacked out before feature
extraction so embeddings ignore faces, hair, skin and background.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

MASK_EXTENSIONS = (".png", ".bmp", ".jpg", ".jpeg", ".webp")


class MaskShapeError(ValueError):
    """Mask dimensions do not match the image."""


def load_label_image(path: str | Path) -> np.ndarray:
    """Read a segmentation label image as a (H, W) integer array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("L"))


def mask_image(
    image: np.ndarray,
    mask: np.ndarray,
    garment_labels: frozenset[int] | set[int] | None = None,
) -> np.ndarray:
    """Zero out non-garment pixels; garment pixels pass through unchanged.

    ``garment_labels`` is the set of label values that count as garment;
    ``None`` means every nonzero label.
    """
    image = np.asarray(image)
    mask = np.asarray(mask)
    if mask.shape != image.shape[:2]:
        raise MaskShapeError(
            f"mask shape {mask.shape} does not match image shape {image.shape[:2]}"
        )
    if garment_labels is None:
        keep = mask != 0
    else:
        keep = np.isin(mask, list(garment_labels))
    out = image.copy()
    out[~keep] = 0
    return out


def find_mask_for(image_path: Path, mask_dir: Path) -> Path | None:
    """Locate the label image for ``image_path`` by stem."""
    for ext in MASK_EXTENSIONS:
        candidate = mask_dir / (image_path.stem + ext)
        if candidate.exists():
            return candidate
    return None
