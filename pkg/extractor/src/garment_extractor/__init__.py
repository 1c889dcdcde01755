"""Masked-garment CNN feature extraction into the engine's JSONL format."""

from .extract import (
    BACKBONE_DIMS,
    DuplicateImageName,
    ExtractionConfig,
    ExtractionSummary,
    FeatureExtractor,
    build_backbone,
    extract_embeddings,
)
from .masking import MaskShapeError, find_mask_for, load_label_image, mask_image

__version__ = "0.1.0"
