"""Penultimate-layer CNN embeddings for garment images, exported as the
JSON Lines format the recommendation engine loads.

Backbones output fixed dimensions: resnet50 2048, densenet121 1024,
vgg16 4096. Images are resized to 256, center-cropped to 224 and normalized
with standard large-scale image statistics before inference.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError
from torchvision import models, transforms

from .masking import find_mask_for, load_label_image, mask_image

BACKBONE_DIMS = {"resnet50": 2048, "densenet121": 1024, "vgg16": 4096}

IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png", ".bmp", ".webp")

NORMALIZE_MEAN = (0.485, 0.456, 0.406)
NORMALIZE_STD = (0.229, 0.224, 0.225)


class DuplicateImageName(ValueError):
    """Two images share a basename; embedding rows would collide."""


@dataclass(frozen=True)
class ExtractionConfig:
    backbone: str = "resnet50"
    images: Path = Path(".")
    out: Path = Path("embeddings.jsonl")
    masks: Path | None = None
    garment_labels: frozenset[int] | None = None  # None = any nonzero label
    resize: int = 256
    crop: int = 224
    pretrained: bool = True
    batch_size: int = 8
    device: str = "cpu"
    seed: int = 0  # weight init when pretrained=False

    def __post_init__(self):
        if self.backbone not in BACKBONE_DIMS:
            raise ValueError(f"backbone must be one of {sorted(BACKBONE_DIMS)}")
        if self.crop > self.resize:
            raise ValueError("crop size must not exceed resize size")


@dataclass
class ExtractionSummary:
    written: int = 0
    skipped: list[str] = field(default_factory=list)


def build_backbone(name: str, pretrained: bool = True, seed: int = 0) -> torch.nn.Module:
    """Backbone truncated to its penultimate feature layer, in eval mode."""
    torch.manual_seed(seed)
    if name == "resnet50":
        weights = models.ResNet50_Weights.DEFAULT if pretrained else None
        model = models.resnet50(weights=weights)
        model.fc = torch.nn.Identity()
    elif name == "densenet121":
        weights = models.DenseNet121_Weights.DEFAULT if pretrained else None
        model = models.densenet121(weights=weights)
        model.classifier = torch.nn.Identity()
    elif name == "vgg16":
        weights = models.VGG16_Weights.DEFAULT if pretrained else None
        model = models.vgg16(weights=weights)
        model.classifier = torch.nn.Sequential(*list(model.classifier.children())[:-1])
    else:
        raise ValueError(f"backbone must be one of {sorted(BACKBONE_DIMS)}")
    model.eval()
    return model


class FeatureExtractor:
    """Reusable wrapper around one backbone: mask, preprocess, embed."""

    def __init__(self, config: ExtractionConfig):
        self.config = config
        self.dim = BACKBONE_DIMS[config.backbone]
        self.device = torch.device(config.device)
        self.model = build_backbone(config.backbone, config.pretrained, config.seed).to(
            self.device
        )
        self.preprocess = transforms.Compose(
            [
                transforms.Resize(config.resize),
                transforms.CenterCrop(config.crop),
                transforms.ToTensor(),
                transforms.Normalize(NORMALIZE_MEAN, NORMALIZE_STD),
            ]
        )

    def prepare(self, image: Image.Image, mask: np.ndarray | None = None) -> torch.Tensor:
        """Masked, normalized input tensor for one image."""
        rgb = np.asarray(image.convert("RGB"))
        if mask is not None:
            rgb = mask_image(rgb, mask, self.config.garment_labels)
        return self.preprocess(Image.fromarray(rgb))

    def embed_batch(self, batch: list[torch.Tensor]) -> np.ndarray:
        with torch.no_grad():
            out = self.model(torch.stack(batch).to(self.device))
        return out.cpu().numpy()

    def embed(self, image: Image.Image, mask: np.ndarray | None = None) -> np.ndarray:
        return self.embed_batch([self.prepare(image, mask)])[0]


def _scan_images(root: Path) -> list[Path]:
    paths = sorted(
        p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in IMAGE_EXTENSIONS
    )
    seen: dict[str, Path] = {}
    for path in paths:
        if path.name in seen:
            raise DuplicateImageName(
                f"duplicate image basename {path.name!r} ({seen[path.name]} and {path})"
            )
        seen[path.name] = path
    return paths


def extract_embeddings(config: ExtractionConfig) -> ExtractionSummary:
    """Embed every image under ``config.images`` and write one JSONL row per
    image, keyed by basename, in sorted path order. Unreadable images are
    skipped with a warning and counted in the summary."""
    paths = _scan_images(config.images)
    if not paths:
        raise FileNotFoundError(f"no images found under {config.images}")
    extractor = FeatureExtractor(config)

    summary = ExtractionSummary()
    pending: list[tuple[str, torch.Tensor]] = []
    config.out.parent.mkdir(parents=True, exist_ok=True)
    with open(config.out, "w", encoding="utf-8", newline="\n") as fh:

        def flush():
            if not pending:
                return
            vectors = extractor.embed_batch([tensor for _, tensor in pending])
            if not np.isfinite(vectors).all():
                raise ValueError("backbone produced non-finite embedding values")
            for (name, _), vec in zip(pending, vectors):
                row = {"item_id": name, "embedding": [float(x) for x in vec]}
                fh.write(json.dumps(row) + "\n")
                summary.written += 1
            pending.clear()

        for path in paths:
            try:
                with Image.open(path) as img:
                    img.load()
                    mask = None
                    if config.masks is not None:
                        mask_path = find_mask_for(path, config.masks)
                        if mask_path is None:
                            warnings.warn(f"no mask for {path.name}; embedding unmasked image")
                        else:
                            mask = load_label_image(mask_path)
                    tensor = extractor.prepare(img, mask)
            except (OSError, UnidentifiedImageError) as exc:
                warnings.warn(f"skipping unreadable image {path} ({exc})")
                summary.skipped.append(path.name)
                continue
            pending.append((path.name, tensor))
            if len(pending) >= config.batch_size:
                flush()
        flush()
    return summary
