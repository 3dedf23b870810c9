"""End-to-end model: preprocessing config, per-bin bases, enrolled gallery."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import hog2d, imgio, pca2d
from .classifier import GalleryEntry, MatchResult, classify, rank
from .datasets import LabeledImage


@dataclass(frozen=True)
class PipelineConfig:
    """Geometry and feature parameters shared by training and querying."""

    image_rows: int = 112
    image_cols: int = 96
    use_dwt: bool = True
    cell: int = 4
    block: int = 2
    bins: int = 9
    dim: int = 10
    epsilon: float = 1e-5

    def __post_init__(self):
        if self.image_rows < 2 or self.image_cols < 2:
            raise ValueError(f"image dims must be >= 2, got "
                             f"{self.image_rows}x{self.image_cols}")
        if self.use_dwt and (self.image_rows % 2 or self.image_cols % 2):
            raise ValueError("image dims must be even when the wavelet step is enabled")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        self.hog  # validates bins/cell/block/epsilon
        r, c = self.working_dims
        self.hog.check_dims(r, c)
        if self.dim > self.layer_dims[1]:
            raise ValueError(f"dim {self.dim} exceeds layer width {self.layer_dims[1]}")

    @property
    def working_dims(self) -> tuple[int, int]:
        if self.use_dwt:
            return self.image_rows // 2, self.image_cols // 2
        return self.image_rows, self.image_cols

    @property
    def hog(self) -> hog2d.HogConfig:
        return hog2d.HogConfig(bins=self.bins, cell=self.cell, block=self.block,
                               epsilon=self.epsilon)

    @property
    def layer_dims(self) -> tuple[int, int]:
        r, c = self.working_dims
        return r // self.cell, c // self.cell

    @property
    def feature_shape(self) -> str:
        r, c = self.layer_dims
        return f"{r}x{c}x{self.bins}"


@dataclass(eq=False)
class Model:
    config: PipelineConfig
    bases: list[pca2d.ProjectionBasis]
    gallery: list[GalleryEntry]


def preprocess(img: np.ndarray, cfg: PipelineConfig) -> np.ndarray:
    """Resize to the configured geometry; take the Haar LL subband if enabled."""
    out = imgio.resize_to(img, cfg.image_rows, cfg.image_cols)
    if cfg.use_dwt:
        out = imgio.haar_dwt_ll(out)
    return out


def extract_layers(img: np.ndarray, cfg: PipelineConfig) -> np.ndarray:
    return hog2d.extract(preprocess(img, cfg), cfg.hog)


def train(train_images: list[LabeledImage], cfg: PipelineConfig) -> Model:
    """Train per-bin bases on the given images and enroll them all."""
    stacks = [extract_layers(li.image, cfg) for li in train_images]
    bases = pca2d.train_bases(stacks, cfg.dim)
    gallery = [
        GalleryEntry(
            label=li.label,
            features=[pca2d.project(stack[b], bases[b]) for b in range(cfg.bins)],
            source_id=li.path or f"{li.label}/{li.index_within_class}",
        )
        for li, stack in zip(train_images, stacks)
    ]
    return Model(config=cfg, bases=bases, gallery=gallery)


def classify_image(model: Model, img: np.ndarray) -> MatchResult:
    return classify(extract_layers(img, model.config), model.bases, model.gallery)


def rank_image(model: Model, img: np.ndarray, k: int) -> list[tuple[str, float]]:
    return rank(extract_layers(img, model.config), model.bases, model.gallery, k)


def with_dim(cfg: PipelineConfig, dim: int) -> PipelineConfig:
    return replace(cfg, dim=dim)
