"""Layered oriented-gradient features: per-pixel gradients, soft orientation
binning, cell aggregation, per-block L2 normalization, and assembly into B
spatial layer matrices (one per orientation bin).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HogConfig:
    """Layer extraction parameters.

    bins: number of unsigned-orientation bins over [0, 180) degrees.
    cell: pixels per cell side; block: cells per (non-overlapping) block side.
    epsilon: additive constant under the normalization root.
    """

    bins: int = 9
    cell: int = 4
    block: int = 2
    epsilon: float = 1e-5

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if self.cell < 2:
            raise ValueError(f"cell must be >= 2, got {self.cell}")
        if self.block < 1:
            raise ValueError(f"block must be >= 1, got {self.block}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    def check_dims(self, rows: int, cols: int) -> None:
        tile = self.cell * self.block
        if rows % tile or cols % tile:
            raise ValueError(
                f"image dims {rows}x{cols} not divisible by cell*block = {tile}")


def gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centered-difference gradients (gx, gy) with replicate border."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or min(img.shape) < 2:
        raise ValueError(f"need a 2-D image with dims >= 2, got shape {img.shape}")
    padded = np.pad(img, 1, mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    return gx, gy


def orientation_magnitude(gx: np.ndarray, gy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polar form of a gradient field: angle in degrees in [0, 180), magnitude.

    Angle is defined as 0 wherever the magnitude is 0.
    """
    mag = np.hypot(gx, gy)
    theta = np.degrees(np.arctan2(gy, gx)) % 180.0
    theta[mag == 0] = 0.0
    return theta, mag


def cell_histograms(theta: np.ndarray, mag: np.ndarray, cfg: HogConfig) -> np.ndarray:
    """Per-cell orientation histograms, shape (cell_rows, cell_cols, bins).

    Each pixel's magnitude is split linearly between the two bins whose
    centers bracket its angle, wrapping circularly across 0/180. Bin centers
    sit at (k + 0.5) * (180 / bins).
    """
    rows, cols = theta.shape
    if rows % cfg.cell or cols % cfg.cell:
        raise ValueError(f"image dims {rows}x{cols} not divisible by cell {cfg.cell}")
    width = 180.0 / cfg.bins

    pos = theta / width - 0.5
    lo = np.floor(pos)
    frac = pos - lo
    bin_lo = lo.astype(int) % cfg.bins
    bin_hi = (bin_lo + 1) % cfg.bins

    votes = np.zeros((rows, cols, cfg.bins))
    rr, cc = np.indices(theta.shape)
    votes[rr, cc, bin_lo] = mag * (1.0 - frac)
    votes[rr, cc, bin_hi] += mag * frac

    cr, cx = rows // cfg.cell, cols // cfg.cell
    return votes.reshape(cr, cfg.cell, cx, cfg.cell, cfg.bins).sum(axis=(1, 3))


def block_normalize(cells: np.ndarray, cfg: HogConfig) -> np.ndarray:
    """L2-normalize each disjoint block x block group of cells jointly.

    The concatenated vector v of a block's bin values becomes
    v / sqrt(|v|^2 + epsilon^2); a zero block stays exactly zero.
    """
    cr, cx, bins = cells.shape
    if cr % cfg.block or cx % cfg.block:
        raise ValueError(f"cell grid {cr}x{cx} not divisible by block {cfg.block}")
    b = cfg.block
    grouped = cells.reshape(cr // b, b, cx // b, b, bins)
    sq = (grouped ** 2).sum(axis=(1, 3, 4), keepdims=True)
    return (grouped / np.sqrt(sq + cfg.epsilon ** 2)).reshape(cr, cx, bins)


def to_layers(cells: np.ndarray, cfg: HogConfig) -> np.ndarray:
    """Rearrange a (cell_rows, cell_cols, bins) tensor into bins-first layers.

    Layer b is the cell_rows x cell_cols matrix of bin-b values; spatial
    cell adjacency is preserved.
    """
    if cells.ndim != 3 or cells.shape[2] != cfg.bins:
        raise ValueError(f"expected (cr, cc, {cfg.bins}) tensor, got shape {cells.shape}")
    return np.ascontiguousarray(np.moveaxis(cells, 2, 0))


def extract(img: np.ndarray, cfg: HogConfig | None = None) -> np.ndarray:
    """Full extraction: image -> (bins, cell_rows, cell_cols) layer stack."""
    cfg = cfg or HogConfig()
    img = np.asarray(img, dtype=np.float64)
    cfg.check_dims(*img.shape)
    gx, gy = gradients(img)
    theta, mag = orientation_magnitude(gx, gy)
    cells = cell_histograms(theta, mag, cfg)
    return to_layers(block_normalize(cells, cfg), cfg)
