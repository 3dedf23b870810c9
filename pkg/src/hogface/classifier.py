"""Per-bin minimum-distance matching with cross-bin majority voting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pca2d import ProjectionBasis, project


@dataclass(frozen=True, eq=False)
class GalleryEntry:
    """One enrolled training image: label plus its per-bin projected features."""

    label: str
    features: list[np.ndarray]
    source_id: str = ""


@dataclass(frozen=True, eq=False)
class MatchResult:
    label: str
    votes: dict[str, int]
    per_bin: list[tuple[str, float]]
    total_distance: dict[str, float]


class GalleryError(RuntimeError):
    """Gallery/bases inconsistent with the query, or empty."""


def bin_distance(y1: np.ndarray, y2: np.ndarray) -> float:
    """Sum of column-wise L2 norms of the difference of projected matrices."""
    if y1.shape != y2.shape:
        raise ValueError(f"feature shapes differ: {y1.shape} vs {y2.shape}")
    return float(np.sqrt(((y1 - y2) ** 2).sum(axis=0)).sum())


def bin_vote(query: np.ndarray, gallery: list[GalleryEntry], bin_idx: int) -> tuple[str, float]:
    """Label and distance of the gallery entry nearest the query at one bin.

    Ties go to the earlier gallery entry.
    """
    if not gallery:
        raise GalleryError("empty gallery")
    best_label, best_dist = "", np.inf
    for entry in gallery:
        d = bin_distance(query, entry.features[bin_idx])
        if d < best_dist:
            best_label, best_dist = entry.label, d
    return best_label, best_dist


def _project_query(query: np.ndarray, bases: list[ProjectionBasis]) -> list[np.ndarray]:
    if len(bases) != query.shape[0]:
        raise GalleryError(f"query has {query.shape[0]} layers but {len(bases)} bases")
    return [project(query[b], bases[b]) for b in range(len(bases))]


def classify(query: np.ndarray, bases: list[ProjectionBasis],
             gallery: list[GalleryEntry]) -> MatchResult:
    """Assign a label to a (bins, H, W) layer stack.

    Each bin votes for the label of its nearest entry; the majority label
    wins. Ties break by minimal total distance, then lexicographic label.
    Per-class total distance sums each bin's distance to that class's
    nearest entry, so classes with many enrolled images are not penalized.
    """
    if not gallery:
        raise GalleryError("empty gallery")
    n_bins = query.shape[0]
    for entry in gallery:
        if len(entry.features) != n_bins:
            raise GalleryError(
                f"entry {entry.source_id!r} has {len(entry.features)} bins, query has {n_bins}")
    projected = _project_query(query, bases)
    for b in range(n_bins):
        if projected[b].shape != gallery[0].features[b].shape:
            raise GalleryError(
                f"bin {b}: projected query shape {projected[b].shape} != "
                f"gallery feature shape {gallery[0].features[b].shape}")

    votes: dict[str, int] = {}
    total: dict[str, float] = {}
    per_bin: list[tuple[str, float]] = []
    for b in range(n_bins):
        winner, winner_d = "", np.inf
        class_best: dict[str, float] = {}
        for entry in gallery:
            d = bin_distance(projected[b], entry.features[b])
            if d < winner_d:
                winner, winner_d = entry.label, d
            if d < class_best.get(entry.label, np.inf):
                class_best[entry.label] = d
        per_bin.append((winner, winner_d))
        votes[winner] = votes.get(winner, 0) + 1
        for label, d in class_best.items():
            total[label] = total.get(label, 0.0) + d

    best = min(votes, key=lambda lb: (-votes[lb], total[lb], lb))
    return MatchResult(label=best, votes=votes, per_bin=per_bin, total_distance=total)


def rank(query: np.ndarray, bases: list[ProjectionBasis], gallery: list[GalleryEntry],
         k: int) -> list[tuple[str, float]]:
    """Top-k classes ordered by (votes desc, total distance asc, label).

    The score, votes + 1/(1 + total_distance), is for display only; the
    ordering key is the tuple above.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    result = classify(query, bases, gallery)
    labels = sorted(result.total_distance,
                    key=lambda lb: (-result.votes.get(lb, 0), result.total_distance[lb], lb))
    return [(lb, result.votes.get(lb, 0) + 1.0 / (1.0 + result.total_distance[lb]))
            for lb in labels[:k]]
