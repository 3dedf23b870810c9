"""Benchmark dataset loading and train/test split protocols.

Supported on-disk layouts:
  orl   — subdirectories s1..s40, each holding 1.pgm..10.pgm
  umist — one subdirectory per subject, any number of PGM files
  jaffe — flat directory; the label is the filename up to the first '.'
  flat  — same rule as jaffe, for any "<label>.<anything>.<ext>" collection
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imgio import decode_pgm


class DatasetError(RuntimeError):
    """Dataset missing, empty, or unreadable."""


@dataclass(frozen=True, eq=False)
class LabeledImage:
    label: str
    index_within_class: int
    image: np.ndarray
    path: str


@dataclass(frozen=True)
class SplitProtocol:
    """first_k_train(k): per class, the first k images by index train.
    leave_one_out(i): per class, image i tests, the rest train."""

    kind: str
    param: int

    @staticmethod
    def first_k_train(k: int) -> "SplitProtocol":
        return SplitProtocol("first_k_train", k)

    @staticmethod
    def leave_one_out(held_index: int) -> "SplitProtocol":
        return SplitProtocol("leave_one_out", held_index)


_NUM_SUFFIX = re.compile(r"(\d+)")


def _numeric_key(name: str) -> tuple:
    # "s10" sorts after "s2"; mixed alpha/numeric split into comparable runs
    parts = _NUM_SUFFIX.split(name)
    return tuple(int(p) if p.isdigit() else p for p in parts)


def _read_pgm_file(path: Path) -> np.ndarray:
    try:
        return decode_pgm(path.read_bytes())
    except (OSError, ValueError) as e:
        raise DatasetError(f"cannot read {path}: {e}") from e


def load_dataset(root: str | Path, layout: str) -> list[LabeledImage]:
    """Load all images under root per the named layout, sorted by (label, index)."""
    root = Path(root)
    if layout not in ("orl", "umist", "jaffe", "flat"):
        raise DatasetError(f"unrecognized layout {layout!r}")
    if not root.is_dir():
        raise DatasetError(f"dataset root {root} does not exist")

    images: list[LabeledImage] = []
    if layout in ("orl", "umist"):
        subdirs = sorted([d for d in root.iterdir() if d.is_dir()],
                         key=lambda d: _numeric_key(d.name))
        for sub in subdirs:
            files = sorted(sub.glob("*.pgm"), key=lambda f: _numeric_key(f.stem))
            for i, f in enumerate(files, start=1):
                images.append(LabeledImage(sub.name, i, _read_pgm_file(f), str(f)))
    else:
        files = sorted(
            [f for f in root.iterdir() if f.is_file() and f.suffix.lower() == ".pgm"],
            key=lambda f: _numeric_key(f.name))
        counters: dict[str, int] = {}
        for f in files:
            label = f.name.split(".", 1)[0]
            counters[label] = counters.get(label, 0) + 1
            images.append(LabeledImage(label, counters[label], _read_pgm_file(f), str(f)))

    if not images:
        raise DatasetError(f"no images found under {root} (layout {layout})")
    images.sort(key=lambda li: (_numeric_key(li.label), li.index_within_class))
    return images


def class_sizes(dataset: list[LabeledImage]) -> dict[str, int]:
    sizes: dict[str, int] = {}
    for li in dataset:
        sizes[li.label] = sizes.get(li.label, 0) + 1
    return sizes


def split(dataset: list[LabeledImage],
          protocol: SplitProtocol) -> tuple[list[LabeledImage], list[LabeledImage]]:
    """Partition a dataset into disjoint (train, test) lists per the protocol."""
    sizes = class_sizes(dataset)
    if protocol.kind == "first_k_train":
        k = protocol.param
        for label, size in sizes.items():
            if not 1 <= k < size:
                raise ValueError(
                    f"first_k_train({k}) invalid for class {label!r} of size {size}")
        train = [li for li in dataset if li.index_within_class <= k]
        test = [li for li in dataset if li.index_within_class > k]
    elif protocol.kind == "leave_one_out":
        held = protocol.param
        for label, size in sizes.items():
            if not 1 <= held <= size:
                raise ValueError(
                    f"leave_one_out({held}) out of range for class {label!r} of size {size}")
        train = [li for li in dataset if li.index_within_class != held]
        test = [li for li in dataset if li.index_within_class == held]
    else:
        raise ValueError(f"unknown protocol kind {protocol.kind!r}")
    return train, test


def loo_sweep(dataset: list[LabeledImage]):
    """Yield one (train, test) fold per image, holding out exactly that image."""
    sizes = class_sizes(dataset)
    for label, size in sizes.items():
        if size < 2:
            raise ValueError(f"class {label!r} has a single image; cannot leave one out")
    for held in dataset:
        train = [li for li in dataset if li is not held]
        yield train, [held]
