"""Synthetic demo data: reproducible fake faces, dataset trees, and a
trained model for trying the CLI and portal without a real face database.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from . import model as mdl
from .datasets import LabeledImage, SplitProtocol, split
from .imgio import encode_pgm, resize_to
from .modelstore import save_model_file


def synthetic_face(rng: np.random.Generator, rows: int = 112, cols: int = 92) -> np.ndarray:
    """A smooth random 'identity': low-res noise upsampled to face geometry."""
    low = rng.uniform(0.0, 255.0, (8, 7))
    return resize_to(low, rows, cols)


def synthetic_variant(rng: np.random.Generator, base: np.ndarray) -> np.ndarray:
    """A same-person capture: additive noise plus a global brightness shift."""
    noisy = base + rng.normal(0.0, 6.0, base.shape) + rng.uniform(-10, 10)
    return np.clip(noisy, 0.0, 255.0)


def make_labeled_images(seed: int, persons: int, per_person: int,
                        rows: int = 112, cols: int = 92) -> list[LabeledImage]:
    rng = np.random.default_rng(seed)
    out = []
    for p in range(persons):
        base = synthetic_face(rng, rows, cols)
        for i in range(per_person):
            out.append(LabeledImage(f"s{p + 1}", i + 1,
                                    synthetic_variant(rng, base),
                                    f"s{p + 1}/{i + 1}.pgm"))
    return out


def write_dataset_tree(images: list[LabeledImage], root: Path, layout: str) -> Path:
    """Write images as PGM files in the given on-disk layout."""
    root.mkdir(parents=True, exist_ok=True)
    for li in images:
        if layout in ("orl", "umist"):
            sub = root / li.label
            sub.mkdir(exist_ok=True)
            path = sub / f"{li.index_within_class}.pgm"
        else:
            path = root / f"{li.label}.{li.index_within_class}.pgm"
        path.write_bytes(encode_pgm(li.image))
    return root


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hogface-demo",
        description="generate a synthetic dataset tree and a trained model")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--persons", type=int, default=8)
    parser.add_argument("--per-person", type=int, default=4)
    parser.add_argument("--seed", type=int, default=12)
    args = parser.parse_args(argv)

    out = Path(args.out)
    images = make_labeled_images(args.seed, args.persons, args.per_person)
    write_dataset_tree(images, out / "dataset", "orl")
    train_part, _ = split(images, SplitProtocol.first_k_train(
        max(2, args.per_person - 1)))
    model_path = out / "demo.2dhg"
    save_model_file(mdl.train(train_part, mdl.PipelineConfig()), model_path)
    print(f"wrote {out / 'dataset'} ({len(images)} images) and {model_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
