"""Command-line front end: train models, evaluate protocols, classify single
images, and emit benchmark tables.

Exit statuses: 0 success, 1 internal failure, 2 usage/input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import model as mdl
from . import modelstore, pca2d
from .classifier import GalleryEntry, classify
from .datasets import (DatasetError, LabeledImage, SplitProtocol, load_dataset,
                       loo_sweep, split)
from .imgio import decode_pgm

DATA_ROOT_ENV = "HOGFACE_DATA_ROOT"

CSV_COLUMNS = ["dataset", "protocol", "method", "bins", "dim", "train_size",
               "test_size", "accuracy", "correct", "feature_shape",
               "model_bytes", "train_seconds", "test_seconds_per_image"]


@dataclass
class BenchRow:
    dataset: str
    protocol: str
    method: str
    bins: int
    dim: int
    train_size: int
    test_size: int
    accuracy: float
    correct: int
    feature_shape: str
    model_bytes: int
    train_seconds: float
    test_seconds_per_image: float

    def as_csv(self) -> list[str]:
        return [self.dataset, self.protocol, self.method, str(self.bins),
                str(self.dim), str(self.train_size), str(self.test_size),
                f"{self.accuracy:.6f}", str(self.correct), self.feature_shape,
                str(self.model_bytes), f"{self.train_seconds:.3f}",
                f"{self.test_seconds_per_image:.6f}"]


def _parse_protocol(name: str) -> SplitProtocol | str:
    if name == "loo":
        return "loo"
    if name.startswith("first") and name[5:].isdigit():
        return SplitProtocol.first_k_train(int(name[5:]))
    raise ValueError(f"unknown protocol {name!r} (use firstK, e.g. first5, or loo)")


def _maybe_shuffle(dataset: list[LabeledImage], seed: int | None) -> list[LabeledImage]:
    """Reassign within-class indices by a seeded shuffle (robustness runs)."""
    if seed is None:
        return dataset
    rng = random.Random(seed)
    by_label: dict[str, list[LabeledImage]] = {}
    for li in dataset:
        by_label.setdefault(li.label, []).append(li)
    out = []
    for label in sorted(by_label):
        group = by_label[label][:]
        rng.shuffle(group)
        out.extend(replace_index(li, i + 1) for i, li in enumerate(group))
    return out


def replace_index(li: LabeledImage, index: int) -> LabeledImage:
    return LabeledImage(li.label, index, li.image, li.path)


def evaluate_split(m: mdl.Model, test: list[LabeledImage], jobs: int = 1) -> tuple[int, float]:
    """Classify every test image; return (correct count, seconds per image)."""
    start = time.perf_counter()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda li: mdl.classify_image(m, li.image), test))
    else:
        results = [mdl.classify_image(m, li.image) for li in test]
    elapsed = time.perf_counter() - start
    correct = sum(r.label == li.label for r, li in zip(results, test))
    return correct, elapsed / max(len(test), 1)


def run_protocol(dataset: list[LabeledImage], protocol_name: str, cfg: mdl.PipelineConfig,
                 jobs: int = 1) -> tuple[BenchRow, mdl.Model | None]:
    """Train and evaluate one protocol; loo means the full leave-one-out sweep."""
    proto = _parse_protocol(protocol_name)
    if proto == "loo":
        t0 = time.perf_counter()
        correct = total = 0
        test_time = 0.0
        last_model = None
        for train_part, test_part in loo_sweep(dataset):
            last_model = mdl.train(train_part, cfg)
            c, per_img = evaluate_split(last_model, test_part, jobs=1)
            correct += c
            total += len(test_part)
            test_time += per_img * len(test_part)
        train_seconds = time.perf_counter() - t0 - test_time
        row = BenchRow("", protocol_name, "2dhog-2dpca", cfg.bins, cfg.dim,
                       len(dataset) - 1, total, correct / total, correct,
                       cfg.feature_shape, 0, train_seconds, test_time / total)
        return row, last_model
    train_part, test_part = split(dataset, proto)
    t0 = time.perf_counter()
    m = mdl.train(train_part, cfg)
    train_seconds = time.perf_counter() - t0
    correct, per_img = evaluate_split(m, test_part, jobs=jobs)
    row = BenchRow("", protocol_name, "2dhog-2dpca", cfg.bins, cfg.dim,
                   len(train_part), len(test_part), correct / len(test_part), correct,
                   cfg.feature_shape, 0, train_seconds, per_img)
    return row, m


def run_2dpca_baseline(dataset: list[LabeledImage], protocol_name: str,
                       cfg: mdl.PipelineConfig) -> BenchRow:
    """Plain 2DPCA row: the raw working image is the single layer, no HOG."""
    proto = _parse_protocol(protocol_name)
    if proto == "loo":
        raise ValueError("baseline rows support firstK protocols only")
    train_part, test_part = split(dataset, proto)
    t0 = time.perf_counter()
    stacks = [mdl.preprocess(li.image, cfg)[None, :, :] for li in train_part]
    bases = pca2d.train_bases(stacks, cfg.dim)
    gallery = [GalleryEntry(li.label, [pca2d.project(st[0], bases[0])], li.path)
               for li, st in zip(train_part, stacks)]
    train_seconds = time.perf_counter() - t0
    t0 = time.perf_counter()
    correct = 0
    for li in test_part:
        q = mdl.preprocess(li.image, cfg)[None, :, :]
        if classify(q, bases, gallery).label == li.label:
            correct += 1
    per_img = (time.perf_counter() - t0) / len(test_part)
    r, c = cfg.working_dims
    return BenchRow("", protocol_name, "2dpca", 1, cfg.dim, len(train_part),
                    len(test_part), correct / len(test_part), correct,
                    f"{r}x{c}", 0, train_seconds, per_img)


def _config_from_args(args) -> mdl.PipelineConfig:
    return mdl.PipelineConfig(
        image_rows=args.rows, image_cols=args.cols, use_dwt=not args.spatial,
        cell=args.cell, block=args.block, bins=args.bins, dim=args.dim,
        epsilon=args.epsilon)


def _load(args) -> list[LabeledImage]:
    root = args.data or os.environ.get(DATA_ROOT_ENV)
    if not root:
        raise DatasetError(f"no dataset root given (--data or ${DATA_ROOT_ENV})")
    return _maybe_shuffle(load_dataset(root, args.layout), args.seeded_shuffle)


def cmd_train(args) -> int:
    dataset = _load(args)
    proto = _parse_protocol(args.protocol)
    if proto == "loo":
        raise ValueError("train writes a single model; use a firstK protocol")
    cfg = _config_from_args(args)
    train_part, _ = split(dataset, proto)
    m = mdl.train(train_part, cfg)
    n = modelstore.save_model_file(m, args.out)
    print(f"trained on {len(train_part)} images, {len(set(e.label for e in m.gallery))} "
          f"classes; feature shape {cfg.feature_shape}; wrote {n} bytes to {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    dataset = _load(args)
    if args.model:
        m = modelstore.load_model_file(args.model)
        cfg = m.config
        proto = _parse_protocol(args.protocol)
        if proto == "loo":
            raise ValueError("--model evaluation supports firstK protocols only")
        _, test_part = split(dataset, proto)
        correct, per_img = evaluate_split(m, test_part, jobs=args.jobs)
        row = BenchRow(args.layout, args.protocol, "2dhog-2dpca", cfg.bins, cfg.dim,
                       len(m.gallery), len(test_part), correct / len(test_part),
                       correct, cfg.feature_shape, 0, 0.0, per_img)
    else:
        cfg = _config_from_args(args)
        row, _ = run_protocol(dataset, args.protocol, cfg, jobs=args.jobs)
        row.dataset = args.layout
    _print_rows([row])
    if args.csv:
        _write_csv([row], args.csv)
    return 0


def cmd_predict(args) -> int:
    m = modelstore.load_model_file(args.model)
    with open(args.image, "rb") as f:
        img = decode_pgm(f.read())
    result = mdl.classify_image(m, img)
    for label, score in mdl.rank_image(m, img, args.top):
        print(f"{label} {score:.6f} {result.votes.get(label, 0)} "
              f"{result.total_distance[label]:.6f}")
    return 0


def cmd_bench(args) -> int:
    if not args.protocols:
        raise ValueError("no protocols requested")
    rows: list[BenchRow] = []
    failures = 0
    for spec_item in args.datasets:
        name, _, root = spec_item.partition("=")
        layout = name if name in ("orl", "umist", "jaffe", "flat") else "flat"
        try:
            dataset = load_dataset(root or name, layout)
        except DatasetError as e:
            print(f"[{name}] load failed: {e}", file=sys.stderr)
            failures += 1
            continue
        for proto in args.protocols:
            try:
                cfg = _config_from_args(args)
                row, m = run_protocol(dataset, proto, cfg, jobs=args.jobs)
                row.dataset = name
                if m is not None and proto != "loo":
                    buf = io.BytesIO()
                    row.model_bytes = modelstore.save_model(m, buf)
                rows.append(row)
                if args.baseline_2dpca and proto != "loo":
                    base = run_2dpca_baseline(dataset, proto, cfg)
                    base.dataset = name
                    rows.append(base)
            except (ValueError, DatasetError) as e:
                print(f"[{name}/{proto}] failed: {e}", file=sys.stderr)
                failures += 1
    _print_rows(rows)
    if args.csv:
        _write_csv(rows, args.csv)
    return 0 if rows and not failures else (2 if not rows else 0)


def _print_rows(rows: list[BenchRow]) -> None:
    header = f"{'dataset':<8} {'protocol':<9} {'method':<12} {'shape':<10} " \
             f"{'train':>5} {'test':>5} {'accuracy':>8} {'s/img':>9}"
    print(header)
    for r in rows:
        print(f"{r.dataset:<8} {r.protocol:<9} {r.method:<12} {r.feature_shape:<10} "
              f"{r.train_size:>5} {r.test_size:>5} {r.accuracy:>8.4f} "
              f"{r.test_seconds_per_image:>9.4f}")


def _write_csv(rows: list[BenchRow], path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(r.as_csv())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hogface",
                                     description="Layered-HOG/2DPCA face recognition")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_feature_flags(p):
        p.add_argument("--rows", type=int, default=112)
        p.add_argument("--cols", type=int, default=96)
        p.add_argument("--spatial", action="store_true",
                       help="skip the wavelet step and work at full resolution")
        p.add_argument("--cell", type=int, default=4)
        p.add_argument("--block", type=int, default=2)
        p.add_argument("--bins", type=int, default=9)
        p.add_argument("--dim", type=int, default=10)
        p.add_argument("--epsilon", type=float, default=1e-5)

    def add_data_flags(p):
        p.add_argument("--data", help=f"dataset root (default ${DATA_ROOT_ENV})")
        p.add_argument("--layout", default="orl",
                       choices=["orl", "umist", "jaffe", "flat"])
        p.add_argument("--seeded-shuffle", type=int, default=None, metavar="SEED",
                       help="shuffle within-class image order before splitting")

    p = sub.add_parser("train", help="train a model and write it to disk")
    add_data_flags(p)
    add_feature_flags(p)
    p.add_argument("--protocol", default="first5")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="train/evaluate one protocol")
    add_data_flags(p)
    add_feature_flags(p)
    p.add_argument("--protocol", default="first5")
    p.add_argument("--model", help="evaluate an existing model instead of training")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="rank labels for a single PGM image")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="full benchmark table over datasets/protocols")
    p.add_argument("--datasets", nargs="+", required=True, metavar="NAME=ROOT",
                   help="e.g. orl=/data/orl umist=/data/umist")
    p.add_argument("--protocols", nargs="*", default=["first5", "first3", "loo"])
    add_feature_flags(p)
    p.add_argument("--baseline-2dpca", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, ValueError, OSError, modelstore.ModelLoadError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - internal failure path
        print(f"internal error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
