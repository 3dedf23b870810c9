"""Bit-exact binary serialization of trained models.

Layout (all integers little-endian, reals IEEE-754 f64 little-endian):

  magic "2DHG" | version u32 | config: image_rows u32, image_cols u32,
  dwt_flag u32, cell u32, block u32, bins u32, dim u32, epsilon f64 |
  bins basis matrices | entry_count u32 | entries: label (u32 length +
  UTF-8), source_id (u32 length + UTF-8), bins feature matrices.

Matrices are (rows u32, cols u32) followed by row-major f64 data. The file
ends with a u64 checksum: sum of all preceding bytes modulo 2^64.
"""

from __future__ import annotations

import io
import os
import struct
from pathlib import Path

import numpy as np

from .classifier import GalleryEntry
from .model import Model, PipelineConfig
from .pca2d import ProjectionBasis

MAGIC = b"2DHG"
VERSION = 1
FILE_EXTENSION = ".2dhg"


class ModelLoadError(ValueError):
    """Model stream is malformed, corrupted, or inconsistent."""


def _pack_matrix(m: np.ndarray) -> bytes:
    m = np.ascontiguousarray(m, dtype="<f8")
    return struct.pack("<II", m.shape[0], m.shape[1]) + m.tobytes()


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def save_model(model: Model, sink: io.RawIOBase) -> int:
    """Serialize a model. Returns the byte count written."""
    cfg = model.config
    for entry in model.gallery:
        if len(entry.features) != cfg.bins:
            raise ValueError(f"entry {entry.source_id!r} has {len(entry.features)} "
                             f"feature matrices, config says {cfg.bins}")
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<I", VERSION)
    buf += struct.pack("<7I", cfg.image_rows, cfg.image_cols, int(cfg.use_dwt),
                       cfg.cell, cfg.block, cfg.bins, cfg.dim)
    buf += struct.pack("<d", cfg.epsilon)
    for basis in model.bases:
        buf += _pack_matrix(basis.X)
    buf += struct.pack("<I", len(model.gallery))
    for entry in model.gallery:
        buf += _pack_str(entry.label)
        buf += _pack_str(entry.source_id)
        for feat in entry.features:
            buf += _pack_matrix(feat)
    buf += struct.pack("<Q", sum(buf) % 2 ** 64)
    sink.write(bytes(buf))
    return len(buf)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise ModelLoadError(f"truncated stream while reading {what} "
                                 f"at byte offset {self.pos}")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]

    def f64(self, what: str) -> float:
        return struct.unpack("<d", self.take(8, what))[0]

    def matrix(self, what: str) -> np.ndarray:
        rows = self.u32(f"{what} rows")
        cols = self.u32(f"{what} cols")
        if rows > 1 << 20 or cols > 1 << 20:
            raise ModelLoadError(f"implausible {what} dims {rows}x{cols}")
        raw = self.take(rows * cols * 8, f"{what} data")
        return np.frombuffer(raw, dtype="<f8").reshape(rows, cols).copy()

    def string(self, what: str) -> str:
        n = self.u32(f"{what} length")
        try:
            return self.take(n, what).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ModelLoadError(f"invalid UTF-8 in {what}: {e}") from None


def load_model(source: io.RawIOBase | bytes) -> Model:
    """Deserialize and validate a model; never returns a partial model."""
    data = source if isinstance(source, (bytes, bytearray)) else source.read()
    data = bytes(data)
    if len(data) < 12:
        raise ModelLoadError("stream too short for header")
    if data[:4] != MAGIC:
        raise ModelLoadError(f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    if len(data) < 8 + 8:
        raise ModelLoadError("truncated stream (no checksum)")
    body, (checksum,) = data[:-8], struct.unpack("<Q", data[-8:])
    if sum(body) % 2 ** 64 != checksum:
        raise ModelLoadError("checksum mismatch")

    rd = _Reader(body)
    rd.take(4, "magic")
    version = rd.u32("version")
    if version != VERSION:
        raise ModelLoadError(f"unsupported version {version}, expected {VERSION}")
    rows, cols, dwt, cell, block, bins, dim = (rd.u32("config") for _ in range(7))
    epsilon = rd.f64("epsilon")
    try:
        cfg = PipelineConfig(image_rows=rows, image_cols=cols, use_dwt=bool(dwt),
                             cell=cell, block=block, bins=bins, dim=dim, epsilon=epsilon)
    except ValueError as e:
        raise ModelLoadError(f"invalid config: {e}") from None

    bases = []
    for b in range(bins):
        x = rd.matrix(f"basis {b}")
        if x.shape[1] != dim:
            raise ModelLoadError(f"basis {b} has {x.shape[1]} columns, config dim is {dim}")
        bases.append(ProjectionBasis(X=x, eigenvalues=np.zeros(x.shape[1])))

    entries = []
    count = rd.u32("entry count")
    if count > 1 << 24:
        raise ModelLoadError(f"implausible entry count {count}")
    for i in range(count):
        label = rd.string(f"entry {i} label")
        source_id = rd.string(f"entry {i} source_id")
        feats = [rd.matrix(f"entry {i} bin {b}") for b in range(bins)]
        for b, f in enumerate(feats):
            if f.shape != feats[0].shape:
                raise ModelLoadError(f"entry {i} bin {b} shape {f.shape} "
                                     f"differs from bin 0 {feats[0].shape}")
            if f.shape[1] != dim:
                raise ModelLoadError(f"entry {i} bin {b} has {f.shape[1]} columns, "
                                     f"config dim is {dim}")
        entries.append(GalleryEntry(label=label, features=feats, source_id=source_id))
    if rd.pos != len(body):
        raise ModelLoadError(f"{len(body) - rd.pos} trailing bytes after gallery")
    return Model(config=cfg, bases=bases, gallery=entries)


def save_model_file(model: Model, path: str | Path) -> int:
    """Write atomically: temp file in the same directory, then rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        n = save_model(model, f)
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp, path)
    return n


def load_model_file(path: str | Path) -> Model:
    with open(path, "rb") as f:
        return load_model(f)
