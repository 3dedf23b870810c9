"""Grayscale image I/O and geometry: PGM decode/encode, bilinear resize,
single-level Haar LL subband.

Images are plain 2-D float64 numpy arrays (rows x cols, row-major).
"""

from __future__ import annotations

import numpy as np


class PgmError(ValueError):
    """Raised when a PGM byte stream cannot be decoded."""


def _validate_image(img: np.ndarray, what: str = "image") -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 2 or img.shape[1] < 2:
        raise ValueError(f"{what} must be a 2-D array with dims >= 2x2, got shape {img.shape}")
    return img


def decode_pgm(data: bytes) -> np.ndarray:
    """Decode a binary (P5) or ASCII (P2) PGM byte stream.

    Intensities are returned as decoded, without rescaling. 16-bit samples
    are read big-endian per the Netpbm convention.
    """
    if not isinstance(data, (bytes, bytearray, memoryview)):
        raise PgmError("expected a byte sequence")
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"unsupported magic {magic!r} at byte offset 0")

    pos = 2
    tokens: list[int] = []
    # Header: width, height, maxval, separated by whitespace; '#' starts a comment.
    while len(tokens) < 3:
        if pos >= len(data):
            raise PgmError(f"truncated header at byte offset {pos}")
        c = data[pos]
        if c in b" \t\r\n":
            pos += 1
        elif c == ord("#"):
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        elif ord("0") <= c <= ord("9"):
            start = pos
            while pos < len(data) and ord("0") <= data[pos] <= ord("9"):
                pos += 1
            tokens.append(int(data[start:pos]))
        else:
            raise PgmError(f"malformed header at byte offset {pos}")
    cols, rows, maxval = tokens
    if cols < 1 or rows < 1:
        raise PgmError(f"non-positive dimensions {cols}x{rows} in header (offset {pos})")
    if not 0 < maxval <= 65535:
        raise PgmError(f"maxval {maxval} out of range (offset {pos})")

    n = rows * cols
    if magic == b"P5":
        if pos >= len(data) or data[pos] not in b" \t\r\n":
            raise PgmError(f"missing whitespace after maxval at byte offset {pos}")
        pos += 1
        wide = maxval > 255
        need = n * (2 if wide else 1)
        payload = data[pos : pos + need]
        if len(payload) < need:
            raise PgmError(f"truncated pixel payload at byte offset {pos + len(payload)}")
        dt = np.dtype(">u2") if wide else np.dtype("u1")
        pixels = np.frombuffer(payload, dtype=dt).astype(np.float64)
    else:
        try:
            text = data[pos:].decode("ascii")
        except UnicodeDecodeError as e:
            raise PgmError(f"non-ASCII sample data at byte offset {pos + e.start}") from None
        # Strip comments before tokenizing.
        lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
        fields = " ".join(lines).split()
        if len(fields) < n:
            raise PgmError(f"truncated pixel payload at byte offset {len(data)} "
                           f"({len(fields)} of {n} samples)")
        try:
            pixels = np.array([int(f) for f in fields[:n]], dtype=np.float64)
        except ValueError:
            raise PgmError(f"malformed ASCII sample near byte offset {pos}") from None

    if pixels.max(initial=0) > maxval:
        raise PgmError(f"sample exceeds maxval {maxval}")
    return pixels.reshape(rows, cols)


def encode_pgm(img: np.ndarray, maxval: int = 255) -> bytes:
    """Encode an image as binary (P5) PGM. Values are rounded and clipped."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected 2-D image, got shape {img.shape}")
    if not 0 < maxval <= 65535:
        raise ValueError(f"maxval {maxval} out of range")
    rows, cols = img.shape
    samples = np.clip(np.rint(img), 0, maxval)
    header = f"P5\n{cols} {rows}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        return header + samples.astype(">u2").tobytes()
    return header + samples.astype("u1").tobytes()


def resize_to(img: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Bilinear resize with corner-aligned sampling and edge clamping."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or min(img.shape) < 1:
        raise ValueError(f"expected a nonempty 2-D image, got shape {img.shape}")
    if rows < 1 or cols < 1:
        raise ValueError(f"target dims must be positive, got {rows}x{cols}")
    src_r, src_c = img.shape
    if (rows, cols) == (src_r, src_c):
        return img.copy()

    # Corner-aligned: output corners sample input corners exactly.
    rr = np.arange(rows) * ((src_r - 1) / (rows - 1)) if rows > 1 else np.zeros(1)
    cc = np.arange(cols) * ((src_c - 1) / (cols - 1)) if cols > 1 else np.zeros(1)
    r0 = np.clip(np.floor(rr).astype(int), 0, src_r - 1)
    c0 = np.clip(np.floor(cc).astype(int), 0, src_c - 1)
    r1 = np.minimum(r0 + 1, src_r - 1)
    c1 = np.minimum(c0 + 1, src_c - 1)
    fr = (rr - r0)[:, None]
    fc = (cc - c0)[None, :]

    top = img[r0][:, c0] * (1 - fc) + img[r0][:, c1] * fc
    bot = img[r1][:, c0] * (1 - fc) + img[r1][:, c1] * fc
    return top * (1 - fr[:, 0])[:, None] + bot * fr[:, 0][:, None]


def haar_dwt_ll(img: np.ndarray) -> np.ndarray:
    """LL (approximation) subband of a single-level 2-D Haar decomposition.

    Uses block-average normalization: each output pixel is the mean of a
    disjoint 2x2 input block, so intensities stay in the input's range.
    """
    img = _validate_image(img)
    rows, cols = img.shape
    if rows % 2 or cols % 2:
        raise ValueError(f"dims must be even for the 2x2 decomposition, got {rows}x{cols}")
    return img.reshape(rows // 2, 2, cols // 2, 2).mean(axis=(1, 3))
