"""Two-dimensional PCA on matrices: column-space covariance, top
eigenvectors via cyclic Jacobi rotations, projection. Applied independently
per orientation bin by train_bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class ImageCovariance:
    """Symmetric PSD W x W covariance of matrix samples' column space."""

    G: np.ndarray
    sample_count: int


@dataclass(frozen=True, eq=False)
class ProjectionBasis:
    """Orthonormal columns spanning the top-d eigenspace, eigenvalues nonincreasing."""

    X: np.ndarray
    eigenvalues: np.ndarray

    @property
    def dim(self) -> int:
        return self.X.shape[1]


def mean_matrix(samples: list[np.ndarray]) -> np.ndarray:
    """Entrywise mean of equally-shaped matrices."""
    if len(samples) == 0:
        raise ValueError("need at least one sample")
    shape = samples[0].shape
    for i, s in enumerate(samples):
        if s.shape != shape:
            raise ValueError(f"sample {i} has shape {s.shape}, expected {shape}")
    acc = np.zeros(shape)
    for s in samples:
        acc += s
    return acc / len(samples)


def image_covariance(samples: list[np.ndarray], mean: np.ndarray) -> ImageCovariance:
    """G = (1/M) sum_j (A_j - mean)^T (A_j - mean), symmetrized against round-off."""
    if len(samples) == 0:
        raise ValueError("need at least one sample")
    for i, s in enumerate(samples):
        if s.shape != mean.shape:
            raise ValueError(f"sample {i} has shape {s.shape}, mean has {mean.shape}")
    w = mean.shape[1]
    acc = np.zeros((w, w))
    for s in samples:
        d = s - mean
        acc += d.T @ d
    g = acc / len(samples)
    g = (g + g.T) / 2.0
    return ImageCovariance(G=g, sample_count=len(samples))


def _jacobi_eigh(g: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm drops below 1e-12 * |G|_F.
    Returns (eigenvalues, eigenvectors as columns), unsorted.
    """
    a = np.array(g, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n), v
    tol = 1e-12 * norm
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                # Entries this small rotate by ~0 and can overflow tau; skip.
                if abs(apq) <= 1e-300 + 1e-30 * (abs(a[p, p]) + abs(a[q, q])):
                    continue
                # Stable rotation angle (Golub & Van Loan formulation).
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                jb = np.array([[c, s], [-s, c]])  # A <- Jᵀ A J zeroes a[p,q]
                a[[p, q], :] = jb.T @ a[[p, q], :]
                a[:, [p, q]] = a[:, [p, q]] @ jb
                a[p, q] = a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ jb
    return np.diag(a).copy(), v


def top_eigenvectors(cov: ImageCovariance, d: int) -> ProjectionBasis:
    """Top-d eigenpairs of the covariance, eigenvalues nonincreasing.

    Sign convention: each column's largest-magnitude entry is positive
    (first such entry on ties), so results are reproducible across runs.
    A zero covariance yields the first d standard basis vectors.
    """
    g = cov.G
    w = g.shape[0]
    if not 1 <= d <= w:
        raise ValueError(f"d must be in [1, {w}], got {d}")
    if not np.any(g):
        return ProjectionBasis(X=np.eye(w)[:, :d], eigenvalues=np.zeros(d))
    vals, vecs = _jacobi_eigh(g)
    order = np.argsort(-vals, kind="stable")[:d]
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(d):
        col = vecs[:, k]
        if col[np.argmax(np.abs(col))] < 0:
            vecs[:, k] = -col
    return ProjectionBasis(X=vecs, eigenvalues=vals)


def project(a: np.ndarray, basis: ProjectionBasis) -> np.ndarray:
    """Project a matrix onto the basis: Y = A X, shape (rows(A), d)."""
    if a.shape[1] != basis.X.shape[0]:
        raise ValueError(f"matrix has {a.shape[1]} cols, basis expects {basis.X.shape[0]}")
    return a @ basis.X


def train_bases(layer_stacks: list[np.ndarray], d: int) -> list[ProjectionBasis]:
    """Train one projection basis per bin over per-image layer stacks.

    layer_stacks: one (bins, H, W) array per training image. Each bin is
    processed independently: mean -> covariance -> top eigenvectors.
    """
    if len(layer_stacks) < 2:
        raise ValueError("need at least two training images")
    shape = layer_stacks[0].shape
    for i, st in enumerate(layer_stacks):
        if st.shape != shape:
            raise ValueError(f"layer stack {i} has shape {st.shape}, expected {shape}")
    bases = []
    for b in range(shape[0]):
        samples = [st[b] for st in layer_stacks]
        mean = mean_matrix(samples)
        bases.append(top_eigenvectors(image_covariance(samples, mean), d))
    return bases
