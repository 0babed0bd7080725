"""Low-dimensional starting layouts: random, PCA, and random-walk.

All three start small (coordinate scale well below 1e-2) so the first
optimizer steps are gradient-dominated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pairwise import as_matrix

INIT_SCALE = 1e-4


@dataclass
class LowDimEmbedding:
    values: np.ndarray
    init_method: str
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _random_coords(rng: np.random.Generator, n: int, dims: int) -> np.ndarray:
    return rng.normal(scale=INIT_SCALE, size=(n, dims))


def init_random(n: int, dims: int = 2, seed: int = 0) -> LowDimEmbedding:
    """i.i.d. Gaussian coordinates with standard deviation 1e-4."""
    if n < 1 or dims < 1:
        raise ValueError("n and dims must be >= 1")
    rng = np.random.default_rng(seed)
    return LowDimEmbedding(_random_coords(rng, n, dims), init_method="random", seed=seed)


def init_pca(X, dims: int = 2) -> LowDimEmbedding:
    """Projection onto the top principal components, shrunk to t-SNE scale.

    The eigensolve runs on whichever of the d x d covariance or n x n Gram is
    smaller. Each component's sign is fixed so its largest-magnitude loading
    is positive, and the whole projection is rescaled by one global factor
    (top component std becomes 1e-4) so within-plane geometry is preserved.
    """
    A = as_matrix(X)
    n, d = A.shape
    if not 1 <= dims <= min(n, d):
        raise ValueError(f"dims must lie in [1, min(n, d)={min(n, d)}], got {dims}")
    centered = A - A.mean(axis=0)
    if not centered.any():
        raise ValueError("PCA initialization undefined: all rows are identical")

    if d <= n:
        _, vecs = np.linalg.eigh(centered.T @ centered)
        loadings = vecs[:, ::-1][:, :dims]
    else:
        _, vecs = np.linalg.eigh(centered @ centered.T)
        u = vecs[:, ::-1][:, :dims]
        loadings = centered.T @ u
        norms = np.linalg.norm(loadings, axis=0)
        norms[norms == 0] = 1.0
        loadings /= norms
    for j in range(dims):
        col = loadings[:, j]
        if col[np.argmax(np.abs(col))] < 0:
            loadings[:, j] = -col

    scores = centered @ loadings
    top_std = scores[:, 0].std()
    if top_std > 0:
        scores *= INIT_SCALE / top_std
    return LowDimEmbedding(scores, init_method="pca", seed=None)


def init_random_walk(
    n: int, dims: int = 2, seed: int = 0, steps: int = 1000
) -> LowDimEmbedding:
    """Random start, then per-point contraction toward random neighbors.

    For each point in index order, ``steps`` updates draw a uniform index and
    move the point by (Y[nbr] - Y[i]) / sqrt(j + 1) at step j; later points
    see earlier points' already-updated positions. Drawing the point itself
    is a no-op. Deterministic per seed.
    """
    if n < 2:
        raise ValueError(f"random-walk initialization needs n >= 2, got {n}")
    rng = np.random.default_rng(seed)
    Y = _random_coords(rng, n, dims)
    inv_step = 1.0 / np.sqrt(np.arange(1, steps + 1) + 1.0)
    for i in range(n):
        neighbors = rng.integers(0, n, size=steps)
        for j in range(steps):
            Y[i] += (Y[neighbors[j]] - Y[i]) * inv_step[j]
    return LowDimEmbedding(Y, init_method="walk", seed=seed)
