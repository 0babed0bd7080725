"""Dense pairwise Euclidean distances; O(n^2) is fine at desk scale."""

from __future__ import annotations

import numpy as np


def as_matrix(X) -> np.ndarray:
    """Accept plain arrays or any carrier with a ``values`` ndarray."""
    values = getattr(X, "values", X)
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    return arr


def sq_distances(X) -> np.ndarray:
    """Symmetric matrix of squared Euclidean distances with an exact zero diagonal."""
    A = as_matrix(X)
    sq_norms = np.einsum("ij,ij->i", A, A)
    D2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (A @ A.T)
    np.maximum(D2, 0.0, out=D2)
    D2 = 0.5 * (D2 + D2.T)
    np.fill_diagonal(D2, 0.0)
    return D2


def distances(X) -> np.ndarray:
    return np.sqrt(sq_distances(X))
