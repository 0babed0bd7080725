"""DBSCAN roles and the density weights feeding the modified isolation kernel.

Points are classified core / border / noise with a *closed* epsilon ball that
counts the point itself. Roles map to weights 1.0 / 0.5 / 1e-3 (a small floor
instead of zero keeps every downstream density estimate finite), and the
adaptive density estimate is p_i = 1 / sqrt(n_i * sum_{k != i} n_k).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .pairwise import as_matrix, distances

CORE_WEIGHT = 1.0
BORDER_WEIGHT = 0.5
NOISE_WEIGHT = 1e-3


class Role(enum.IntEnum):
    CORE = 0
    BORDER = 1
    NOISE = 2

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class DbscanParams:
    epsilon: float
    min_samples: int

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.min_samples < 1:
            raise ValueError(f"min_samples must be >= 1, got {self.min_samples}")


@dataclass
class DbscanResult:
    roles: np.ndarray  # int array of Role values
    cluster_ids: np.ndarray  # -1 for noise; ids assigned in point-index order


@dataclass
class DensityProfile:
    weights: np.ndarray  # n_i in (0, 1]
    p: np.ndarray  # adaptive density estimates, all finite and positive
    weight_sum: float
    roles: np.ndarray | None = None


def default_epsilon(X, scale: float = 0.5) -> float:
    """Data-driven radius: ``scale`` times the median pairwise distance."""
    D = distances(X)
    n = D.shape[0]
    if n < 2:
        return 1.0
    med = float(np.median(D[np.triu_indices(n, k=1)]))
    return scale * med if med > 0 else 1.0


def dbscan(X, params: DbscanParams) -> DbscanResult:
    """Exact O(n^2) DBSCAN.

    Core: closed epsilon ball (self included) holds >= min_samples points.
    Border: non-core within epsilon of a core point. Noise: the rest.
    Cluster ids follow density-reachability between core points, discovered
    in index order; a border point reachable from several clusters joins the
    lowest id, so the result is deterministic.
    """
    A = as_matrix(X)
    n = A.shape[0]
    if n < 1:
        raise ValueError("dbscan needs at least one point")
    D = distances(A)
    within = D <= params.epsilon
    core = within.sum(axis=1) >= params.min_samples
    border = ~core & (within & core[None, :]).any(axis=1)

    roles = np.full(n, Role.NOISE, dtype=np.int64)
    roles[core] = Role.CORE
    roles[border] = Role.BORDER

    cluster_ids = np.full(n, -1, dtype=np.int64)
    next_id = 0
    for start in range(n):
        if not core[start] or cluster_ids[start] != -1:
            continue
        stack = [start]
        cluster_ids[start] = next_id
        while stack:
            i = stack.pop()
            for j in np.nonzero(within[i] & core)[0]:
                if cluster_ids[j] == -1:
                    cluster_ids[j] = next_id
                    stack.append(int(j))
        next_id += 1
    for i in np.nonzero(border)[0]:
        reachable = cluster_ids[within[i] & core]
        cluster_ids[i] = int(reachable.min())
    return DbscanResult(roles=roles, cluster_ids=cluster_ids)


def weights_from_roles(roles: np.ndarray) -> np.ndarray:
    roles = np.asarray(roles)
    if roles.size == 0:
        raise ValueError("roles must be nonempty")
    lut = np.array([CORE_WEIGHT, BORDER_WEIGHT, NOISE_WEIGHT])
    return lut[roles]


def density_estimates(weights: np.ndarray, roles: np.ndarray | None = None) -> DensityProfile:
    """p_i = 1 / sqrt(n_i * sum_{k != i} n_k) for weights n_i > 0."""
    w = np.asarray(weights, dtype=float)
    if w.size < 2:
        raise ValueError("need at least two points for density estimates")
    if (w <= 0).any():
        raise ValueError("all weights must be positive")
    total = float(w.sum())
    p = 1.0 / np.sqrt(w * (total - w))
    return DensityProfile(weights=w, p=p, weight_sum=total, roles=roles)


def density_profile(X, params: DbscanParams | None = None) -> DensityProfile:
    """Compose dbscan -> role weights -> adaptive density estimates."""
    A = as_matrix(X)
    if params is None:
        params = DbscanParams(epsilon=default_epsilon(A), min_samples=4)
    result = dbscan(A, params)
    weights = weights_from_roles(result.roles)
    return density_estimates(weights, roles=result.roles)
