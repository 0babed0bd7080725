"""Affinity kernels: perplexity-calibrated Gaussian, isolation, and the
density-weighted modified isolation kernel (MIK).

MIK entry for i != j:

    (1/sqrt(p_i p_j)) * exp(-|x_i - x_j|^2 / (2 sigma_i sigma_j))
        * (1 - n_i / sum_{k != i} n_k) * (1 - n_j / sum_{k != j} n_k)

with DBSCAN weights n_i, density estimates p_i and per-point bandwidths
sigma_i from perplexity calibration. Entries are computed once per unordered
pair and mirrored, so symmetry is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import DensityProfile
from .pairwise import as_matrix, sq_distances

PERPLEXITY_TOL = 1e-3
MAX_BISECTION_STEPS = 100
BRACKET_LO = 1e-12
BRACKET_HI = 1e12


@dataclass
class BandwidthProfile:
    sigma: np.ndarray
    target_perplexity: float
    achieved_perplexity: np.ndarray
    converged: np.ndarray  # bool per point


@dataclass
class AffinityMatrix:
    values: np.ndarray
    kernel: str  # gaussian | isolation | mik


@dataclass
class MercerReport:
    max_asymmetry: float
    min_eigenvalue: float
    max_entry: float
    density_bound: float | None = None

    @property
    def bound_satisfied(self) -> bool:
        return self.density_bound is None or self.max_entry <= self.density_bound + 1e-12


def _row_perplexity(d2_row: np.ndarray, sigma: float) -> float:
    """exp(H) of the Gaussian conditional over one point's neighbors."""
    logits = -d2_row / (2.0 * sigma * sigma)
    logits -= logits.max()
    w = np.exp(logits)
    p = w / w.sum()
    nz = p[p > 0]
    return float(np.exp(-(nz * np.log(nz)).sum()))


def calibrate_bandwidths(X, perplexity: float) -> BandwidthProfile:
    """Per-point bandwidth search so each conditional hits the target perplexity.

    Bisects sigma_i geometrically inside [1e-12, 1e12] x data diameter for at
    most 100 steps, accepting when |achieved - target| <= 1e-3. A point whose
    neighbors all sit at distance zero has no usable conditional; it gets the
    data diameter as a fallback sigma and is flagged unconverged.
    """
    A = as_matrix(X)
    n = A.shape[0]
    if not 1.0 < perplexity < n:
        raise ValueError(f"perplexity must lie in (1, n={n}), got {perplexity}")
    D2 = sq_distances(A)
    diameter = float(np.sqrt(D2.max()))
    if diameter == 0.0:
        diameter = 1.0

    sigma = np.empty(n)
    achieved = np.empty(n)
    converged = np.zeros(n, dtype=bool)
    idx = np.arange(n)
    for i in range(n):
        d2 = D2[i, idx != i]
        if d2.max() == 0.0:
            sigma[i] = diameter
            achieved[i] = 1.0
            continue
        lo, hi = BRACKET_LO * diameter, BRACKET_HI * diameter
        s = np.sqrt(lo * hi)
        per = _row_perplexity(d2, s)
        for _ in range(MAX_BISECTION_STEPS):
            if abs(per - perplexity) <= PERPLEXITY_TOL:
                converged[i] = True
                break
            if per > perplexity:
                hi = s
            else:
                lo = s
            s = np.sqrt(lo * hi)
            per = _row_perplexity(d2, s)
        sigma[i] = s
        achieved[i] = per
    return BandwidthProfile(
        sigma=sigma,
        target_perplexity=perplexity,
        achieved_perplexity=achieved,
        converged=converged,
    )


def gaussian_affinity(X, bw: BandwidthProfile) -> AffinityMatrix:
    """Conditional Gaussian kernel exp(-d^2 / (2 sigma_i^2)), zero diagonal.

    Row i uses sigma_i, so the matrix is intentionally asymmetric; the
    high-dimensional joint distribution symmetrizes it downstream.
    """
    D2 = sq_distances(X)
    K = np.exp(-D2 / (2.0 * bw.sigma[:, None] ** 2))
    np.fill_diagonal(K, 0.0)
    return AffinityMatrix(values=K, kernel="gaussian")


def isolation_affinity(X, psi: int = 64, t: int = 100, seed: int = 0) -> AffinityMatrix:
    """Voronoi-partition isolation similarity.

    Each of ``t`` rounds samples ``psi`` points without replacement and
    assigns every point to its nearest sample (ties to the lowest sample
    index); the affinity is the fraction of rounds in which two points share
    a cell. Entries are multiples of 1/t and the diagonal is exactly 1.
    """
    A = as_matrix(X)
    n = A.shape[0]
    if not 1 <= psi <= n:
        raise ValueError(f"psi must lie in [1, n={n}], got {psi}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    D2 = sq_distances(A)
    rng = np.random.default_rng(seed)
    counts = np.zeros((n, n), dtype=np.int64)
    for _ in range(t):
        sample = np.sort(rng.choice(n, size=psi, replace=False))
        cells = sample[np.argmin(D2[:, sample], axis=1)]
        counts += cells[:, None] == cells[None, :]
    return AffinityMatrix(values=counts / t, kernel="isolation")


def _mik_parts(X, bw: BandwidthProfile, dp: DensityProfile):
    A = as_matrix(X)
    n = A.shape[0]
    if n < 3:
        raise ValueError(f"the modified isolation kernel needs n >= 3, got {n}")
    others = dp.weight_sum - dp.weights
    correction = 1.0 - dp.weights / others
    scale = correction / np.sqrt(dp.p)
    expo = np.exp(-sq_distances(A) / (2.0 * np.outer(bw.sigma, bw.sigma)))
    return np.outer(scale, scale) * expo


def mik_affinity(X, bw: BandwidthProfile, dp: DensityProfile) -> AffinityMatrix:
    """Modified isolation kernel with the zero diagonal used by the t-SNE path."""
    K = _mik_parts(X, bw, dp)
    upper = np.triu(K, k=1)
    return AffinityMatrix(values=upper + upper.T, kernel="mik")


def mik_gram(X, bw: BandwidthProfile, dp: DensityProfile) -> np.ndarray:
    """MIK Gram with its natural diagonal (1/p_i) (1 - n_i/sum_{k!=i} n_k)^2.

    This is the matrix whose spectrum certifies positive semi-definiteness;
    the t-SNE path zeroes the diagonal instead.
    """
    K = _mik_parts(X, bw, dp)
    diag = np.diag(K).copy()
    upper = np.triu(K, k=1)
    return upper + upper.T + np.diag(diag)


def validate_mercer(gram: np.ndarray, density_bound: float | None = None) -> MercerReport:
    """Symmetry, minimum eigenvalue and entry bound of a candidate Gram matrix."""
    G = np.asarray(gram, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError(f"Gram matrix must be square, got shape {G.shape}")
    asym = float(np.abs(G - G.T).max())
    sym = 0.5 * (G + G.T)
    min_eig = float(np.linalg.eigvalsh(sym).min())
    return MercerReport(
        max_asymmetry=asym,
        min_eigenvalue=min_eig,
        max_entry=float(G.max()),
        density_bound=density_bound,
    )
