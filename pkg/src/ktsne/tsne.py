"""t-SNE core: joint distributions, KL loss, analytic gradient, and the
momentum gradient-descent loop, parameterized by any affinity kernel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .density import DbscanParams, density_profile
from .initialization import LowDimEmbedding, init_pca, init_random, init_random_walk
from .kernel import (
    AffinityMatrix,
    calibrate_bandwidths,
    gaussian_affinity,
    isolation_affinity,
    mik_affinity,
)
from .pairwise import as_matrix, sq_distances

Q_FLOOR = 1e-12


class DivergenceError(RuntimeError):
    """Loss became non-finite; carries the first bad iteration index."""

    def __init__(self, iteration: int):
        super().__init__(f"optimization diverged at iteration {iteration}")
        self.iteration = iteration


@dataclass
class JointDistribution:
    values: np.ndarray
    space: str  # "high" (P) or "low" (Q)
    q_floor: float = Q_FLOOR


@dataclass
class OptimizerConfig:
    iterations: int = 1000
    learning_rate: float = 500.0
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch: int = 250  # iterations at index >= switch use the late value
    exaggeration: float = 1.0
    exaggeration_iters: int = 0
    q_floor: float = Q_FLOOR
    debug_checks: bool = False

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.exaggeration < 1.0:
            raise ValueError("exaggeration factor must be >= 1")
        if self.momentum_switch > max(self.iterations, 1) and self.iterations > 0:
            # schedule switch beyond the horizon simply never fires
            pass


@dataclass
class TsneTrace:
    losses: np.ndarray  # KL at the start of each iteration, length = iterations
    final_loss: float
    embedding: np.ndarray
    iterations: int
    wall_seconds: float = 0.0


def check_joint(J: JointDistribution, atol_sym: float = 1e-12, atol_sum: float = 1e-10) -> None:
    """Assert the joint-distribution invariants; raises on violation."""
    V = J.values
    if np.abs(np.diag(V)).max() != 0.0:
        raise AssertionError("joint distribution has a nonzero diagonal")
    if np.abs(V - V.T).max() > atol_sym:
        raise AssertionError("joint distribution is not symmetric")
    if V.min() < 0:
        raise AssertionError("joint distribution has negative entries")
    if abs(V.sum() - 1.0) > atol_sum:
        raise AssertionError(f"joint distribution sums to {V.sum()!r}, not 1")


def joint_p(A: AffinityMatrix | np.ndarray) -> JointDistribution:
    """Symmetrized high-dimensional joint from an affinity matrix.

    Row conditionals ignore the diagonal: P(j|i) = A_ij / sum_{k != i} A_ik,
    then P_ij = (P(i|j) + P(j|i)) / (2n). A row without any positive
    off-diagonal affinity has no conditional distribution and is an error.
    """
    V = np.array(getattr(A, "values", A), dtype=float)
    n = V.shape[0]
    if V.ndim != 2 or V.shape[1] != n:
        raise ValueError(f"affinity matrix must be square, got {V.shape}")
    if n < 2:
        raise ValueError("joint distribution needs n >= 2")
    np.fill_diagonal(V, 0.0)
    row_sums = V.sum(axis=1)
    dead = np.nonzero(row_sums <= 0)[0]
    if dead.size:
        raise ValueError(
            f"point {int(dead[0])} has no positive affinity to any other point"
        )
    cond = V / row_sums[:, None]
    P = (cond + cond.T) / (2.0 * n)
    np.fill_diagonal(P, 0.0)
    return JointDistribution(values=P, space="high")


def _student_weights(Y: np.ndarray) -> np.ndarray:
    W = 1.0 / (1.0 + sq_distances(Y))
    np.fill_diagonal(W, 0.0)
    return W


def joint_q(Y: LowDimEmbedding | np.ndarray, q_floor: float = Q_FLOOR) -> JointDistribution:
    """Student-t joint over the embedding; q_floor is applied inside the KL
    ratio (not here), so the returned matrix sums to exactly one."""
    W = _student_weights(as_matrix(Y))
    return JointDistribution(values=W / W.sum(), space="low", q_floor=q_floor)


def kl_loss(P: JointDistribution, Q: JointDistribution) -> float:
    """KL(P || Q) with Q floored inside the log ratio; 0 log(0/q) = 0."""
    Pv, Qv = P.values, Q.values
    if Pv.shape != Qv.shape:
        raise ValueError(f"shape mismatch: P {Pv.shape} vs Q {Qv.shape}")
    mask = Pv > 0
    ratio = Pv[mask] / np.maximum(Qv[mask], Q.q_floor)
    return float((Pv[mask] * np.log(ratio)).sum())


def gradient(P: JointDistribution, Q: JointDistribution, Y) -> np.ndarray:
    """Analytic KL gradient: 4 sum_j (P_ij - Q_ij) (1 + |y_i - y_j|^2)^-1 (y_i - y_j)."""
    Ym = as_matrix(Y)
    W = _student_weights(Ym)
    M = (P.values - Q.values) * W
    return 4.0 * (M.sum(axis=1)[:, None] * Ym - M @ Ym)


def optimize(P: JointDistribution, Y0: LowDimEmbedding, cfg: OptimizerConfig | None = None) -> TsneTrace:
    """Momentum gradient descent on KL(P || Q).

    Records the loss at the start of every iteration (losses[0] is the loss
    at Y0) and the loss of the returned embedding in ``final_loss``. Momentum
    is ``momentum_early`` for iteration indices below ``momentum_switch`` and
    ``momentum_late`` after. With exaggeration active, the recorded losses
    are those of the exaggerated objective actually being descended.
    """
    cfg = cfg or OptimizerConfig()
    start = time.perf_counter()
    Y = as_matrix(Y0).copy()
    n = Y.shape[0]
    if P.values.shape[0] != n:
        raise ValueError(f"P is {P.values.shape[0]} points but Y0 has {n}")

    Y_prev = Y.copy()
    losses = np.empty(cfg.iterations)
    exaggerated = None
    if cfg.exaggeration > 1.0 and cfg.exaggeration_iters > 0:
        exaggerated = JointDistribution(P.values * cfg.exaggeration, space="high")

    for it in range(cfg.iterations):
        P_t = exaggerated if (exaggerated is not None and it < cfg.exaggeration_iters) else P
        W = _student_weights(Y)
        Q = JointDistribution(W / W.sum(), space="low", q_floor=cfg.q_floor)
        if cfg.debug_checks:
            check_joint(Q)
        loss = kl_loss(P_t, Q)
        if not np.isfinite(loss):
            raise DivergenceError(it)
        losses[it] = loss
        M = (P_t.values - Q.values) * W
        grad = 4.0 * (M.sum(axis=1)[:, None] * Y - M @ Y)
        alpha = cfg.momentum_early if it < cfg.momentum_switch else cfg.momentum_late
        Y_next = Y - cfg.learning_rate * grad + alpha * (Y - Y_prev)
        Y_prev, Y = Y, Y_next

    final_loss = kl_loss(P, joint_q(Y, cfg.q_floor))
    if not np.isfinite(final_loss):
        raise DivergenceError(cfg.iterations)
    return TsneTrace(
        losses=losses,
        final_loss=final_loss,
        embedding=Y,
        iterations=cfg.iterations,
        wall_seconds=time.perf_counter() - start,
    )


@dataclass
class PipelineResult:
    trace: TsneTrace
    init: LowDimEmbedding
    affinity: AffinityMatrix
    density: object | None = None  # DensityProfile when the kernel is mik
    timings: dict = field(default_factory=dict)


def run_pipeline(
    X,
    kernel: str = "gaussian",
    init: str = "random",
    cfg: OptimizerConfig | None = None,
    perplexity: float = 30.0,
    density_params: DbscanParams | None = None,
    psi: int = 64,
    t: int = 100,
    seed: int = 0,
    dims: int = 2,
) -> PipelineResult:
    """Bandwidths -> affinity -> joint P -> initialization -> optimizer."""
    A = as_matrix(X)
    n = A.shape[0]
    timings: dict[str, float] = {}
    dp = None

    t0 = time.perf_counter()
    if kernel == "gaussian":
        bw = calibrate_bandwidths(A, perplexity)
        aff = gaussian_affinity(A, bw)
    elif kernel == "isolation":
        aff = isolation_affinity(A, psi=min(psi, n), t=t, seed=seed)
    elif kernel == "mik":
        bw = calibrate_bandwidths(A, perplexity)
        dp = density_profile(A, density_params)
        aff = mik_affinity(A, bw, dp)
    else:
        raise ValueError(f"unknown kernel '{kernel}'")
    timings["affinity"] = time.perf_counter() - t0

    P = joint_p(aff)

    t0 = time.perf_counter()
    if init == "random":
        Y0 = init_random(n, dims=dims, seed=seed)
    elif init == "pca":
        Y0 = init_pca(A, dims=dims)
    elif init == "walk":
        Y0 = init_random_walk(n, dims=dims, seed=seed)
    else:
        raise ValueError(f"unknown initialization '{init}'")
    timings["init"] = time.perf_counter() - t0

    trace = optimize(P, Y0, cfg)
    timings["optimize"] = trace.wall_seconds
    return PipelineResult(trace=trace, init=Y0, affinity=aff, density=dp, timings=timings)
