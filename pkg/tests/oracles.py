"""Independent brute-force oracles used to pin expected values.

Everything here is written from the definitions with plain loops, and stays
deliberately separate from the library's vectorized fast paths.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def hamming(a: str, b: str) -> int:
    assert len(a) == len(b)
    return sum(x != y for x, y in zip(a, b))


def euclid(a, b) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def dbscan_roles_oracle(X: np.ndarray, eps: float, min_samples: int):
    """Definitional core/border/noise with a closed epsilon ball."""
    n = len(X)
    ball = [
        [j for j in range(n) if euclid(X[i], X[j]) <= eps]
        for i in range(n)
    ]
    core = [len(ball[i]) >= min_samples for i in range(n)]
    roles = []
    for i in range(n):
        if core[i]:
            roles.append("core")
        elif any(core[j] for j in ball[i]):
            roles.append("border")
        else:
            roles.append("noise")
    return roles, core, ball


def dbscan_clusters_oracle(X: np.ndarray, eps: float, min_samples: int):
    """Density-reachability closure over core points, O(n^3) transitive scan."""
    n = len(X)
    roles, core, ball = dbscan_roles_oracle(X, eps, min_samples)
    reach = [[i == j or (core[i] and core[j] and j in ball[i]) for j in range(n)]
             for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if not reach[i][j] and core[i] and core[j]:
                    if any(reach[i][m] and reach[m][j] and core[m] for m in range(n)):
                        reach[i][j] = True
                        changed = True
    clusters = [-1] * n
    next_id = 0
    for i in range(n):
        if core[i] and clusters[i] == -1:
            for j in range(n):
                if core[j] and reach[i][j]:
                    clusters[j] = next_id
            next_id += 1
    for i in range(n):
        if roles[i] == "border":
            clusters[i] = min(clusters[j] for j in ball[i] if core[j])
    return roles, clusters


def joint_p_oracle(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    cond = np.zeros((n, n))
    for i in range(n):
        denom = sum(A[i, k] for k in range(n) if k != i)
        for j in range(n):
            if j != i:
                cond[i, j] = A[i, j] / denom
    P = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if j != i:
                P[i, j] = (cond[i, j] + cond[j, i]) / (2 * n)
    return P


def joint_q_oracle(Y: np.ndarray) -> np.ndarray:
    n = Y.shape[0]
    W = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if j != i:
                W[i, j] = 1.0 / (1.0 + euclid(Y[i], Y[j]) ** 2)
    return W / W.sum()


def kl_oracle(P: np.ndarray, Q: np.ndarray, floor: float = 1e-12) -> float:
    total = 0.0
    n = P.shape[0]
    for i in range(n):
        for j in range(n):
            if P[i, j] > 0:
                total += P[i, j] * math.log(P[i, j] / max(Q[i, j], floor))
    return total


def fd_gradient(loss_fn, Y: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar loss over the flattened layout."""
    grad = np.zeros_like(Y)
    for i in range(Y.shape[0]):
        for d in range(Y.shape[1]):
            up = Y.copy()
            dn = Y.copy()
            up[i, d] += h
            dn[i, d] -= h
            grad[i, d] = (loss_fn(up) - loss_fn(dn)) / (2 * h)
    return grad


def neighbor_list_oracle(X: np.ndarray, i: int) -> list[int]:
    """All other points sorted by (distance to i, index)."""
    n = len(X)
    keyed = sorted((euclid(X[i], X[j]), j) for j in range(n) if j != i)
    return [j for _, j in keyed]


def na_knn_oracle(X: np.ndarray, Y: np.ndarray, k: int) -> float:
    n = len(X)
    total = 0
    for i in range(n):
        nx = set(neighbor_list_oracle(X, i)[:k])
        ny = set(neighbor_list_oracle(Y, i)[:k])
        total += len(nx & ny)
    return total / (n * k)


def na_ratio_oracle(X: np.ndarray, Y: np.ndarray) -> float:
    n = len(X)
    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            dh, dl = euclid(X[i], X[j]), euclid(Y[i], Y[j])
            terms.append(0.0 if dh + dl == 0 else abs(dh - dl) / (dh + dl))
    return 1.0 - sum(terms) / len(terms)


def trustworthiness_oracle(X: np.ndarray, Y: np.ndarray, k: int) -> float:
    n = len(X)
    penalty = 0
    for i in range(n):
        order_x = neighbor_list_oracle(X, i)
        rank = {j: r + 1 for r, j in enumerate(order_x)}
        in_x = set(order_x[:k])
        for j in neighbor_list_oracle(Y, i)[:k]:
            if j not in in_x:
                penalty += rank[j] - k
    return 1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1))


def silhouette_oracle(Y: np.ndarray, labels) -> float:
    n = len(Y)
    labels = list(labels)
    scores = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(euclid(Y[i], Y[j]) for j in own) / len(own)
        b = math.inf
        for c in set(labels):
            if c == labels[i]:
                continue
            members = [j for j in range(n) if labels[j] == c]
            b = min(b, sum(euclid(Y[i], Y[j]) for j in members) / len(members))
        scores.append(0.0 if max(a, b) == 0 else (b - a) / max(a, b))
    return sum(scores) / n


def calinski_oracle(Y: np.ndarray, labels) -> float:
    labels = list(labels)
    n = len(Y)
    classes = sorted(set(labels))
    k = len(classes)
    mean = Y.mean(axis=0)
    between = within = 0.0
    for c in classes:
        pts = Y[[j for j in range(n) if labels[j] == c]]
        mu = pts.mean(axis=0)
        between += len(pts) * float(((mu - mean) ** 2).sum())
        within += float(((pts - mu) ** 2).sum())
    return (between / within) * (n - k) / (k - 1)


def davies_oracle(Y: np.ndarray, labels) -> float:
    labels = list(labels)
    n = len(Y)
    classes = sorted(set(labels))
    mus = [Y[[j for j in range(n) if labels[j] == c]].mean(axis=0) for c in classes]
    scatters = []
    for ci, c in enumerate(classes):
        pts = Y[[j for j in range(n) if labels[j] == c]]
        scatters.append(sum(euclid(p, mus[ci]) for p in pts) / len(pts))
    total = 0.0
    for i in range(len(classes)):
        worst = 0.0
        for j in range(len(classes)):
            if i != j:
                worst = max(worst, (scatters[i] + scatters[j]) / euclid(mus[i], mus[j]))
        total += worst
    return total / len(classes)


def isolation_exact_oracle(X: np.ndarray, psi: int) -> np.ndarray:
    """Expected Voronoi-sharing affinity: average over all C(n, psi) samples."""
    n = len(X)
    total = np.zeros((n, n))
    count = 0
    for sample in itertools.combinations(range(n), psi):
        cell = []
        for i in range(n):
            best = min(sample, key=lambda s: (euclid(X[i], X[s]), s))
            cell.append(best)
        for i in range(n):
            for j in range(n):
                total[i, j] += cell[i] == cell[j]
        count += 1
    return total / count


def perplexity_of_sigma(X: np.ndarray, i: int, sigma: float) -> float:
    """2**H of the Gaussian conditional of point i, base-2 entropy."""
    n = len(X)
    weights = {}
    for j in range(n):
        if j != i:
            weights[j] = math.exp(-euclid(X[i], X[j]) ** 2 / (2 * sigma**2))
    total = sum(weights.values())
    H = 0.0
    for w in weights.values():
        p = w / total
        if p > 0:
            H -= p * math.log2(p)
    return 2.0**H
