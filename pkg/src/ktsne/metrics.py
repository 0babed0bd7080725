"""Embedding-quality metrics, k-means clustering scores, and a k-NN classifier.

Neighborhoods use Euclidean distance with ties broken by lower point index,
which keeps every rank-based metric exactly reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pairwise import as_matrix, distances


@dataclass
class MetricReport:
    na_ratio: float
    na_knn_curve: dict[int, float]
    trustworthiness_curve: dict[int, float]
    silhouette: float
    calinski: float
    davies: float
    knn_accuracy: float
    n_clusters: int = 0

    def to_json_dict(self) -> dict:
        return {
            "na_ratio": self.na_ratio,
            "na_knn_curve": {str(k): v for k, v in sorted(self.na_knn_curve.items())},
            "trustworthiness_curve": {
                str(k): v for k, v in sorted(self.trustworthiness_curve.items())
            },
            "silhouette": self.silhouette,
            "calinski": self.calinski,
            "davies": self.davies,
            "knn_accuracy": self.knn_accuracy,
            "n_clusters": self.n_clusters,
        }


def _neighbor_order(D: np.ndarray) -> np.ndarray:
    """Row-wise neighbor ordering by (distance, index), self excluded."""
    n = D.shape[0]
    D = D.copy()
    np.fill_diagonal(D, np.inf)
    cols = np.broadcast_to(np.arange(n), (n, n))
    return np.lexsort((cols, D), axis=1)[:, : n - 1]


def na_distance_ratio(X, Y) -> float:
    """1 minus the mean relative distance discrepancy over unordered pairs.

    Each pair contributes |dH - dL| / (dH + dL); coincident pairs in both
    spaces contribute 0. The pair mean keeps the score inside [0, 1].
    """
    DX, DY = distances(X), distances(Y)
    if DX.shape != DY.shape:
        raise ValueError("X and Y must have the same number of points")
    n = DX.shape[0]
    if n < 2:
        raise ValueError("need at least two points")
    iu = np.triu_indices(n, k=1)
    dh, dl = DX[iu], DY[iu]
    denom = dh + dl
    terms = np.divide(np.abs(dh - dl), denom, out=np.zeros_like(denom), where=denom > 0)
    return 1.0 - float(terms.mean())


def na_knn_overlap(X, Y, k: int) -> float:
    """Mean fraction of shared k-nearest neighbors between the two spaces."""
    DX, DY = distances(X), distances(Y)
    n = DX.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must lie in [1, n-1={n - 1}], got {k}")
    nx = _neighbor_order(DX)[:, :k]
    ny = _neighbor_order(DY)[:, :k]
    overlap = 0
    for i in range(n):
        overlap += len(set(nx[i]) & set(ny[i]))
    return overlap / (n * k)


def trustworthiness(X, Y, k: int = 100) -> float:
    """Rank-based penalty for intruders in low-dimensional neighborhoods.

    T(k) = 1 - 2 / (n k (2n - 3k - 1)) * sum_i sum_{j in U_k(i)} (r(i, j) - k)
    where U_k(i) holds points in Y's k-neighborhood of i but not X's, and
    r(i, j) is j's 1-based rank among i's neighbors in X. Valid for k < n/2.
    """
    DX, DY = distances(X), distances(Y)
    n = DX.shape[0]
    if not 1 <= k < n / 2:
        raise ValueError(f"trustworthiness needs 1 <= k < n/2 (n={n}), got {k}")
    order_x = _neighbor_order(DX)
    ranks = np.empty((n, n), dtype=np.int64)
    rows = np.arange(n)[:, None]
    ranks[rows, order_x] = np.arange(1, n)
    ny = _neighbor_order(DY)[:, :k]
    penalty = 0
    for i in range(n):
        in_x = set(order_x[i, :k])
        for j in ny[i]:
            if j not in in_x:
                penalty += int(ranks[i, j]) - k
    return 1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1))


@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    wcss: float


def _kmeans_pp(A: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = A.shape[0]
    centers = np.empty((k, A.shape[1]))
    centers[0] = A[rng.integers(n)]
    closest = ((A - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            probs = closest / total
            idx = rng.choice(n, p=probs)
        else:
            idx = rng.integers(n)
        centers[c] = A[idx]
        closest = np.minimum(closest, ((A - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(A: np.ndarray, centers: np.ndarray, max_iter: int, tol: float):
    n, k = A.shape[0], centers.shape[0]
    prev_wcss = np.inf
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((A[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        # empty cluster: restart its centroid at the worst-fit point
        assigned_cost = d2[np.arange(n), labels].copy()
        for c in range(k):
            if not (labels == c).any():
                far = int(assigned_cost.argmax())
                centers[c] = A[far]
                labels[far] = c
                assigned_cost[far] = -1.0
        for c in range(k):
            centers[c] = A[labels == c].mean(axis=0)
        wcss = float(((A - centers[labels]) ** 2).sum())
        if prev_wcss - wcss <= tol * max(prev_wcss, 1e-300):
            break
        prev_wcss = wcss
    return labels, centers, wcss


def kmeans(
    Y, k: int, seed: int = 0, restarts: int = 10, max_iter: int = 300, tol: float = 1e-6
) -> KMeansResult:
    """Lloyd's algorithm from k-means++ seeding, best of ``restarts`` by WCSS."""
    A = as_matrix(Y)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, n={n}], got {k}")
    rng = np.random.default_rng(seed)
    best: KMeansResult | None = None
    for _ in range(restarts):
        centers = _kmeans_pp(A, k, rng)
        labels, centers, wcss = _lloyd(A, centers.copy(), max_iter, tol)
        if best is None or wcss < best.wcss:
            best = KMeansResult(labels=labels, centers=centers, wcss=wcss)
    return best


def silhouette(Y, labels) -> float:
    """Mean silhouette over points; a singleton cluster point scores 0."""
    A = as_matrix(Y)
    lab = np.asarray(labels)
    uniq = np.unique(lab)
    if uniq.size < 2:
        raise ValueError("silhouette needs at least two clusters")
    D = distances(A)
    n = A.shape[0]
    scores = np.zeros(n)
    members = {c: np.nonzero(lab == c)[0] for c in uniq}
    for i in range(n):
        own = members[lab[i]]
        if own.size == 1:
            continue
        a = D[i, own].sum() / (own.size - 1)
        b = min(D[i, members[c]].mean() for c in uniq if c != lab[i])
        top = max(a, b)
        scores[i] = 0.0 if top == 0 else (b - a) / top
    return float(scores.mean())


def calinski_harabasz(Y, labels) -> float:
    """Between/within dispersion ratio scaled by (n - k) / (k - 1)."""
    A = as_matrix(Y)
    lab = np.asarray(labels)
    uniq = np.unique(lab)
    n, k = A.shape[0], uniq.size
    if k < 2:
        raise ValueError("calinski-harabasz needs at least two clusters")
    mean = A.mean(axis=0)
    between = 0.0
    within = 0.0
    for c in uniq:
        pts = A[lab == c]
        centroid = pts.mean(axis=0)
        between += pts.shape[0] * float(((centroid - mean) ** 2).sum())
        within += float(((pts - centroid) ** 2).sum())
    if within == 0:
        return float("inf") if between > 0 else 0.0
    return (between / within) * (n - k) / (k - 1)


def davies_bouldin(Y, labels) -> float:
    """Mean over clusters of the worst (s_i + s_j) / d_ij similarity ratio."""
    A = as_matrix(Y)
    lab = np.asarray(labels)
    uniq = np.unique(lab)
    k = uniq.size
    if k < 2:
        raise ValueError("davies-bouldin needs at least two clusters")
    centroids = np.array([A[lab == c].mean(axis=0) for c in uniq])
    scatter = np.array(
        [
            float(np.linalg.norm(A[lab == c] - centroids[i], axis=1).mean())
            for i, c in enumerate(uniq)
        ]
    )
    total = 0.0
    for i in range(k):
        worst = 0.0
        for j in range(k):
            if i == j:
                continue
            d = float(np.linalg.norm(centroids[i] - centroids[j]))
            ratio = (scatter[i] + scatter[j]) / d if d > 0 else float("inf")
            worst = max(worst, ratio)
        total += worst
    return total / k


def knn_classify(Y_train, labels_train, Y_test, k: int = 5) -> list[str]:
    """Majority vote among the k nearest training points.

    Vote ties go to the label whose voters sit nearer in total, then to the
    lexicographically smaller label.
    """
    train = as_matrix(Y_train)
    test = as_matrix(Y_test)
    lab = list(labels_train)
    n_train = train.shape[0]
    if not 1 <= k <= n_train:
        raise ValueError(f"k must lie in [1, n_train={n_train}], got {k}")
    d2 = ((test[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)
    cols = np.broadcast_to(np.arange(n_train), d2.shape)
    order = np.lexsort((cols, d2), axis=1)[:, :k]
    preds = []
    for row, nbrs in enumerate(order):
        tally: dict[str, list[float]] = {}
        for j in nbrs:
            tally.setdefault(lab[j], []).append(float(np.sqrt(d2[row, j])))
        preds.append(
            min(tally, key=lambda c: (-len(tally[c]), sum(tally[c]), c))
        )
    return preds


def knn_accuracy(Y_train, labels_train, Y_test, labels_test, k: int = 5) -> float:
    preds = knn_classify(Y_train, labels_train, Y_test, k=k)
    truth = list(labels_test)
    return sum(p == t for p, t in zip(preds, truth)) / len(truth)


def knn_loo_accuracy(Y, labels, k: int = 5) -> float:
    """Leave-one-out k-NN accuracy on a single labeled embedding."""
    A = as_matrix(Y)
    lab = list(labels)
    n = A.shape[0]
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, n-1={n - 1}], got {k}")
    order = _neighbor_order(distances(A))[:, :k]
    D = distances(A)
    correct = 0
    for i in range(n):
        tally: dict[str, list[float]] = {}
        for j in order[i]:
            tally.setdefault(lab[j], []).append(float(D[i, j]))
        pred = min(tally, key=lambda c: (-len(tally[c]), sum(tally[c]), c))
        correct += pred == lab[i]
    return correct / n


def curve_grid(n: int, k_max: int = 100) -> list[int]:
    """Shared k-grid for both curves: limited by n for overlap and n/2 for TW."""
    top = min(k_max, n - 2, (n - 1) // 2)
    return list(range(1, top + 1))


def metric_report(
    X,
    Y,
    labels,
    k_max: int = 100,
    knn_k: int = 5,
    kmeans_seed: int = 0,
) -> MetricReport:
    """Full quality report for an embedding Y of features X with class labels."""
    A, B = as_matrix(X), as_matrix(Y)
    lab = list(labels)
    grid = curve_grid(A.shape[0], k_max)
    na_curve = {k: na_knn_overlap(A, B, k) for k in grid}
    tw_curve = {k: trustworthiness(A, B, k) for k in grid}
    n_clusters = len(set(lab))
    if n_clusters >= 2:
        part = kmeans(B, n_clusters, seed=kmeans_seed)
        sil = silhouette(B, part.labels)
        cal = calinski_harabasz(B, part.labels)
        dav = davies_bouldin(B, part.labels)
    else:
        sil, cal, dav = 0.0, 0.0, 0.0
    return MetricReport(
        na_ratio=na_distance_ratio(A, B),
        na_knn_curve=na_curve,
        trustworthiness_curve=tw_curve,
        silhouette=sil,
        calinski=cal,
        davies=dav,
        knn_accuracy=knn_loo_accuracy(B, lab, k=min(knn_k, A.shape[0] - 1)),
        n_clusters=n_clusters,
    )
