"""k-medoids clustering of the pattern set and silhouette-based k sweeps.

PAM variant: greedy BUILD initialization followed by best-swap local
optimization, repeated over seeded restarts (restart 0 keeps the BUILD
start, later restarts draw random medoids). Everything is deterministic
for a fixed (seed, restarts): ties in assignment go to the lower medoid
index, swap ties to the first candidate in scan order, restart ties to
the earliest restart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import DissimilarityMatrix
from ._rng import rng_for

_EPS = 1e-12


@dataclass(frozen=True)
class Clustering:
    """Assignment of pattern ids to clusters 1..k, with one medoid each.

    Cluster ids are canonical: ordered by (size desc, smallest pattern
    index asc) over the dissimilarity matrix's id order.
    """

    k: int
    assignment: dict[str, int]
    medoids: dict[int, str]
    cost: float


def _assign(m: np.ndarray, med: np.ndarray):
    cols = m[:, med]
    pos = np.argmin(cols, axis=1)  # first minimum = lowest medoid index
    pos[med] = np.arange(med.shape[0])  # a medoid always belongs to itself
    dnear = cols[np.arange(m.shape[0]), pos]
    return pos, dnear


def _build_init(m: np.ndarray, k: int) -> np.ndarray:
    n = m.shape[0]
    first = int(np.argmin(m.sum(axis=0)))
    med = [first]
    dnear = m[:, first].copy()
    while len(med) < k:
        gains = np.maximum(dnear[:, None] - m, 0.0).sum(axis=0)
        gains[med] = -np.inf
        c = int(np.argmax(gains))
        med.append(c)
        dnear = np.minimum(dnear, m[:, c])
    return np.sort(np.array(med, dtype=np.int64))


def _swap_phase(m: np.ndarray, med: np.ndarray) -> tuple[np.ndarray, float]:
    n = m.shape[0]
    k = med.shape[0]
    if k >= n:
        return np.arange(n, dtype=np.int64), 0.0
    while True:
        pos, dnear = _assign(m, med)
        cols = m[:, med]
        cols2 = cols.copy()
        cols2[np.arange(n), pos] = np.inf
        dsecond = cols2.min(axis=1)
        is_med = np.zeros(n, dtype=bool)
        is_med[med] = True
        best_delta = 0.0
        best_swap = None
        for j in range(n):
            if is_med[j]:
                continue
            cand = m[:, j]
            other = np.minimum(cand - dnear, 0.0)
            member = np.minimum(cand, dsecond) - dnear
            base = other.sum()
            corr = np.bincount(pos, weights=member - other, minlength=k)
            deltas = base + corr
            i = int(np.argmin(deltas))
            if deltas[i] < best_delta - _EPS:
                best_delta = float(deltas[i])
                best_swap = (i, j)
        if best_swap is None:
            return med, float(dnear.sum())
        med = med.copy()
        med[best_swap[0]] = best_swap[1]
        med = np.sort(med)


def _canonicalize(ids, med, pos) -> Clustering:
    clusters = {}
    for idx, p in enumerate(pos):
        clusters.setdefault(int(p), []).append(idx)
    order = sorted(clusters, key=lambda c: (-len(clusters[c]), min(clusters[c])))
    relabel = {c: i + 1 for i, c in enumerate(order)}
    assignment = {ids[idx]: relabel[int(p)] for idx, p in enumerate(pos)}
    medoids = {relabel[c]: ids[int(med[c])] for c in clusters}
    return assignment, medoids


def k_medoids(d: DissimilarityMatrix, k: int, seed: int = 0, restarts: int = 20) -> Clustering:
    """PAM over a precomputed dissimilarity matrix; best of `restarts`."""
    n = d.n
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range [1, {n}]")
    m = d.values
    if k == n:
        med = np.arange(n, dtype=np.int64)
        best = (med, 0.0)
    else:
        best = None
        for r in range(max(1, restarts)):
            if r == 0:
                med0 = _build_init(m, k)
            else:
                rng = rng_for(seed, f"kmedoids-restart-{r}")
                med0 = np.sort(rng.choice(n, size=k, replace=False).astype(np.int64))
            med, cost = _swap_phase(m, med0)
            if best is None or cost < best[1] - _EPS:
                best = (med, cost)
    med, cost = best
    pos, dnear = _assign(m, med)
    assignment, medoids = _canonicalize(d.ids, med, pos)
    return Clustering(k=k, assignment=assignment, medoids=medoids, cost=float(dnear.sum()))


def silhouette(d: DissimilarityMatrix, clustering: Clustering) -> float:
    """Mean silhouette width; singletons and a=b=0 points contribute 0."""
    if clustering.k < 2:
        raise ValueError("silhouette needs k >= 2")
    labels = np.array([clustering.assignment[i] for i in d.ids], dtype=np.int64)
    if set(clustering.assignment) != set(d.ids):
        raise ValueError("clustering does not cover the matrix's pattern set")
    m = d.values
    n = d.n
    scores = np.zeros(n, dtype=np.float64)
    cluster_ids = np.unique(labels)
    masks = {c: labels == c for c in cluster_ids}
    sizes = {c: int(masks[c].sum()) for c in cluster_ids}
    for i in range(n):
        c = labels[i]
        if sizes[c] == 1:
            continue  # singleton convention: s = 0
        a = m[i, masks[c]].sum() / (sizes[c] - 1)
        b = min(m[i, masks[o]].mean() for o in cluster_ids if o != c)
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


@dataclass(frozen=True)
class SweepEntry:
    k: int
    clustering: Clustering
    silhouette: float


@dataclass(frozen=True)
class SweepReport:
    """One clustering per k plus the transition counts between consecutive
    k values (how many patterns move from cluster c to cluster c')."""

    entries: tuple[SweepEntry, ...]
    transitions: tuple[tuple[int, int, int, int], ...]  # (k, from, to, count)

    @property
    def best_k(self) -> int:
        best = max(self.entries, key=lambda e: (e.silhouette, -e.k))
        return best.k

    def entry(self, k: int) -> SweepEntry:
        for e in self.entries:
            if e.k == k:
                return e
        raise KeyError(k)


def sweep_k(d: DissimilarityMatrix, k_min: int = 2, k_max: int | None = None,
            seed: int = 0, restarts: int = 20) -> SweepReport:
    """Cluster for every k in [k_min, k_max] and score with the silhouette."""
    n = d.n
    if k_max is None:
        k_max = n
    if not 2 <= k_min <= k_max <= n:
        raise ValueError(f"need 2 <= k_min <= k_max <= {n}")
    entries = []
    for k in range(k_min, k_max + 1):
        c = k_medoids(d, k, seed=seed, restarts=restarts)
        entries.append(SweepEntry(k, c, silhouette(d, c)))
    transitions = []
    for prev, cur in zip(entries, entries[1:]):
        counts = {}
        for rid in d.ids:
            key = (prev.clustering.assignment[rid], cur.clustering.assignment[rid])
            counts[key] = counts.get(key, 0) + 1
        for (a, b), cnt in sorted(counts.items()):
            transitions.append((prev.k, a, b, cnt))
    return SweepReport(tuple(entries), tuple(transitions))
