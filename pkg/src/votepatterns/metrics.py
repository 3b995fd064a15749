"""Pairwise comparison of voting patterns and the dissimilarity matrix.

Patterns cover different voter sets (participation varies per roll-call),
so every comparison first restricts both partitions to their common
members. Four similarity measures are supported; the matrix maps each to a
dissimilarity D = 1 - value, clamped into [0, 1].

Conventions pinned here because the usual definitions leave them open:

* NMI normalizes by the arithmetic mean of the two entropies; when either
  entropy is zero, NMI is 1 for identical partitions and 0 otherwise.
* ARI with a zero denominator (both partitions all-singletons or both
  one-block) is 1 for identical partitions and 0 otherwise.
* Pattern pairs with no common members get D = 1 plus a warning record
  instead of aborting the whole matrix.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from .cc import Partition


class Measure(enum.Enum):
    PURITY = "purity"
    RI = "ri"
    ARI = "ari"
    NMI = "nmi"


@dataclass(frozen=True)
class Pattern:
    """The partition of the voters participating in one roll-call."""

    rollcall_id: str
    partition: Partition


def _partition_of(x) -> Partition:
    return x.partition if isinstance(x, Pattern) else x


def restrict_common(p, q) -> tuple[Partition, Partition]:
    """Both partitions restricted to the intersection of their member sets.

    Members present in only one pattern are ignored; a fully disjoint pair
    raises ValueError("no common members").
    """
    pp, qq = _partition_of(p), _partition_of(q)
    common = pp.members & qq.members
    if not common:
        raise ValueError("no common members")
    if common == pp.members and common == qq.members:
        return pp, qq
    return pp.restrict(common), qq.restrict(common)


def _check_universe(p: Partition, q: Partition):
    if p.members != q.members:
        raise ValueError("partitions cover different member universes; restrict first")
    n = len(p.members)
    if n == 0:
        raise ValueError("empty universe")
    return n


def _contingency(p: Partition, q: Partition) -> np.ndarray:
    qlab = q.block_of()
    table = np.zeros((len(p.blocks), len(q.blocks)), dtype=np.int64)
    for i, block in enumerate(p.blocks):
        for m in block:
            table[i, qlab[m]] += 1
    return table


def purity_harmonic(p: Partition, q: Partition) -> float:
    """Harmonic mean of the two directed purities (maximal block overlaps)."""
    n = _check_universe(p, q)
    table = _contingency(p, q)
    a = float(table.max(axis=1).sum()) / n  # purity of p against q
    b = float(table.max(axis=0).sum()) / n
    if a == b:
        return a
    return 2.0 * a * b / (a + b)


def _pair_counts(p: Partition, q: Partition):
    # same-same pair counts via the contingency table; exact int arithmetic
    table = _contingency(p, q)
    n = int(table.sum())
    comb = lambda x: x * (x - 1) // 2
    s_both = int(sum(comb(int(v)) for v in table.ravel()))
    s_p = int(sum(comb(int(v)) for v in table.sum(axis=1)))
    s_q = int(sum(comb(int(v)) for v in table.sum(axis=0)))
    return n, comb(n), s_both, s_p, s_q


def rand_index(p: Partition, q: Partition) -> float:
    """Fraction of member pairs treated the same way by both partitions."""
    n = _check_universe(p, q)
    if n < 2:
        raise ValueError("rand index needs at least 2 members")
    n, total, s_both, s_p, s_q = _pair_counts(p, q)
    agree = s_both + (total - s_p - s_q + s_both)
    return agree / total


def adjusted_rand(p: Partition, q: Partition) -> float:
    """Chance-corrected Rand index (permutation model)."""
    _check_universe(p, q)
    n, total, index, s_p, s_q = _pair_counts(p, q)
    if total == 0 or total * (s_p + s_q) == 2 * s_p * s_q:
        # degenerate denominator: both all-singletons or both one-block
        return 1.0 if p == q else 0.0
    expected = s_p * s_q / total
    max_index = (s_p + s_q) / 2.0
    return (index - expected) / (max_index - expected)


def nmi(p: Partition, q: Partition) -> float:
    """Mutual information of the block labels, normalized by the arithmetic
    mean of the two entropies (0*log 0 := 0)."""
    n = _check_universe(p, q)
    if p == q:
        return 1.0
    table = _contingency(p, q)
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    h_p = -sum((x / n) * math.log(x / n) for x in a if x > 0)
    h_q = -sum((x / n) * math.log(x / n) for x in b if x > 0)
    if h_p == 0.0 or h_q == 0.0:
        return 0.0
    mi = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            nij = table[i, j]
            if nij > 0:
                mi += (nij / n) * math.log(nij * n / (a[i] * b[j]))
    value = mi / ((h_p + h_q) / 2.0)
    return min(1.0, max(0.0, value))


_MEASURE_FUNCS = {
    Measure.PURITY: purity_harmonic,
    Measure.RI: rand_index,
    Measure.ARI: adjusted_rand,
    Measure.NMI: nmi,
}


def similarity(p, q, measure: Measure) -> float:
    """Measure value after restricting to common members."""
    pp, qq = restrict_common(p, q)
    return _MEASURE_FUNCS[measure](pp, qq)


@dataclass(frozen=True)
class DissimilarityMatrix:
    ids: tuple[str, ...]
    values: np.ndarray  # symmetric, zero diagonal, entries in [0, 1]
    measure: Measure
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.ids)
        v = self.values
        if v.shape != (n, n):
            raise ValueError("matrix shape does not match ids")
        if np.any(np.diagonal(v) != 0.0):
            raise ValueError("diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise ValueError("matrix must be symmetric")
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValueError("entries must lie in [0, 1]")
        v.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.ids)


def dissimilarity_matrix(patterns, measure: Measure = Measure.PURITY) -> DissimilarityMatrix:
    """D(i,j) = 1 - measure over common members, for every pattern pair.

    Pairs where the measure is undefined (no common members, or fewer than
    two for the Rand index) get maximal dissimilarity 1 and a warning.
    """
    patterns = list(patterns)
    if len(patterns) < 2:
        raise ValueError("need at least 2 patterns")
    ids = tuple(p.rollcall_id for p in patterns)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate pattern ids")
    n = len(patterns)
    d = np.zeros((n, n), dtype=np.float64)
    warnings = []
    for i in range(n):
        for j in range(i + 1, n):
            try:
                value = similarity(patterns[i], patterns[j], measure)
                dij = min(1.0, max(0.0, 1.0 - value))
            except ValueError as exc:
                dij = 1.0
                warnings.append(f"{ids[i]} vs {ids[j]}: {exc}; dissimilarity set to 1")
            d[i, j] = dij
            d[j, i] = dij
    return DissimilarityMatrix(ids, d, measure, tuple(warnings))


def write_distances_csv(matrix: DissimilarityMatrix, path) -> None:
    """CSV with the measure tag in the corner cell and pattern ids as the
    header row/column."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([matrix.measure.value.upper(), *matrix.ids])
        for i, rid in enumerate(matrix.ids):
            writer.writerow([rid, *(repr(float(x)) for x in matrix.values[i])])


def read_distances_csv(path) -> DissimilarityMatrix:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        measure = Measure(header[0].lower())
        ids = tuple(h for h in header[1:])
        rows = []
        for row in reader:
            if not row:
                continue
            rows.append([float(x) for x in row[1:]])
    return DissimilarityMatrix(ids, np.array(rows, dtype=np.float64), measure)
