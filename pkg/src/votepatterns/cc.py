"""Correlation clustering: minimum-frustration partitions of signed graphs.

A partition's imbalance is the total absolute weight of misplaced pairs:
positive weights across blocks plus negative weights inside a block.
``solve_exact`` certifies a global optimum by branch and bound (subject to
time/node limits), ``brute_force`` is the enumeration oracle for small
graphs, ``solve_heuristic`` is the greedy-plus-local-search fallback.

Unweighted roll-call layers embed as dense matrices with weights in
{-1, 0, +1}; weighted consensus graphs share the same code path.

Determinism: nodes are ordered by ascending id, partitions compare by their
restricted-growth string over that order, and cost ties resolve to the
lexicographically smallest string. All three solvers accumulate costs in the
same floating-point order, so their costs are directly comparable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels

BRUTE_FORCE_MAX_NODES = 12


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty blocks covering a node universe, in canonical form:
    blocks ordered by (size desc, smallest member asc), members sorted."""

    blocks: tuple[tuple, ...]

    @staticmethod
    def from_blocks(blocks) -> "Partition":
        cleaned = []
        seen = set()
        for block in blocks:
            members = tuple(sorted(block))
            if not members:
                continue
            for m in members:
                if m in seen:
                    raise ValueError(f"member {m!r} appears in more than one block")
                seen.add(m)
            cleaned.append(members)
        if not cleaned:
            raise ValueError("partition must have at least one non-empty block")
        cleaned.sort(key=lambda b: (-len(b), b[0]))
        return Partition(tuple(cleaned))

    @staticmethod
    def from_labels(nodes, labels) -> "Partition":
        groups = {}
        for node, lab in zip(nodes, labels):
            groups.setdefault(int(lab), []).append(node)
        return Partition.from_blocks(groups.values())

    @property
    def members(self) -> frozenset:
        return frozenset(m for b in self.blocks for m in b)

    def __len__(self):
        return len(self.blocks)

    def block_of(self) -> dict:
        return {m: i for i, b in enumerate(self.blocks) for m in b}

    def labels_for(self, nodes) -> np.ndarray:
        """Block index per node, in the order given."""
        lookup = self.block_of()
        return np.array([lookup[n] for n in nodes], dtype=np.int64)

    def rgs(self, nodes=None) -> np.ndarray:
        """Restricted-growth string over ``nodes`` (default: sorted members)."""
        if nodes is None:
            nodes = sorted(self.members)
        raw = self.labels_for(nodes)
        out = np.empty(len(raw), dtype=np.int64)
        mapping = {}
        for i, lab in enumerate(raw):
            out[i] = mapping.setdefault(int(lab), len(mapping))
        return out

    def restrict(self, members) -> "Partition":
        """Drop everything outside ``members``; empty blocks disappear."""
        keep = set(members)
        blocks = [[m for m in b if m in keep] for b in self.blocks]
        blocks = [b for b in blocks if b]
        if not blocks:
            raise ValueError("restriction leaves no members")
        return Partition.from_blocks(blocks)


@dataclass(frozen=True)
class WeightedSignedGraph:
    """Symmetric weights in [-1, 1] over nodes sorted ascending; 0 = no edge."""

    nodes: tuple
    weights: np.ndarray

    def __post_init__(self):
        n = len(self.nodes)
        w = self.weights
        if w.shape != (n, n):
            raise ValueError(f"weight matrix shape {w.shape} does not match {n} nodes")
        if list(self.nodes) != sorted(self.nodes):
            raise ValueError("nodes must be sorted ascending")
        if len(set(self.nodes)) != n:
            raise ValueError("duplicate node ids")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if np.any(np.abs(w) > 1.0):
            raise ValueError("weights must lie in [-1, 1]")
        if not np.array_equal(w, w.T):
            raise ValueError("weight matrix must be symmetric")
        if np.any(np.diagonal(w) != 0.0):
            raise ValueError("self-weights must be zero")
        w.setflags(write=False)

    @staticmethod
    def from_edges(nodes, edges) -> "WeightedSignedGraph":
        """Build from (u, v, weight) triples; missing pairs get weight 0."""
        order = tuple(sorted(nodes))
        index = {n: i for i, n in enumerate(order)}
        w = np.zeros((len(order), len(order)), dtype=np.float64)
        for u, v, weight in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            i, j = index[u], index[v]
            w[i, j] = weight
            w[j, i] = weight
        return WeightedSignedGraph(order, w)

    @property
    def n(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class SolveLimits:
    """Guardrails for solve_exact; None means unlimited."""

    time_s: float | None = 60.0
    max_nodes: int | None = None


@dataclass(frozen=True)
class CCSolution:
    partition: Partition
    cost: float
    optimal: bool
    nodes_explored: int


def imbalance(graph: WeightedSignedGraph, partition: Partition) -> float:
    """Total frustration of ``partition`` on ``graph``: positive weight across
    blocks plus absolute negative weight within blocks."""
    if partition.members != frozenset(graph.nodes):
        raise ValueError("partition does not cover the graph's node set")
    labels = partition.labels_for(graph.nodes)
    return float(_kernels.assignment_cost(graph.weights, labels))


def _solution(graph, labels, optimal, explored) -> CCSolution:
    cost = float(_kernels.assignment_cost(graph.weights, np.asarray(labels, dtype=np.int64)))
    return CCSolution(Partition.from_labels(graph.nodes, labels), cost, optimal, int(explored))


def brute_force(graph: WeightedSignedGraph) -> CCSolution:
    """Certified optimum by full enumeration. Enforces n <= 12."""
    n = graph.n
    if n == 0:
        raise ValueError("empty graph")
    if n > BRUTE_FORCE_MAX_NODES:
        raise ValueError(f"graph too large for brute force (n={n} > {BRUTE_FORCE_MAX_NODES})")
    labels, _, count = _kernels.brute_force_rgs(graph.weights)
    return _solution(graph, labels, True, count)


def solve_heuristic(graph: WeightedSignedGraph, seed: int = 0) -> CCSolution:
    """Greedy insertion in id order plus single-node-move local search.

    Always reports optimal=False. ``seed`` is accepted for interface
    stability; the procedure itself is deterministic and ignores it.
    """
    if graph.n == 0:
        raise ValueError("empty graph")
    labels, evals = _kernels.greedy_local(graph.weights)
    return _solution(graph, labels, False, evals)


def solve_exact(graph: WeightedSignedGraph, limits: SolveLimits | None = None) -> CCSolution:
    """Branch and bound, warm-started from the heuristic.

    Returns optimal=True only when the search ran to completion within the
    limits; otherwise the best incumbent found so far, flagged.
    """
    if limits is None:
        limits = SolveLimits()
    n = graph.n
    if n == 0:
        raise ValueError("empty graph")
    if n == 1:
        return _solution(graph, np.zeros(1, dtype=np.int64), True, 1)

    w = np.ascontiguousarray(graph.weights, dtype=np.float64)
    warm, _ = _kernels.greedy_local(w)

    labels = np.zeros(n, dtype=np.int64)
    maxl = np.zeros(n, dtype=np.int64)
    pcost = np.zeros(n, dtype=np.float64)
    trial = np.zeros(n, dtype=np.int64)
    posq = np.zeros((n, n), dtype=np.float64)
    negq = np.zeros((n, n), dtype=np.float64)
    ptot = np.zeros(n, dtype=np.float64)
    snap_pos = np.zeros((n, n), dtype=np.float64)
    snap_neg = np.zeros((n, n), dtype=np.float64)
    snap_ptot = np.zeros((n, n), dtype=np.float64)
    best_labels = warm.astype(np.int64).copy()
    istate = np.array([1, 0, 0], dtype=np.int64)
    fstate = np.array([_kernels.assignment_cost(w, best_labels)], dtype=np.float64)

    # node 0 is pinned to block 0; seed its contribution to the others
    for t in range(1, n):
        wt0 = w[t, 0]
        if wt0 > 0.0:
            posq[t, 0] += wt0
            ptot[t] += wt0
        elif wt0 < 0.0:
            negq[t, 0] -= wt0

    deadline = None if limits.time_s is None else time.monotonic() + limits.time_s
    optimal = False
    while True:
        chunk = 200_000
        if limits.max_nodes is not None:
            chunk = min(chunk, limits.max_nodes - int(istate[1]))
            if chunk <= 0:
                break
        _kernels.bnb_chunk(w, labels, maxl, pcost, trial, posq, negq, ptot,
                           snap_pos, snap_neg, snap_ptot, best_labels,
                           istate, fstate, chunk)
        if istate[2] == 1:
            optimal = True
            break
        if limits.max_nodes is not None and istate[1] >= limits.max_nodes:
            break
        if deadline is not None and time.monotonic() >= deadline:
            break
    return _solution(graph, best_labels, optimal, istate[1])


def read_weighted_edgelist(path, nodes=None) -> WeightedSignedGraph:
    """Read `u,v,weight` lines (the layer edge-list format with a real third
    column; bare signs +1/-1 parse as unweighted ties)."""
    edges = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'u,v,weight', got {line!r}")
            u, v, weight = parts[0], parts[1], float(parts[2])
            edges.append((u, v, weight))
            seen.update((u, v))
    if nodes is None:
        nodes = seen
    return WeightedSignedGraph.from_edges(nodes, edges)
