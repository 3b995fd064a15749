"""Per-cluster signed consensus graphs and characteristic patterns.

For a cluster of patterns, each voter pair gets the weight
(together - apart) / support, where support counts the patterns in which
both voters appear; patterns missing either voter are ignored. Exact ties
and zero-support pairs carry no edge at all, so the solver neither rewards
nor punishes their co-placement. Chronically absent voters (present in
fewer than half the cluster's patterns, by default) are removed before
solving, and the filtered graph goes to the exact CC solver (heuristic
incumbent kept and flagged if limits are hit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cc import CCSolution, Partition, SolveLimits, WeightedSignedGraph, solve_exact
from .ingest import VoteMatrix, VoteValue


@dataclass(frozen=True)
class ConsensusGraph:
    graph: WeightedSignedGraph
    support: np.ndarray  # patterns where both endpoints appear
    presence: dict[str, int]  # patterns where the voter appears
    excluded: tuple[str, ...] = ()

    def __post_init__(self):
        if self.support.shape != self.graph.weights.shape:
            raise ValueError("support matrix must match the weight matrix")
        self.support.setflags(write=False)


def consensus_graph(patterns) -> ConsensusGraph:
    """Signed weighted consensus over the union of the patterns' voters."""
    patterns = list(patterns)
    if not patterns:
        raise ValueError("empty cluster")
    voters = sorted(set().union(*(p.partition.members for p in patterns)))
    index = {v: i for i, v in enumerate(voters)}
    n = len(voters)
    together = np.zeros((n, n), dtype=np.int64)
    support = np.zeros((n, n), dtype=np.int64)
    presence = {v: 0 for v in voters}
    for pat in patterns:
        labels = np.full(n, -1, dtype=np.int64)
        for b, block in enumerate(pat.partition.blocks):
            for m in block:
                labels[index[m]] = b
                presence[m] += 1
        present = labels >= 0
        both = present[:, None] & present[None, :]
        support += both
        together += both & (labels[:, None] == labels[None, :])
    np.fill_diagonal(support, 0)
    np.fill_diagonal(together, 0)
    w = np.where(support > 0, (2.0 * together - support) / np.maximum(support, 1), 0.0)
    np.fill_diagonal(w, 0.0)
    return ConsensusGraph(WeightedSignedGraph(tuple(voters), w), support, presence)


def filter_low_participation(cg: ConsensusGraph, patterns, threshold: float = 0.5) -> ConsensusGraph:
    """Drop voters present in fewer than threshold * cluster-size patterns.

    "At least half" is inclusive: presence == threshold * size is retained.
    Raises if nobody survives.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must lie in (0, 1]")
    total = len(list(patterns))
    if total == 0:
        raise ValueError("empty cluster")
    nodes = cg.graph.nodes
    keep = [i for i, v in enumerate(nodes) if cg.presence[v] >= threshold * total]
    keepset = set(keep)
    excluded = tuple(v for i, v in enumerate(nodes) if i not in keepset)
    if not keep:
        raise ValueError("empty consensus graph: every voter fell below the participation threshold")
    if not excluded:
        return cg
    idx = np.array(keep, dtype=np.int64)
    sub = cg.graph.weights[np.ix_(idx, idx)].copy()
    graph = WeightedSignedGraph(tuple(nodes[i] for i in keep), sub)
    support = cg.support[np.ix_(idx, idx)].copy()
    presence = {v: cg.presence[v] for v in graph.nodes}
    return ConsensusGraph(graph, support, presence, cg.excluded + excluded)


@dataclass(frozen=True)
class CharacteristicPattern:
    """Consensus partition of a cluster's retained voters."""

    cluster_id: int
    partition: Partition
    excluded_voters: tuple[str, ...]
    rollcall_ids: tuple[str, ...]
    cost: float
    optimal: bool
    nodes_explored: int
    faction_summaries: tuple = ()  # filled by summarize_pattern when metadata is available

    @property
    def factions(self) -> tuple[tuple[str, ...], ...]:
        return self.partition.blocks


def filtered_consensus(cluster_patterns, threshold: float = 0.5) -> ConsensusGraph:
    """Consensus graph with the participation filter already applied."""
    cluster_patterns = list(cluster_patterns)
    cg = consensus_graph(cluster_patterns)
    return filter_low_participation(cg, cluster_patterns, threshold)


def characteristic_pattern(cluster_patterns, cc_limits: SolveLimits | None = None,
                           cluster_id: int = 0,
                           participation_threshold: float = 0.5) -> CharacteristicPattern:
    """Consensus graph -> participation filter -> exact CC."""
    cluster_patterns = list(cluster_patterns)
    cg = filtered_consensus(cluster_patterns, participation_threshold)
    sol: CCSolution = solve_exact(cg.graph, cc_limits)
    return CharacteristicPattern(
        cluster_id=cluster_id,
        partition=sol.partition,
        excluded_voters=cg.excluded,
        rollcall_ids=tuple(p.rollcall_id for p in cluster_patterns),
        cost=sol.cost,
        optimal=sol.optimal,
        nodes_explored=sol.nodes_explored,
    )


def summarize_pattern(cp: CharacteristicPattern, voters, matrix: VoteMatrix | None = None,
                      abstain_member_share: float = 0.5,
                      abstain_rollcall_share: float = 0.5) -> list[dict]:
    """Faction-composition table: political-group counts per faction, plus an
    abstentionist flag when more than `abstain_member_share` of a faction's
    members abstained in more than `abstain_rollcall_share` of the cluster's
    roll-calls (vote values required, via `matrix`).
    """
    by_id = {v.id: v for v in voters} if not isinstance(voters, dict) else voters
    abstainers = set()
    if matrix is not None and cp.rollcall_ids:
        cols = [matrix.rollcall_ids.index(r) for r in cp.rollcall_ids]
        sub = matrix.votes[:, cols]
        for i, vid in enumerate(matrix.voter_ids):
            share = float(np.mean(sub[i] == VoteValue.ABSTAIN.value))
            if share > abstain_rollcall_share:
                abstainers.add(vid)
    rows = []
    for f, faction in enumerate(cp.factions):
        groups = {}
        for member in faction:
            voter = by_id.get(member)
            group = voter.group if voter is not None else "?"
            groups[group] = groups.get(group, 0) + 1
        flagged = False
        if matrix is not None and faction:
            share = sum(1 for m in faction if m in abstainers) / len(faction)
            flagged = share > abstain_member_share
        rows.append({
            "faction": f,
            "size": len(faction),
            "groups": dict(sorted(groups.items())),
            "abstentionist": flagged,
        })
    return rows
