"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own code paths: set
partitions are enumerated recursively, frustration is counted from edge
sets, and pair statistics come from literal double loops.
"""

import numpy as np
import pytest

from votepatterns.cc import Partition, WeightedSignedGraph


def all_partitions(items):
    """Every set partition of `items`, as lists of lists (recursive oracle)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in all_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def frustration_oracle(graph: WeightedSignedGraph, blocks) -> float:
    """Imbalance computed from scratch over explicit block sets."""
    label = {}
    for b, block in enumerate(blocks):
        for m in block:
            label[m] = b
    cost = 0.0
    nodes = graph.nodes
    for i, u in enumerate(nodes):
        for j in range(i + 1, len(nodes)):
            v = nodes[j]
            w = float(graph.weights[i, j])
            if w > 0 and label[u] != label[v]:
                cost += w
            elif w < 0 and label[u] == label[v]:
                cost -= w
    return cost


def min_cost_oracle(graph: WeightedSignedGraph) -> float:
    return min(frustration_oracle(graph, blocks) for blocks in all_partitions(graph.nodes))


def random_graph(rng, n, density=0.7) -> WeightedSignedGraph:
    w = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i):
            if rng.random() < density:
                w[i, j] = w[j, i] = rng.uniform(-1.0, 1.0)
    return WeightedSignedGraph(tuple(f"n{i:02d}" for i in range(n)), w)


def balanced_graph(labels) -> WeightedSignedGraph:
    labels = np.asarray(labels)
    w = np.where(labels[:, None] == labels[None, :], 1.0, -1.0)
    np.fill_diagonal(w, 0.0)
    nodes = tuple(f"n{i:02d}" for i in range(len(labels)))
    return WeightedSignedGraph(nodes, w)


def pair_stats_oracle(p: Partition, q: Partition):
    """(n11, n10, n01, n00) over member pairs, by explicit enumeration."""
    members = sorted(p.members)
    bp, bq = p.block_of(), q.block_of()
    n11 = n10 = n01 = n00 = 0
    for i, a in enumerate(members):
        for b in members[i + 1:]:
            sp, sq = bp[a] == bp[b], bq[a] == bq[b]
            if sp and sq:
                n11 += 1
            elif sp:
                n10 += 1
            elif sq:
                n01 += 1
            else:
                n00 += 1
    return n11, n10, n01, n00


def rand_index_oracle(p, q) -> float:
    n11, n10, n01, n00 = pair_stats_oracle(p, q)
    return (n11 + n00) / (n11 + n10 + n01 + n00)


def adjusted_rand_oracle(p, q) -> float:
    n11, n10, n01, n00 = pair_stats_oracle(p, q)
    den = (n11 + n10) * (n10 + n00) + (n11 + n01) * (n01 + n00)
    if den == 0:
        return 1.0 if p == q else 0.0
    return 2.0 * (n11 * n00 - n10 * n01) / den


def purity_oracle(p: Partition, q: Partition) -> float:
    """Harmonic-mean purity via literal set intersections."""
    n = len(p.members)

    def directed(a, b):
        return sum(max(len(set(x) & set(y)) for y in b.blocks) for x in a.blocks) / n

    pa, pb = directed(p, q), directed(q, p)
    if pa == pb:
        return pa
    return 2 * pa * pb / (pa + pb)


def nmi_oracle(p: Partition, q: Partition) -> float:
    import math
    if p == q:
        return 1.0
    n = len(p.members)
    bq = q.block_of()
    joint = {}
    for i, block in enumerate(p.blocks):
        for m in block:
            joint[(i, bq[m])] = joint.get((i, bq[m]), 0) + 1
    pa = {i: len(b) / n for i, b in enumerate(p.blocks)}
    qa = {j: len(b) / n for j, b in enumerate(q.blocks)}
    h_p = -sum(v * math.log(v) for v in pa.values() if v > 0)
    h_q = -sum(v * math.log(v) for v in qa.values() if v > 0)
    if h_p == 0.0 or h_q == 0.0:
        return 0.0
    mi = sum((c / n) * math.log((c / n) / (pa[i] * qa[j])) for (i, j), c in joint.items())
    return min(1.0, max(0.0, mi / ((h_p + h_q) / 2)))


def random_partition(rng, members) -> Partition:
    members = list(members)
    k = int(rng.integers(1, len(members) + 1))
    labels = rng.integers(0, k, size=len(members))
    blocks = {}
    for m, lab in zip(members, labels):
        blocks.setdefault(int(lab), []).append(m)
    return Partition.from_blocks(blocks.values())


@pytest.fixture
def vote_fixture_dir(tmp_path):
    """A tiny well-formed 3-voter x 2-rollcall dataset on disk."""
    (tmp_path / "votes.csv").write_text(
        "voter_id,rc1,rc2\n"
        "a,FOR,AGAINST\n"
        "b,for,ABSTAIN\n"
        "c,AGAINST,ABSENT\n",
        encoding="utf-8")
    (tmp_path / "voters.csv").write_text(
        "voter_id,name,country,party,group\n"
        "a,Alice,FR,P1,G1\n"
        "b,Bob,FR,P2,G1\n"
        "c,Cora,IT,P3,G2\n",
        encoding="utf-8")
    (tmp_path / "docs.csv").write_text(
        "rollcall_id,title,date,subdomains\n"
        "rc1,First doc,2012-09-01,CAPM\n"
        "rc2,Second doc,2013-02-10,CAPM;SSM\n",
        encoding="utf-8")
    return tmp_path
