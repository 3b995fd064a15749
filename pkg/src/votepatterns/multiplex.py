"""Multiplex signed-graph extraction: one unweighted layer per roll-call.

Within a layer, every pair of participating voters gets exactly one signed
edge: positive when both cast the identical value, negative otherwise.
Absent voters never participate; abstainers participate under the KEEP
policy and are removed under DROP. Layers store participants and their
cast values; the edge sets are derived views (observationally equivalent
to explicit storage).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from xml.etree import ElementTree

import numpy as np

from .cc import WeightedSignedGraph
from .ingest import VoteMatrix, VoteValue


class AbstentionPolicy(enum.Enum):
    KEEP = "keep"
    DROP = "drop"


@dataclass(frozen=True)
class SignedLayer:
    rollcall_id: str
    nodes: tuple[str, ...]  # participants, in matrix voter order
    values: np.ndarray      # int8 vote codes aligned with nodes

    def __post_init__(self):
        if self.values.shape != (len(self.nodes),):
            raise ValueError("values must align with nodes")
        self.values.setflags(write=False)

    @property
    def degenerate(self) -> bool:
        return len(self.nodes) < 2

    def edge_sets(self):
        """(positive, negative) frozensets of (u, v) pairs with u < v."""
        pos, neg = [], []
        for i, u in enumerate(self.nodes):
            for j in range(i + 1, len(self.nodes)):
                v = self.nodes[j]
                key = (u, v) if u < v else (v, u)
                (pos if self.values[i] == self.values[j] else neg).append(key)
        return frozenset(pos), frozenset(neg)

    def to_graph(self) -> WeightedSignedGraph:
        """Dense +/-1 embedding over the participants, sorted by id."""
        order = np.argsort(np.array(self.nodes, dtype=object))
        nodes = tuple(self.nodes[i] for i in order)
        vals = self.values[order]
        w = np.where(vals[:, None] == vals[None, :], 1.0, -1.0)
        np.fill_diagonal(w, 0.0)
        return WeightedSignedGraph(nodes, w)


@dataclass(frozen=True)
class MultiplexGraph:
    voter_universe: tuple[str, ...]
    layers: tuple[SignedLayer, ...]
    policy: AbstentionPolicy

    @property
    def p(self) -> int:
        return len(self.layers)


def extract_layer(matrix: VoteMatrix, rollcall_id: str,
                  policy: AbstentionPolicy = AbstentionPolicy.KEEP) -> SignedLayer:
    """Signed layer for one roll-call under the given abstention policy."""
    try:
        col = matrix.rollcall_ids.index(rollcall_id)
    except ValueError:
        raise ValueError(f"unknown rollcall id {rollcall_id!r}")
    codes = matrix.votes[:, col]
    if policy is AbstentionPolicy.KEEP:
        mask = codes != VoteValue.ABSENT.value
    else:
        mask = (codes == VoteValue.FOR.value) | (codes == VoteValue.AGAINST.value)
    idx = np.flatnonzero(mask)
    nodes = tuple(matrix.voters[i].id for i in idx)
    return SignedLayer(rollcall_id, nodes, codes[idx].copy())


def extract_multiplex(matrix: VoteMatrix,
                      policy: AbstentionPolicy = AbstentionPolicy.KEEP) -> MultiplexGraph:
    """One layer per roll-call, in matrix column order. Degenerate layers
    (fewer than two participants) are retained and flagged, keeping indices
    aligned with the input."""
    if not matrix.rollcalls or not matrix.voters:
        raise ValueError("empty vote matrix")
    layers = tuple(extract_layer(matrix, rid, policy) for rid in matrix.rollcall_ids)
    return MultiplexGraph(matrix.voter_ids, layers, policy)


def write_edgelist(layer: SignedLayer, path) -> None:
    """Per-layer export: `u,v,sign` lines with sign in {+1,-1}."""
    pos, neg = layer.edge_sets()
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in sorted(pos):
            fh.write(f"{u},{v},+1\n")
        for u, v in sorted(neg):
            fh.write(f"{u},{v},-1\n")


def write_weighted_edgelist(graph: WeightedSignedGraph, path) -> None:
    """`u,v,weight` lines for weighted graphs (consensus export)."""
    with open(path, "w", encoding="utf-8") as fh:
        for i, u in enumerate(graph.nodes):
            for j in range(i + 1, graph.n):
                w = float(graph.weights[i, j])
                if w != 0.0:
                    fh.write(f"{u},{graph.nodes[j]},{w!r}\n")


def write_graphml(layer: SignedLayer, path) -> None:
    """GraphML export with a `sign` edge attribute, for external viewers."""
    root = ElementTree.Element("graphml", xmlns="http://graphml.graphdrawing.org/xmlns")
    key = ElementTree.SubElement(root, "key")
    key.set("id", "sign")
    key.set("for", "edge")
    key.set("attr.name", "sign")
    key.set("attr.type", "int")
    graph = ElementTree.SubElement(root, "graph")
    graph.set("id", layer.rollcall_id)
    graph.set("edgedefault", "undirected")
    for node in layer.nodes:
        ElementTree.SubElement(graph, "node", id=node)
    pos, neg = layer.edge_sets()
    for sign, edges in ((1, sorted(pos)), (-1, sorted(neg))):
        for u, v in edges:
            edge = ElementTree.SubElement(graph, "edge", source=u, target=v)
            data = ElementTree.SubElement(edge, "data", key="sign")
            data.text = str(sign)
    ElementTree.ElementTree(root).write(path, encoding="unicode", xml_declaration=True)
