import datetime
from math import comb
from xml.etree import ElementTree

import numpy as np
import pytest

from votepatterns.ingest import DocumentMeta, VoteMatrix, Voter
from votepatterns.multiplex import (AbstentionPolicy, extract_layer, extract_multiplex,
                                    write_edgelist, write_graphml)


def make_matrix(columns, voter_ids=None):
    """columns: dict rollcall_id -> list of vote codes (0=FOR 1=AGAINST 2=ABSTAIN 3=ABSENT)."""
    n = len(next(iter(columns.values())))
    voter_ids = voter_ids or [chr(ord("a") + i) for i in range(n)]
    voters = tuple(Voter(v, v.upper(), "FR", "P", "G1") for v in voter_ids)
    docs = tuple(DocumentMeta(rid, rid, datetime.date(2012, 7, 1), frozenset({"CAPM"}))
                 for rid in columns)
    votes = np.array([[columns[rid][i] for rid in columns] for i in range(n)], dtype=np.int8)
    return VoteMatrix(voters, docs, votes)


class TestExtractLayer:
    def test_sign_rule_keep(self):
        m = make_matrix({"r1": [0, 0, 1]})  # a:FOR b:FOR c:AGAINST
        layer = extract_layer(m, "r1", AbstentionPolicy.KEEP)
        pos, neg = layer.edge_sets()
        assert pos == {("a", "b")}
        assert neg == {("a", "c"), ("b", "c")}

    def test_absent_excluded_abstain_kept(self):
        m = make_matrix({"r1": [0, 2, 3]})  # a:FOR b:ABSTAIN c:ABSENT
        layer = extract_layer(m, "r1", AbstentionPolicy.KEEP)
        assert layer.nodes == ("a", "b")
        pos, neg = layer.edge_sets()
        assert pos == frozenset() and neg == {("a", "b")}

    def test_drop_policy_removes_abstainers(self):
        m = make_matrix({"r1": [0, 2, 3]})
        layer = extract_layer(m, "r1", AbstentionPolicy.DROP)
        assert layer.nodes == ("a",)
        assert layer.degenerate
        pos, neg = layer.edge_sets()
        assert pos == frozenset() and neg == frozenset()

    def test_unknown_rollcall(self):
        m = make_matrix({"r1": [0, 0, 0]})
        with pytest.raises(ValueError, match="unknown rollcall"):
            extract_layer(m, "nope")

    def test_abstain_abstain_is_positive(self):
        m = make_matrix({"r1": [2, 2, 1]})
        layer = extract_layer(m, "r1", AbstentionPolicy.KEEP)
        pos, neg = layer.edge_sets()
        assert ("a", "b") in pos and ("a", "c") in neg


class TestExtractMultiplex:
    def test_layer_order_matches_columns(self):
        m = make_matrix({"r1": [0, 0, 0], "r2": [0, 1, 0], "r3": [3, 3, 3]})
        mg = extract_multiplex(m)
        assert mg.p == 3
        assert tuple(l.rollcall_id for l in mg.layers) == ("r1", "r2", "r3")

    def test_all_absent_layer_is_degenerate(self):
        m = make_matrix({"r1": [3, 3, 3]})
        mg = extract_multiplex(m)
        assert mg.layers[0].nodes == () and mg.layers[0].degenerate

    def test_unanimous_layer_all_positive(self):
        m = make_matrix({"r1": [0, 0, 0, 0]}, voter_ids=["a", "b", "c", "d"])
        layer = extract_multiplex(m).layers[0]
        pos, neg = layer.edge_sets()
        assert neg == frozenset() and len(pos) == comb(4, 2)

    def test_empty_matrix_rejected(self):
        voters = (Voter("a", "A", "FR", "P", "G"),)
        with pytest.raises(ValueError, match="empty"):
            extract_multiplex(VoteMatrix(voters, (), np.empty((1, 0), dtype=np.int8)))


class TestInvariants:
    def test_completeness_over_participants(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            n = int(rng.integers(2, 12))
            codes = rng.integers(0, 4, size=n).tolist()
            m = make_matrix({"r": codes}, voter_ids=[f"v{i:02d}" for i in range(n)])
            for policy in AbstentionPolicy:
                layer = extract_layer(m, "r", policy)
                pos, neg = layer.edge_sets()
                assert len(pos) + len(neg) == comb(len(layer.nodes), 2)

    def test_sign_symmetry_for_against_relabel(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            n = int(rng.integers(2, 10))
            codes = rng.integers(0, 4, size=n)
            flipped = np.where(codes == 0, 1, np.where(codes == 1, 0, codes)).tolist()
            m1 = make_matrix({"r": codes.tolist()}, voter_ids=[f"v{i:02d}" for i in range(n)])
            m2 = make_matrix({"r": flipped}, voter_ids=[f"v{i:02d}" for i in range(n)])
            l1, l2 = extract_layer(m1, "r"), extract_layer(m2, "r")
            assert l1.nodes == l2.nodes
            assert l1.edge_sets() == l2.edge_sets()

    def test_participant_sets_by_policy(self):
        m = make_matrix({"r": [0, 1, 2, 3]}, voter_ids=["a", "b", "c", "d"])
        keep = extract_layer(m, "r", AbstentionPolicy.KEEP)
        drop = extract_layer(m, "r", AbstentionPolicy.DROP)
        assert keep.nodes == ("a", "b", "c")
        assert drop.nodes == ("a", "b")


class TestExports:
    def test_edgelist_format(self, tmp_path):
        m = make_matrix({"r1": [0, 0, 1]})
        layer = extract_layer(m, "r1")
        path = tmp_path / "layer.edgelist"
        write_edgelist(layer, path)
        lines = path.read_text().splitlines()
        assert "a,b,+1" in lines and "a,c,-1" in lines and "b,c,-1" in lines

    def test_graphml_parses(self, tmp_path):
        m = make_matrix({"r1": [0, 0, 1]})
        layer = extract_layer(m, "r1")
        path = tmp_path / "layer.graphml"
        write_graphml(layer, path)
        tree = ElementTree.parse(path)
        ns = {"g": "http://graphml.graphdrawing.org/xmlns"}
        nodes = tree.findall(".//g:node", ns)
        edges = tree.findall(".//g:edge", ns)
        assert len(nodes) == 3 and len(edges) == 3

    def test_to_graph_weights(self):
        m = make_matrix({"r1": [0, 0, 1]})
        g = extract_layer(m, "r1").to_graph()
        assert g.nodes == ("a", "b", "c")
        assert g.weights[0, 1] == 1.0 and g.weights[0, 2] == -1.0
