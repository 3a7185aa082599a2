import math
import random

import pytest

from perimere import (IntMatrix, UnionFind, build, canonical_form, extract,
                      parse, splinters, unroll)
from perimere.mergetree import monomial_display
from perimere.synthetic import random_periodic_graph

from .conftest import fig3_left_doc, helix_cross_doc
from .oracles import bfs_components

SQRT2 = math.sqrt(2)


class TestBuildGolden:
    def test_helix_cross_event_sequence(self, helix_cross):
        tree = build(helix_cross)
        seq = [(e.kind, e.time) for e in tree.events]
        assert seq == [
            ("appearance", 1.0), ("appearance", 2.0), ("appearance", 3.0),
            ("appearance", 4.0), ("appearance", 5.0),
            ("catenation", 6.0), ("merger", 7.0), ("merger", 8.0),
            ("catenation", 9.0), ("merger", 10.0), ("catenation", 10.0),
            ("catenation", 11.0), ("merger", 12.0), ("catenation", 13.0),
        ]
        cats = {e.time: e for e in tree.events if e.kind == "catenation"}
        assert cats[6.0].basis.columns == ((1, 1, 0),)
        assert cats[6.0].coeff == pytest.approx(SQRT2, abs=1e-9) and cats[6.0].exp == 2
        assert cats[9.0].basis.columns == ((2, 0, 0),)
        assert cats[9.0].coeff == pytest.approx(2.0, abs=1e-9) and cats[9.0].exp == 2
        assert cats[10.0].basis.columns == ((1, 1, 0), (0, 2, 0))
        assert cats[10.0].coeff == pytest.approx(2.0, abs=1e-9) and cats[10.0].exp == 1
        assert cats[11.0].basis.columns == ((1, 1, 0), (0, 2, 0), (0, 0, 1))
        assert cats[11.0].coeff == pytest.approx(2.0, abs=1e-9) and cats[11.0].exp == 0
        assert cats[13.0].basis.columns == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
        assert cats[13.0].coeff == pytest.approx(1.0, abs=1e-9) and cats[13.0].exp == 0

    def test_helix_cross_beams(self, helix_cross):
        tree = build(helix_cross)
        assert len(tree.beams) == 5
        root = tree.beams[tree.roots()[0]]
        assert root.birth == 1.0 and root.birth_vertex == 1
        assert [(e.start, e.exp) for e in root.epochs] == [(1.0, 3), (12.0, 0), (13.0, 0)]
        assert [round(e.coeff, 9) for e in root.epochs] == [1.0, 2.0, 1.0]
        by_vertex = {b.birth_vertex: b for b in tree.beams}
        assert [(e.start, round(e.coeff, 9), e.exp) for e in by_vertex[2].epochs] == [
            (2.0, 1.0, 3), (6.0, round(SQRT2, 9), 2), (10.0, 2.0, 1), (11.0, 2.0, 0)]
        assert by_vertex[2].death == 12.0
        assert by_vertex[3].death == 10.0
        assert by_vertex[4].death == 7.0
        assert by_vertex[5].death == 8.0

    def test_single_vertex(self):
        g = parse({"dim": 3,
                   "basis": [[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                   "vertices": [{"id": 7, "value": 4.5}], "edges": []})
        tree = build(g)
        assert len(tree.beams) == 1
        b = tree.beams[0]
        assert b.death == math.inf and b.parent is None
        assert len(b.epochs) == 1
        assert b.epochs[0].coeff == pytest.approx(0.5)  # 1 / vol_d
        assert b.epochs[0].exp == 3

    def test_fig3_left_epochs(self, fig3_left):
        tree = build(fig3_left)
        root = tree.beams[tree.roots()[0]]
        assert [(e.start, round(e.coeff, 9), e.exp) for e in root.epochs] == [
            (1.0, 1.0, 2), (7.0, round(SQRT2, 9), 1), (9.0, 1.0, 0)]
        other = tree.beams[1 - tree.roots()[0]]
        assert other.birth == 3.0 and other.death == 5.0

    def test_event_counts(self, helix_cross):
        tree = build(helix_cross)
        kinds = [e.kind for e in tree.events]
        n, m = helix_cross.n, helix_cross.m
        assert kinds.count("appearance") == n
        assert kinds.count("merger") == n - len(tree.roots())
        assert kinds.count("merger") + kinds.count("catenation") <= m + 1  # merger+catenation shares an edge

    def test_doubled_cell_event_counts(self, fig3_left):
        rolled = unroll(fig3_left, IntMatrix.from_rows([[2, 0], [0, 1]]))
        kinds = [e.kind for e in build(rolled).events]
        assert kinds.count("appearance") == 4
        assert kinds.count("merger") == 3
        assert kinds.count("catenation") == 2

    def test_zero_shift_self_loop_produces_no_event(self):
        g = parse({"dim": 2, "basis": [[1.0, 0.0], [0.0, 1.0]],
                   "vertices": [{"id": 0, "value": 0.0}],
                   "edges": [{"id": 1, "u": 0, "v": 0, "value": 1.0, "shift": [0, 0]}]})
        tree = build(g)
        assert [e.kind for e in tree.events] == ["appearance"]


class TestUnionFind:
    def test_fresh_vertex_is_own_root(self):
        uf = UnionFind(2)
        uf.add(5, 1.0)
        assert uf.find(5) == 5

    def test_union_shares_root(self):
        uf = UnionFind(2)
        a = uf.add(5, 1.0)
        b = uf.add(9, 2.0)
        uf.union(a, b, [0, 0])
        assert uf.find(5) == uf.find(9)

    def test_random_sequence_matches_bfs(self):
        rng = random.Random(3)
        for _ in range(20):
            n = rng.randint(2, 30)
            uf = UnionFind(2)
            for i in range(n):
                uf.add(i, float(i))
            pairs = []
            for _ in range(rng.randint(0, 40)):
                u, v = rng.randrange(n), rng.randrange(n)
                pairs.append((u, v))
                r, s = uf.root[u], uf.root[v]
                if r != s:
                    uf.union(r, s, [rng.randint(-1, 1), rng.randint(-1, 1)])
            got = {}
            for i in range(n):
                got.setdefault(uf.find(i), set()).add(i)
            assert {frozenset(c) for c in got.values()} == bfs_components(range(n), pairs)

    def test_find_unknown_vertex(self):
        uf = UnionFind(2)
        with pytest.raises(KeyError):
            uf.find(3)

    def test_relabel_counts_bounded(self):
        rng = random.Random(4)
        g = random_periodic_graph(rng, n=40, m=120)
        tree = build(g, count_relabels=True)
        bound = math.floor(math.log2(g.n))
        assert max(tree.uf.relabels) <= bound


class TestInvariants:
    def test_monotonic_epochs_and_integer_ratio(self):
        rng = random.Random(5)
        for _ in range(20):
            g = random_periodic_graph(rng, n=rng.randint(2, 40), m=rng.randint(0, 100))
            tree = build(g)
            for beam in tree.beams:
                eps = beam.epochs
                for a, b in zip(eps, eps[1:]):
                    assert b.exp < a.exp or (b.exp == a.exp and b.coeff < a.coeff)
                    if a.exp == b.exp:
                        ratio = a.coeff / b.coeff
                        assert ratio >= 2 - 1e-9
                        assert abs(ratio - round(ratio)) <= 1e-9

    def test_forest_single_tree_iff_connected(self):
        rng = random.Random(12)
        for _ in range(10):
            g = random_periodic_graph(rng, n=rng.randint(2, 25), m=rng.randint(0, 50))
            tree = build(g)
            assert (len(tree.roots()) == 1) == g.is_connected()

    def test_beam_and_event_accounting(self):
        rng = random.Random(6)
        for _ in range(15):
            g = random_periodic_graph(rng, n=rng.randint(1, 30), m=rng.randint(0, 80))
            tree = build(g)
            assert len(tree.beams) == g.n
            kinds = [e.kind for e in tree.events]
            assert kinds.count("appearance") == g.n
            assert kinds.count("merger") == g.n - len(tree.roots())


    def test_edge_event_partition(self):
        # every edge is a merger, a catenation, or a no-op; an edge may pair a
        # merger with a same-height catenation but never duplicates a kind
        rng = random.Random(13)
        for _ in range(12):
            g = random_periodic_graph(rng, n=rng.randint(2, 30), m=rng.randint(0, 70))
            tree = build(g)
            edge_events = {}
            for e in tree.events:
                if e.kind in ("merger", "catenation"):
                    edge_events.setdefault(e.cell, []).append(e.kind)
            for kinds in edge_events.values():
                assert kinds.count("merger") <= 1
                assert kinds.count("catenation") <= 1
            mergers = sum(1 for k in edge_events.values() if "merger" in k)
            cat_only = sum(1 for k in edge_events.values() if k == ["catenation"])
            noops = g.m - len(edge_events)
            assert mergers + cat_only + noops == g.m


class TestSplinters:
    def test_identity(self, fig3_left):
        t = build(fig3_left)
        assert splinters(t, t)

    def test_unrolled_splinters_base(self, fig3_left):
        t = build(fig3_left)
        t2 = build(unroll(fig3_left, IntMatrix.from_rows([[2, 0], [0, 1]])))
        assert splinters(t2, t)
        assert not splinters(t, t2)

    def test_mismatched_graphs(self, fig3_left, helix_cross):
        assert not splinters(build(fig3_left), build(helix_cross))

    def test_random_sublattices_3d(self, helix_cross):
        rng = random.Random(7)
        t = build(helix_cross)
        trials = 0
        while trials < 6:
            s = IntMatrix.from_rows([[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)])
            if not 1 <= abs(s.det()) <= 4:
                continue
            trials += 1
            assert splinters(build(unroll(helix_cross, s)), t)


    def test_disconnected_forest_splinters(self):
        rng = random.Random(14)
        for _ in range(6):
            # two independent blocks guarantee a disconnected quotient
            g1 = random_periodic_graph(rng, dim=2, n=4, m=5)
            doc = {"dim": 2, "basis": [[1.0, 0.0], [0.0, 1.0]],
                   "vertices": ([{"id": v.id, "value": v.value} for v in g1.vertices]
                                + [{"id": v.id + 100, "value": v.value + 0.25}
                                   for v in g1.vertices]),
                   "edges": ([{"id": e.id, "u": e.u, "v": e.v, "value": e.value,
                               "shift": list(e.shift)} for e in g1.edges]
                             + [{"id": e.id + 100, "u": e.u + 100, "v": e.v + 100,
                                 "value": e.value + 0.25, "shift": list(e.shift)}
                                for e in g1.edges])}
            g = parse(doc)
            tree = build(g)
            assert len(tree.roots()) >= 2
            while True:
                s = IntMatrix.from_rows([[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)])
                if 1 <= abs(s.det()) <= 3:
                    break
            assert splinters(build(unroll(g, s)), tree)


class TestCanonicalForm:
    def test_self_equal(self, helix_cross):
        t = build(helix_cross)
        assert canonical_form(t) == canonical_form(t)

    def test_sibling_order_insensitive(self):
        doc = {
            "dim": 2, "basis": [[1.0, 0.0], [0.0, 1.0]],
            "vertices": [{"id": 0, "value": 0.0}, {"id": 1, "value": 1.0}, {"id": 2, "value": 1.0}],
            "edges": [
                {"id": 3, "u": 0, "v": 1, "value": 2.0, "shift": [0, 0]},
                {"id": 4, "u": 0, "v": 2, "value": 2.5, "shift": [0, 0]},
            ],
        }
        swapped = {
            "dim": 2, "basis": [[1.0, 0.0], [0.0, 1.0]],
            "vertices": [{"id": 0, "value": 0.0}, {"id": 1, "value": 1.0}, {"id": 2, "value": 1.0}],
            "edges": [
                {"id": 3, "u": 0, "v": 2, "value": 2.0, "shift": [0, 0]},
                {"id": 4, "u": 0, "v": 1, "value": 2.5, "shift": [0, 0]},
            ],
        }
        assert canonical_form(build(parse(doc))) == canonical_form(build(parse(swapped)))

    def test_base_differs_from_unrolled(self, fig3_left):
        t = build(fig3_left)
        t2 = build(unroll(fig3_left, IntMatrix.from_rows([[2, 0], [0, 1]])))
        assert canonical_form(t) != canonical_form(t2)


class TestSerialization:
    def test_json_structure(self, helix_cross):
        tree = build(helix_cross)
        doc = tree.to_json_dict()
        assert len(doc["beams"]) == 5
        assert doc["beams"][0]["death"] is None
        assert doc["events"][0]["kind"] == "appearance"

    def test_dot_output(self, fig3_left):
        dot = build(fig3_left).to_dot()
        assert dot.startswith("digraph")
        assert "->" in dot

    def test_monomial_display(self):
        assert monomial_display(1.0, 0) == "1"
        assert monomial_display(2.0, 1) == "4R"
        assert monomial_display(2.0, 2) == f"{2 * math.pi:.9g}R^2"
