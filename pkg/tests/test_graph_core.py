"""Graph representation, edge-list I/O, induced subgraphs, unions, DSU."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgsg import DisjointSetUnion, Graph, disjoint_union, induced_subgraph, load_edge_list
from lgsg.graph import save_edge_list

from .reference import brute_components
from .util import complete_graph, path_graph, star_graph


def write(tmp_path, text, name="g.edges"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadEdgeList:
    def test_duplicate_orientation_collapse(self, tmp_path):
        g = load_edge_list(write(tmp_path, "0 1\n1 2\n2 1\n"))
        assert g.n == 3
        assert g.edges == frozenset({(0, 1), (1, 2)})

    def test_self_loop_dropped_with_counter(self, tmp_path):
        g = load_edge_list(write(tmp_path, "0 0\n0 1\n"))
        assert g.n == 2
        assert g.edges == frozenset({(0, 1)})
        assert g.self_loops_dropped == 1

    def test_comments_and_declared_node_count(self, tmp_path):
        g = load_edge_list(write(tmp_path, "# nodes: 5\n# a comment\n0 1\n"))
        assert g.n == 5
        assert g.n_edges == 1

    def test_declared_count_too_small(self, tmp_path):
        with pytest.raises(ValueError):
            load_edge_list(write(tmp_path, "# nodes: 2\n0 3\n"))

    def test_non_integer_token(self, tmp_path):
        with pytest.raises(ValueError):
            load_edge_list(write(tmp_path, "0 x\n"))

    def test_wrong_token_count(self, tmp_path):
        with pytest.raises(ValueError):
            load_edge_list(write(tmp_path, "0 1 2\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_edge_list(tmp_path / "nope.edges")

    def test_reindex_with_gaps_persists_mapping(self, tmp_path):
        p = write(tmp_path, "0 7\n7 20\n")
        g = load_edge_list(p, reindex=True)
        assert g.n == 3
        assert g.edges == frozenset({(0, 1), (1, 2)})
        assert (tmp_path / "g.edges.nodemap.json").exists()

    def test_features_attach(self, tmp_path):
        p = write(tmp_path, "0 1\n1 2\n")
        f = write(tmp_path, "1.0,2.0\n3.0,4.0\n5.0,6.0\n", name="f.csv")
        g = load_edge_list(p, features_path=f)
        assert g.features.shape == (3, 2)
        assert g.features[2, 1] == 6.0

    def test_feature_row_count_mismatch(self, tmp_path):
        p = write(tmp_path, "0 1\n1 2\n")
        f = write(tmp_path, "1.0\n2.0\n", name="f.csv")
        with pytest.raises(ValueError):
            load_edge_list(p, features_path=f)

    def test_non_finite_feature(self, tmp_path):
        p = write(tmp_path, "0 1\n")
        f = write(tmp_path, "1.0\nnan\n", name="f.csv")
        with pytest.raises(ValueError):
            load_edge_list(p, features_path=f)

    @given(st.permutations(["0 1", "1 2", "2 3", "3 0", "1 3"]))
    @settings(max_examples=25, deadline=None)
    def test_line_order_irrelevant(self, lines):
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            from pathlib import Path

            g = load_edge_list(write(Path(tmp), "\n".join(lines) + "\n"))
        assert g.edges == frozenset({(0, 1), (1, 2), (2, 3), (0, 3), (1, 3)})

    def test_roundtrip_preserves_isolates(self, tmp_path):
        g = Graph(6, [(0, 1), (2, 3)])
        p = tmp_path / "out.edges"
        save_edge_list(g, p)
        g2 = load_edge_list(p)
        assert g2.n == 6
        assert g2.edges == g.edges


class TestGraphInvariants:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 5)])

    def test_neighbors_sorted_and_symmetric(self):
        g = Graph(4, [(2, 0), (0, 1)])
        assert g.neighbors(0).tolist() == [1, 2]
        assert g.has_edge(0, 2) and g.has_edge(2, 0)

    def test_degrees(self):
        assert star_graph(4).degrees().tolist() == [3, 1, 1, 1]


class TestInducedSubgraph:
    def test_triangle_pair(self):
        g = complete_graph(3)
        sub = induced_subgraph(g, [0, 1])
        assert sub.n == 2 and sub.edges == frozenset({(0, 1)})

    def test_non_adjacent_pair(self):
        g = path_graph(3)
        sub = induced_subgraph(g, [0, 2])
        assert sub.n == 2 and sub.n_edges == 0

    def test_star_leaves_edgeless(self):
        g = star_graph(4)
        sub = induced_subgraph(g, [1, 2, 3])
        assert sub.n == 3 and sub.n_edges == 0

    def test_identity(self):
        g = Graph(5, [(0, 1), (1, 2), (3, 4), (0, 4)])
        sub = induced_subgraph(g, range(5))
        assert sub.edges == g.edges

    def test_duplicate_node_rejected(self):
        with pytest.raises(ValueError):
            induced_subgraph(path_graph(3), [0, 0])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            induced_subgraph(path_graph(3), [0, 7])

    def test_features_copied_in_order(self):
        feats = np.arange(8.0).reshape(4, 2)
        g = Graph(4, [(0, 1)], features=feats)
        sub = induced_subgraph(g, [3, 1])
        assert sub.features.tolist() == [[6.0, 7.0], [2.0, 3.0]]


class TestDisjointUnion:
    def test_two_triangles(self):
        g = disjoint_union([complete_graph(3), complete_graph(3)])
        assert g.n == 6 and g.n_edges == 6
        assert brute_components(6, list(g.edges)) == 2

    def test_identity_single(self):
        g1 = Graph(1, [])
        g = disjoint_union([g1])
        assert g.n == 1 and g.n_edges == 0

    def test_path_counts(self):
        g = disjoint_union([path_graph(2), path_graph(3)])
        assert g.n == 5 and g.n_edges == 3

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            disjoint_union([])

    def test_degree_sequences_preserved(self):
        a, b = star_graph(4), path_graph(3)
        u = disjoint_union([a, b])
        assert sorted(u.degrees().tolist()) == sorted(
            a.degrees().tolist() + b.degrees().tolist()
        )


class TestDSU:
    def test_fresh_find(self):
        d = DisjointSetUnion(5)
        assert d.find(3) == 3

    def test_link_decrements_groups(self):
        d = DisjointSetUnion(4)
        assert d.link(0, 1) is True
        assert d.same(0, 1)
        assert d.groups == 3

    def test_repeat_link_is_noop(self):
        d = DisjointSetUnion(4)
        d.link(0, 1)
        assert d.link(1, 0) is False
        assert d.groups == 3

    def test_find_idempotent(self):
        d = DisjointSetUnion(6)
        d.link(0, 1)
        d.link(1, 2)
        assert d.find(d.find(2)) == d.find(2)

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            DisjointSetUnion(3).find(3)

    @given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=30))
    @settings(max_examples=50, deadline=None)
    def test_groups_match_reachability(self, links):
        d = DisjointSetUnion(10)
        for u, v in links:
            d.link(u, v)
        assert d.groups == brute_components(10, links)
        assert sum(d.component_sizes().values()) == 10
        assert d.groups == len({d.find(x) for x in range(10)})
