"""
Tests for labeled graphs and the graph transformations.

Tests cover:
- Construction, validation and degree bookkeeping
- Direct product graph structure and its walk counts
- Floyd transformation against networkx shortest paths
- Morgan index and the non-tottering expansion
"""

import itertools
from collections import Counter, defaultdict

import networkx as nx
import numpy as np
import pytest

from app.errors import DisconnectedGraph, InvalidGraph
from app.graphs import (
    LabeledGraph,
    adjacency_matrix,
    direct_product,
    ensure_valid,
    floyd_transform,
    morgan_index,
    non_tottering_transform,
    product_structure,
    underlying_vertex,
    validate_graph,
)
from tests.graph_factory import cycle, isolated, path, random_molecule, single_edge, star, to_networkx


def _fixture_graphs(rng, max_vertices):
    graphs = [
        isolated(0),
        single_edge(0, 1),
        single_edge(0, 0, bond=1),
        path([0, 1, 0]),
        path([0, 0, 1, 1], bonds=[0, 1, 0]),
        path([1, 0, 0, 1, 0]),
        cycle([0, 0, 0]),
        cycle([0, 1, 0, 1]),
        cycle([0, 0, 1, 0, 1], bond=1),
        star(0, [1, 1, 0]),
    ]
    graphs += [random_molecule(rng, n_min=3, n_max=max_vertices, vertex_labels=2, rings=2) for _ in range(6)]
    return [g for g in graphs if g.vertex_count <= max_vertices]


def _walks(g, length, start=None):
    """Vertex sequences of every walk with ``length`` edges."""
    starts = range(g.vertex_count) if start is None else [start]
    frontier = [(v,) for v in starts]
    for _ in range(length):
        frontier = [walk + (w,) for walk in frontier for w in g.neighbors[walk[-1]]]
    return frontier


def _label_sequence(g, walk):
    labels = [g.vertex_labels[walk[0]]]
    for u, v in zip(walk, walk[1:]):
        labels += [g.edge_label(u, v), g.vertex_labels[v]]
    return tuple(labels)


def _walks_by_endpoints(g, length):
    counts = defaultdict(Counter)
    for walk in _walks(g, length):
        counts[(walk[0], walk[-1])][_label_sequence(g, walk)] += 1
    return counts


class TestLabeledGraph:
    """Construction and basic properties."""

    def test_from_edges_stores_both_orientations(self):
        g = single_edge(0, 1, bond=2)
        assert g.edges == frozenset({(0, 1), (1, 0)})
        assert g.edge_label(0, 1) == 2
        assert g.edge_label(1, 0) == 2
        assert g.directed_edge_count == 2
        assert g.undirected_edge_count == 1

    def test_degrees_and_neighbors(self):
        g = star(0, [1, 1, 2])
        assert g.neighbors[0] == (1, 2, 3)
        assert g.degrees.tolist() == [3, 1, 1, 1]
        assert g.max_degree == 3

    def test_edge_array_is_sorted(self):
        g = path([0, 1, 2], bonds=[5, 6])
        assert g.edge_array.tolist() == [[0, 1, 5], [1, 0, 5], [1, 2, 6], [2, 1, 6]]

    def test_empty_graph(self):
        g = LabeledGraph.from_edges([], [])
        assert g.vertex_count == 0
        assert g.max_degree == 0
        assert g.edge_array.shape == (0, 3)
        assert g.is_connected()

    def test_hashable(self):
        g = path([0, 1, 2], bonds=[1, 0])
        same = path([0, 1, 2], bonds=[1, 0])
        assert g == same
        assert hash(g) == hash(same)
        assert len({g, same, path([0, 1, 2])}) == 2
        assert {g: "x"}[same] == "x"

    def test_connectivity(self):
        assert cycle([0, 0, 0, 0]).is_connected()
        two_parts = LabeledGraph.from_edges([0, 0, 0, 0], [(0, 1), (2, 3)])
        assert not two_parts.is_connected()

    def test_relabeled_keeps_structure(self):
        g = path([0, 1, 2], name="p")
        h = g.relabeled([7, 7, 7])
        assert h.edges == g.edges
        assert h.vertex_labels == (7, 7, 7)
        assert h.name == "p"
        with pytest.raises(ValueError):
            g.relabeled([1])

    def test_adjacency_matches_networkx(self, rng):
        g = random_molecule(rng, n_min=8, n_max=12)
        expected = nx.to_numpy_array(to_networkx(g), nodelist=range(g.vertex_count), dtype=np.int64)
        assert np.array_equal(adjacency_matrix(g), expected)


class TestValidation:
    """validate_graph reports every violated invariant."""

    def test_valid_graph_passes(self):
        assert validate_graph(cycle([0, 1, 2])).passed
        assert ensure_valid(isolated()) is not None

    def test_self_loop(self):
        g = LabeledGraph(1, frozenset({(0, 0)}), (0,), {(0, 0): 0})
        report = validate_graph(g)
        assert not report.passed
        assert any("self-loop" in v for v in report.violations)

    def test_asymmetric_edge(self):
        g = LabeledGraph(2, frozenset({(0, 1)}), (0, 0), {(0, 1): 0})
        assert any("asymmetric edge" in v for v in validate_graph(g).violations)

    def test_asymmetric_edge_label(self):
        g = LabeledGraph(2, frozenset({(0, 1), (1, 0)}), (0, 0), {(0, 1): 0, (1, 0): 1})
        assert any("asymmetric edge label" in v for v in validate_graph(g).violations)

    def test_dangling_index_and_label_count(self):
        g = LabeledGraph(2, frozenset({(0, 5), (5, 0)}), (0,), {(0, 5): 0, (5, 0): 0})
        violations = validate_graph(g).violations
        assert any("dangling" in v for v in violations)
        assert any("vertex label count" in v for v in violations)

    def test_ensure_valid_raises(self):
        g = LabeledGraph(2, frozenset({(0, 1)}), (0, 0), {(0, 1): 0}, name="bad")
        with pytest.raises(InvalidGraph) as exc_info:
            ensure_valid(g)
        assert "bad" in str(exc_info.value)


class TestDirectProduct:
    """Direct product graph of two labeled graphs."""

    def test_single_edges_with_equal_labels(self):
        product = direct_product(single_edge(0, 1), single_edge(0, 1))
        assert product.vertices == ((0, 0), (1, 1))
        assert product.adjacency.tolist() == [[0.0, 1.0], [1.0, 0.0]]
        assert product.max_degree == 1

    def test_edge_labels_must_match(self):
        product = direct_product(single_edge(0, 1, bond=0), single_edge(0, 1, bond=1))
        assert product.size == 2
        assert product.adjacency.sum() == 0

    def test_no_shared_labels(self):
        structure = product_structure(single_edge(0, 0), single_edge(1, 1))
        assert structure.size == 0
        assert len(structure.sources) == 0

    def test_product_edge_count_matches_brute_force(self, rng):
        g1 = random_molecule(rng, n_min=6, n_max=9)
        g2 = random_molecule(rng, n_min=6, n_max=9)
        brute = sum(
            1
            for (i, j), a in g1.edge_labels.items()
            for (k, l), b in g2.edge_labels.items()
            if a == b and g1.vertex_labels[i] == g2.vertex_labels[k] and g1.vertex_labels[j] == g2.vertex_labels[l]
        )
        assert len(product_structure(g1, g2).sources) == brute
        assert direct_product(g1, g2).adjacency.sum() == brute

    def test_powers_count_label_matched_walk_pairs(self, rng):
        graphs = _fixture_graphs(rng, max_vertices=5)
        for g1, g2 in itertools.combinations_with_replacement(graphs, 2):
            product = direct_product(g1, g2)
            power = np.eye(product.size)
            for length in range(1, 5):
                power = power @ product.adjacency
                walks1, walks2 = _walks_by_endpoints(g1, length), _walks_by_endpoints(g2, length)
                expected = np.zeros_like(power)
                for p, (i1, i2) in enumerate(product.vertices):
                    for q, (j1, j2) in enumerate(product.vertices):
                        left, right = walks1.get((i1, j1), {}), walks2.get((i2, j2), {})
                        expected[p, q] = sum(count * right.get(labels, 0) for labels, count in left.items())
                assert np.array_equal(power, expected), (g1, g2, length)


class TestFloydTransform:
    """All-pairs hop distances."""

    def test_matches_networkx(self, rng):
        g = random_molecule(rng, n_min=8, n_max=14, rings=2)
        floyd = floyd_transform(g)
        lengths = dict(nx.all_pairs_shortest_path_length(to_networkx(g)))
        for i in range(g.vertex_count):
            for j in range(g.vertex_count):
                assert floyd.distance[i, j] == lengths[i][j]
        assert floyd.vertex_labels == g.vertex_labels

    def test_disconnected_graph_raises(self):
        g = LabeledGraph.from_edges([0, 0, 0], [(0, 1)], name="split")
        with pytest.raises(DisconnectedGraph):
            floyd_transform(g)

    def test_single_vertex(self):
        assert floyd_transform(isolated()).distance.tolist() == [[0]]


class TestMorganIndex:
    def test_zero_iterations_is_all_ones(self):
        assert morgan_index(path([0, 0, 0]), 0).tolist() == [1, 1, 1]

    def test_first_iteration_is_degree(self):
        g = star(0, [0, 0, 0])
        assert morgan_index(g, 1).tolist() == g.degrees.tolist()

    def test_second_iteration_on_path(self):
        assert morgan_index(path([0, 0, 0]), 2).tolist() == [2, 2, 2]
        assert morgan_index(path([0, 0, 0, 0]), 2).tolist() == [2, 3, 3, 2]

    def test_negative_iterations(self):
        with pytest.raises(ValueError):
            morgan_index(path([0, 0]), -1)


class TestNonTotteringTransform:
    """Walks of the expansion are the non-tottering walks of the source graph."""

    def test_single_edge(self):
        g = single_edge(3, 4, bond=1)
        t = non_tottering_transform(g)
        assert t.directed
        assert t.vertex_count == 4
        # (0,1) -> vertex 2 labeled 4, (1,0) -> vertex 3 labeled 3
        assert t.vertex_labels == (3, 4, 4, 3)
        assert t.edges == frozenset({(0, 2), (1, 3)})
        assert t.edge_label(0, 2) == 1
        assert underlying_vertex(g, 2) == 1
        assert underlying_vertex(g, 3) == 0
        assert underlying_vertex(g, 1) == 1

    def test_no_backtracking_links(self):
        g = path([0, 0, 0])
        t = non_tottering_transform(g)
        edge_vertex = {edge: g.vertex_count + k for k, edge in enumerate(sorted(g.edges))}
        assert (edge_vertex[(0, 1)], edge_vertex[(1, 2)]) in t.edges
        assert (edge_vertex[(0, 1)], edge_vertex[(1, 0)]) not in t.edges

    def test_walk_counts_match_non_tottering_enumeration(self):
        g = cycle([0, 0, 0, 0])
        t = non_tottering_transform(g)
        a = adjacency_matrix(t).astype(float)
        # non-tottering walks with 3 edges starting at vertex 0 of a 4-ring: 2
        start = np.zeros(t.vertex_count)
        start[0] = 1.0
        assert (start @ np.linalg.matrix_power(a, 3)).sum() == 2

    def test_walks_project_onto_non_tottering_walks(self, rng):
        for g in _fixture_graphs(rng, max_vertices=4):
            t = non_tottering_transform(g)
            for length in range(1, 5):
                images = []
                for start in range(g.vertex_count):
                    for walk in _walks(t, length, start):
                        image = tuple(underlying_vertex(g, v) for v in walk)
                        assert _label_sequence(t, walk) == _label_sequence(g, image)
                        images.append(image)
                non_tottering = [
                    walk for walk in _walks(g, length) if all(a != c for a, c in zip(walk, walk[2:]))
                ]
                assert len(images) == len(set(images))
                assert set(images) == set(non_tottering)

    def test_edgeless_graph(self):
        t = non_tottering_transform(isolated(5))
        assert t.vertex_count == 1
        assert t.edges == frozenset()
