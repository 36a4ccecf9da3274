"""Labeled graphs and the graph-to-graph transformations the kernels consume.

Labels are dense integer ids (the dataset parser interns raw tokens). An
undirected bond is stored as two ordered pairs, so ``len(g.edges)`` is the
directed edge count used throughout the kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, floyd_warshall

from app.errors import DisconnectedGraph, InvalidGraph

Edge = tuple[int, int]


@dataclass(frozen=True)
class LabeledGraph:
    vertex_count: int
    edges: frozenset[Edge]
    vertex_labels: tuple[int, ...]
    edge_labels: Mapping[Edge, int]
    name: Optional[str] = None
    directed: bool = False

    def __post_init__(self) -> None:
        # normalize containers so equality does not depend on the caller's types
        object.__setattr__(self, "edges", frozenset((int(i), int(j)) for i, j in self.edges))
        object.__setattr__(self, "vertex_labels", tuple(int(label) for label in self.vertex_labels))
        object.__setattr__(
            self,
            "edge_labels",
            {(int(i), int(j)): int(label) for (i, j), label in self.edge_labels.items()},
        )

    def __hash__(self) -> int:
        return hash(
            (
                self.vertex_count,
                self.edges,
                self.vertex_labels,
                frozenset(self.edge_labels.items()),
                self.name,
                self.directed,
            )
        )

    @classmethod
    def from_edges(
        cls,
        vertex_labels: Sequence[int],
        bonds: Iterable[Sequence[int]] = (),
        name: Optional[str] = None,
        default_edge_label: int = 0,
    ) -> "LabeledGraph":
        """Build an undirected graph from ``(i, j)`` or ``(i, j, label)`` bonds."""
        edges: set[Edge] = set()
        edge_labels: dict[Edge, int] = {}
        for bond in bonds:
            i, j = int(bond[0]), int(bond[1])
            label = int(bond[2]) if len(bond) > 2 else default_edge_label
            edges.add((i, j))
            edges.add((j, i))
            edge_labels[(i, j)] = label
            edge_labels[(j, i)] = label
        return cls(
            vertex_count=len(vertex_labels),
            edges=frozenset(edges),
            vertex_labels=tuple(vertex_labels),
            edge_labels=edge_labels,
            name=name,
        )

    def edge_label(self, i: int, j: int) -> int:
        return self.edge_labels[(i, j)]

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Sorted out-neighbors per vertex."""
        adjacency: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, j in sorted(self.edges):
            adjacency[i].append(j)
        return tuple(tuple(row) for row in adjacency)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """``(m, 3)`` array of (source, target, edge label), sorted by endpoints."""
        rows = [(i, j, self.edge_labels[(i, j)]) for i, j in sorted(self.edges)]
        return np.array(rows, dtype=np.int64).reshape(-1, 3)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(row) for row in self.neighbors], dtype=np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.vertex_count else 0

    @property
    def directed_edge_count(self) -> int:
        return len(self.edges)

    @property
    def undirected_edge_count(self) -> int:
        if self.directed:
            return len({(min(i, j), max(i, j)) for i, j in self.edges})
        return len(self.edges) // 2

    def is_connected(self) -> bool:
        if self.vertex_count <= 1:
            return True
        count, _ = connected_components(_sparse_adjacency(self), directed=False)
        return count == 1

    def relabeled(self, vertex_labels: Sequence[int], name: Optional[str] = None) -> "LabeledGraph":
        """Same structure, new vertex labels."""
        if len(vertex_labels) != self.vertex_count:
            raise ValueError("one label per vertex is required")
        return LabeledGraph(
            vertex_count=self.vertex_count,
            edges=self.edges,
            vertex_labels=tuple(vertex_labels),
            edge_labels=self.edge_labels,
            name=name if name is not None else self.name,
            directed=self.directed,
        )


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def validate_graph(g: LabeledGraph) -> ValidationReport:
    report = ValidationReport()
    if len(g.vertex_labels) != g.vertex_count:
        report.violations.append(
            f"vertex label count {len(g.vertex_labels)} != vertex count {g.vertex_count}"
        )
    for i, j in sorted(g.edges):
        if not (0 <= i < g.vertex_count and 0 <= j < g.vertex_count):
            report.violations.append(f"dangling index in edge ({i},{j})")
            continue
        if i == j:
            report.violations.append(f"self-loop at vertex {i}")
        if (i, j) not in g.edge_labels:
            report.violations.append(f"missing edge label for ({i},{j})")
        if g.directed:
            continue
        if (j, i) not in g.edges:
            report.violations.append(f"asymmetric edge ({i},{j})")
        elif (
            (i, j) in g.edge_labels
            and (j, i) in g.edge_labels
            and g.edge_labels[(i, j)] != g.edge_labels[(j, i)]
        ):
            report.violations.append(f"asymmetric edge label on ({i},{j})")
    return report


def ensure_valid(g: LabeledGraph) -> LabeledGraph:
    report = validate_graph(g)
    if not report.passed:
        raise InvalidGraph(g.name, report.violations)
    return g


def adjacency_matrix(g: LabeledGraph) -> np.ndarray:
    a = np.zeros((g.vertex_count, g.vertex_count), dtype=np.int64)
    if g.edges:
        e = g.edge_array
        a[e[:, 0], e[:, 1]] = 1
    return a


def _sparse_adjacency(g: LabeledGraph) -> csr_matrix:
    e = g.edge_array
    data = np.ones(len(e), dtype=np.float64)
    return csr_matrix((data, (e[:, 0], e[:, 1])), shape=(g.vertex_count, g.vertex_count))


# ---------------------------------------------------------------------------
# Direct product
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductStructure:
    """Label-matched vertex pairs and product edges of two graphs.

    ``sources``/``targets`` index into ``pairs``; the product graph has an edge
    ``sources[k] -> targets[k]`` for every k.
    """

    pairs: np.ndarray
    sources: np.ndarray
    targets: np.ndarray

    @property
    def size(self) -> int:
        return len(self.pairs)


def product_structure(g1: LabeledGraph, g2: LabeledGraph) -> ProductStructure:
    l1 = np.asarray(g1.vertex_labels, dtype=np.int64)
    l2 = np.asarray(g2.vertex_labels, dtype=np.int64)
    i1, i2 = np.nonzero(l1[:, None] == l2[None, :])
    pairs = np.stack([i1, i2], axis=1).astype(np.int64).reshape(-1, 2)
    index = np.full((g1.vertex_count, g2.vertex_count), -1, dtype=np.int64)
    index[i1, i2] = np.arange(len(pairs))

    e1, e2 = g1.edge_array, g2.edge_array
    if len(pairs) == 0 or len(e1) == 0 or len(e2) == 0:
        empty = np.zeros(0, dtype=np.int64)
        return ProductStructure(pairs=pairs, sources=empty, targets=empty)
    a, b = np.nonzero(e1[:, 2][:, None] == e2[:, 2][None, :])
    sources = index[e1[a, 0], e2[b, 0]]
    targets = index[e1[a, 1], e2[b, 1]]
    keep = (sources >= 0) & (targets >= 0)
    return ProductStructure(pairs=pairs, sources=sources[keep], targets=targets[keep])


@dataclass(frozen=True)
class DirectProductGraph:
    vertices: tuple[tuple[int, int], ...]
    adjacency: np.ndarray
    factor_refs: tuple[Optional[str], Optional[str]]

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def max_degree(self) -> int:
        return int(self.adjacency.sum(axis=1).max()) if self.size else 0


def direct_product(g1: LabeledGraph, g2: LabeledGraph) -> DirectProductGraph:
    structure = product_structure(g1, g2)
    adjacency = np.zeros((structure.size, structure.size), dtype=np.float64)
    adjacency[structure.sources, structure.targets] = 1.0
    return DirectProductGraph(
        vertices=tuple((int(a), int(b)) for a, b in structure.pairs),
        adjacency=adjacency,
        factor_refs=(g1.name, g2.name),
    )


# ---------------------------------------------------------------------------
# Floyd transformation, Morgan index, non-tottering expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FloydGraph:
    distance: np.ndarray
    vertex_labels: tuple[int, ...]


def floyd_transform(g: LabeledGraph) -> FloydGraph:
    """All-pairs hop distances; edge labels are ignored."""
    if g.vertex_count == 0:
        return FloydGraph(distance=np.zeros((0, 0), dtype=np.int64), vertex_labels=())
    dist = floyd_warshall(_sparse_adjacency(g), directed=g.directed, unweighted=True)
    if np.isinf(dist).any():
        raise DisconnectedGraph(g.name)
    return FloydGraph(distance=dist.astype(np.int64), vertex_labels=g.vertex_labels)


def morgan_index(g: LabeledGraph, iterations: int) -> np.ndarray:
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    a = adjacency_matrix(g)
    m = np.ones(g.vertex_count, dtype=np.int64)
    for _ in range(iterations):
        m = a @ m
    return m


def non_tottering_transform(g: LabeledGraph) -> LabeledGraph:
    """Expand ``g`` so that its walks are exactly the non-tottering walks of ``g``.

    Vertices ``0..n-1`` are the original vertices; vertex ``n + k`` stands for
    the k-th directed edge ``(u, v)`` in sorted order and carries the label of
    ``v``. Links ``v -> (v, u)`` and ``(u, v) -> (v, w)`` with ``w != u`` carry
    the label of the underlying edge.
    """
    n = g.vertex_count
    directed_edges = sorted(g.edges)
    if not directed_edges:
        return LabeledGraph(
            vertex_count=n,
            edges=frozenset(),
            vertex_labels=g.vertex_labels,
            edge_labels={},
            name=g.name,
            directed=True,
        )
    edge_vertex = {edge: n + k for k, edge in enumerate(directed_edges)}
    labels = list(g.vertex_labels) + [g.vertex_labels[v] for _, v in directed_edges]
    links: dict[Edge, int] = {}
    for v, u in directed_edges:
        links[(v, edge_vertex[(v, u)])] = g.edge_labels[(v, u)]
    for u, v in directed_edges:
        for w in g.neighbors[v]:
            if w != u:
                links[(edge_vertex[(u, v)], edge_vertex[(v, w)])] = g.edge_labels[(v, w)]
    return LabeledGraph(
        vertex_count=len(labels),
        edges=frozenset(links),
        vertex_labels=tuple(labels),
        edge_labels=links,
        name=g.name,
        directed=True,
    )


def underlying_vertex(g: LabeledGraph, transformed_vertex: int) -> int:
    """Original vertex a vertex of ``non_tottering_transform(g)`` sits on."""
    if transformed_vertex < g.vertex_count:
        return transformed_vertex
    _, v = sorted(g.edges)[transformed_vertex - g.vertex_count]
    return v
