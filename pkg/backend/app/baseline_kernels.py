"""Vertex, edge and vertex-edge label histogram kernels."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable

from app.graphs import LabeledGraph, product_structure


@dataclass(frozen=True)
class LabelHistogram:
    counts: Counter

    def dot(self, other: "LabelHistogram") -> int:
        if len(other.counts) < len(self.counts):
            return other.dot(self)
        return sum(count * other.counts.get(key, 0) for key, count in self.counts.items())

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def vertex_histogram(g: LabeledGraph) -> LabelHistogram:
    return LabelHistogram(Counter(g.vertex_labels))


def edge_histogram(g: LabeledGraph) -> LabelHistogram:
    """Counts of (start label, edge label, end label) over directed edges."""
    keys: list[Hashable] = [
        (g.vertex_labels[i], g.edge_labels[(i, j)], g.vertex_labels[j]) for i, j in g.edges
    ]
    return LabelHistogram(Counter(keys))


def vh_kernel(g1: LabeledGraph, g2: LabeledGraph) -> float:
    return float(vertex_histogram(g1).dot(vertex_histogram(g2)))


def eh_kernel(g1: LabeledGraph, g2: LabeledGraph) -> float:
    return float(edge_histogram(g1).dot(edge_histogram(g2)))


def veh_kernel(g1: LabeledGraph, g2: LabeledGraph) -> float:
    """Entry sum of the direct product adjacency: matching length-one walks."""
    return float(product_structure(g1, g2).sources.size)
