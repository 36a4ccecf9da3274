"""Shortest-path kernel with Dirac label and distance kernels."""

from __future__ import annotations

from collections import Counter

import numpy as np

from app.baseline_kernels import LabelHistogram
from app.graphs import FloydGraph, LabeledGraph, floyd_transform


def shortest_path_histogram(floyd: FloydGraph) -> LabelHistogram:
    """Counts of (start label, hop distance, end label) over ordered pairs i != j."""
    n = len(floyd.vertex_labels)
    if n < 2:
        return LabelHistogram(Counter())
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    labels = floyd.vertex_labels
    distance = floyd.distance
    return LabelHistogram(
        Counter((labels[a], int(distance[a, b]), labels[b]) for a, b in zip(i.tolist(), j.tolist()))
    )


def sp_kernel(g1: LabeledGraph, g2: LabeledGraph) -> float:
    h1 = shortest_path_histogram(floyd_transform(g1))
    h2 = shortest_path_histogram(floyd_transform(g2))
    return float(h1.dot(h2))
