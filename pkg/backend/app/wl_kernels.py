"""Weisfeiler-Lehman kernels: generic base kernel, subtree, and optimal assignment."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Literal, Mapping, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix

from app.baseline_kernels import eh_kernel, vh_kernel
from app.errors import DimensionMismatch
from app.graphs import LabeledGraph
from app.path_kernels import sp_kernel
from app.weisfeiler_lehman import Coloring, WlColorizer

BaseKernel = Literal["vh", "eh", "sp"]

BASE_KERNELS: dict[str, Callable[[LabeledGraph, LabeledGraph], float]] = {
    "vh": vh_kernel,
    "eh": eh_kernel,
    "sp": sp_kernel,
}


@dataclass(frozen=True)
class WlHistogram:
    counts: Counter

    @classmethod
    def from_levels(cls, levels: Sequence[Coloring]) -> "WlHistogram":
        counts: Counter = Counter()
        for coloring in levels:
            counts.update(coloring)
        return cls(counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def wl_kernel(g1: LabeledGraph, g2: LabeledGraph, h: int, base: BaseKernel = "vh") -> float:
    if base not in BASE_KERNELS:
        raise ValueError(f"unknown base kernel '{base}'")
    kernel = BASE_KERNELS[base]
    levels1, levels2 = WlColorizer().refine([g1, g2], h)
    return float(
        sum(kernel(g1.relabeled(c1), g2.relabeled(c2)) for c1, c2 in zip(levels1, levels2))
    )


def _level_dot(c1: Coloring, c2: Coloring) -> int:
    h1, h2 = Counter(c1), Counter(c2)
    return sum(count * h2.get(color, 0) for color, count in h1.items())


def wls_kernel(g1: LabeledGraph, g2: LabeledGraph, h: int) -> float:
    levels1, levels2 = WlColorizer().refine([g1, g2], h)
    return float(sum(_level_dot(c1, c2) for c1, c2 in zip(levels1, levels2)))


def wl_feature_matrix(graphs: Sequence[LabeledGraph], h: int, use_labels: bool = True) -> csr_matrix:
    """Sparse graphs-by-colors count matrix over all refinement levels."""
    colorizer = WlColorizer(use_labels=use_labels)
    per_graph = colorizer.refine(graphs, h)
    rows, cols, data = [], [], []
    color_index: dict[int, int] = {}
    for row, levels in enumerate(per_graph):
        for color, count in sorted(WlHistogram.from_levels(levels).counts.items()):
            rows.append(row)
            cols.append(color_index.setdefault(color, len(color_index)))
            data.append(count)
    return csr_matrix(
        (np.asarray(data, dtype=np.int64), (rows, cols)), shape=(len(graphs), max(len(color_index), 1))
    )


def wls_gram(graphs: Sequence[LabeledGraph], h: int) -> np.ndarray:
    features = wl_feature_matrix(graphs, h)
    return (features @ features.T).toarray().astype(np.float64)


def histogram_intersection(
    x: Union[Sequence[float], np.ndarray, Mapping], y: Union[Sequence[float], np.ndarray, Mapping]
) -> float:
    """Sum of elementwise minima; mappings are aligned by key, sequences by position."""
    if isinstance(x, Mapping) and isinstance(y, Mapping):
        return float(sum(min(value, y[key]) for key, value in x.items() if key in y))
    a, b = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"histograms of shapes {a.shape} and {b.shape} are not aligned")
    return float(np.minimum(a, b).sum())


def wloa_kernel(g1: LabeledGraph, g2: LabeledGraph, h: int, use_labels: bool = True) -> float:
    levels1, levels2 = WlColorizer(use_labels=use_labels).refine([g1, g2], h)
    return histogram_intersection(
        WlHistogram.from_levels(levels1).counts, WlHistogram.from_levels(levels2).counts
    )


def wloa_gram(graphs: Sequence[LabeledGraph], h: int, use_labels: bool = True) -> np.ndarray:
    features = wl_feature_matrix(graphs, h, use_labels).toarray()
    gram = np.zeros((len(graphs), len(graphs)))
    for i in range(len(graphs)):
        gram[i, i:] = np.minimum(features[i], features[i:]).sum(axis=1)
        gram[i:, i] = gram[i, i:]
    return gram


def hierarchy_kernel(path_u: Sequence[int], path_v: Sequence[int]) -> int:
    """Length of the common prefix of two color paths c_0..c_h."""
    shared = 0
    for a, b in zip(path_u, path_v):
        if a != b:
            break
        shared += 1
    return shared
