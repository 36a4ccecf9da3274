"""Weisfeiler-Lehman color refinement with a shared color dictionary."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from app.graphs import LabeledGraph

ROOT_COLOR = -1

Coloring = tuple[int, ...]


@dataclass(frozen=True)
class WlColorHierarchy:
    parent: dict[int, int]
    per_vertex_path: tuple[tuple[int, ...], ...]

    def path_to_root(self, color: int) -> list[int]:
        path = [color]
        while path[-1] != ROOT_COLOR:
            path.append(self.parent[path[-1]])
        return path


@dataclass(frozen=True)
class WlRefinement:
    levels: tuple[Coloring, ...]
    hierarchy: WlColorHierarchy

    @property
    def h(self) -> int:
        return len(self.levels) - 1


class WlColorizer:
    """Compresses (own color, sorted neighbor colors) signatures into integer colors.

    One instance is shared by every graph of a pair or a Gram computation so
    that equal signatures get equal colors. Level-0 colors are the vertex
    labels (or ``0`` for every vertex when ``use_labels`` is off); refined
    colors are numbered above the largest level-0 color, level by level, in
    sorted signature order, so the numbering does not depend on the order the
    graphs are visited in.
    """

    def __init__(self, use_labels: bool = True):
        self.use_labels = use_labels
        self.parent: dict[int, int] = {}
        self._colors: dict[tuple[int, tuple[int, ...]], int] = {}
        self._first_refined: Optional[int] = None
        self._next_color = 0

    def initial_coloring(self, g: LabeledGraph) -> Coloring:
        if self.use_labels:
            return g.vertex_labels
        return (0,) * g.vertex_count

    def refine(self, graphs: Sequence[LabeledGraph], h: int) -> list[list[Coloring]]:
        """Return ``levels[g][i]``: the coloring of graph ``g`` after ``i`` iterations."""
        if h < 0:
            raise ValueError("h must be non-negative")
        current = [self.initial_coloring(g) for g in graphs]
        top = max((max(coloring) for coloring in current if coloring), default=-1)
        if self._first_refined is None:
            self._first_refined = self._next_color = top + 1
        elif top >= self._first_refined:
            raise ValueError("vertex labels collide with colors already handed out")
        for coloring in current:
            for color in coloring:
                self.parent.setdefault(color, ROOT_COLOR)

        levels = [[coloring] for coloring in current]
        for _ in range(h):
            signatures = [
                [
                    (coloring[v], tuple(sorted(coloring[u] for u in g.neighbors[v])))
                    for v in range(g.vertex_count)
                ]
                for g, coloring in zip(graphs, current)
            ]
            fresh = {sig for graph in signatures for sig in graph if sig not in self._colors}
            for sig in sorted(fresh):
                self._colors[sig] = self._next_color
                self.parent[self._next_color] = sig[0]
                self._next_color += 1
            current = [tuple(self._colors[sig] for sig in graph) for graph in signatures]
            for per_graph, coloring in zip(levels, current):
                per_graph.append(coloring)
        return levels

    def hierarchy(self, levels: Sequence[Coloring]) -> WlColorHierarchy:
        used = {color for coloring in levels for color in coloring}
        vertex_count = len(levels[0]) if levels else 0
        return WlColorHierarchy(
            parent={color: self.parent[color] for color in sorted(used)},
            per_vertex_path=tuple(
                tuple(coloring[v] for coloring in levels) for v in range(vertex_count)
            ),
        )


def wl_refine(g: LabeledGraph, h: int, use_labels: bool = True) -> WlRefinement:
    colorizer = WlColorizer(use_labels=use_labels)
    levels = colorizer.refine([g], h)[0]
    return WlRefinement(levels=tuple(levels), hierarchy=colorizer.hierarchy(levels))
