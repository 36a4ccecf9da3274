"""Tree-pattern kernels (size-based and branching-based) and their no-tottering variant.

A tree pattern maps the root of a rooted, labeled tree with ordered children
onto a vertex and every child onto a distinct neighbor of its parent's image,
edge labels matching. ``K_k[u, v]`` sums the weighted products of pattern
counts for trees of order ``k`` rooted at ``u`` and ``v``; it is built level by
level from partial matchings between the neighborhoods of ``u`` and ``v``.
"""

from __future__ import annotations

from math import factorial
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.errors import DegreeOverflow
from app.graphs import LabeledGraph, non_tottering_transform


class TreePatternConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    depth_h: int = Field(default=3, ge=1)
    lam: float = Field(default=1.0, ge=0, alias="lambda")
    variant: Literal["size", "branch"] = "size"
    tree_set: Literal["balanced", "up_to_depth"] = "balanced"
    no_tottering: bool = False
    branch_convention: Literal["leaves_plus_one", "leaves_minus_one"] = "leaves_plus_one"
    max_degree: int = Field(default=8, ge=1)


def _matching_sums(weights: list[list[float]], columns: int) -> list[float]:
    """Sum of products over partial matchings of the weight matrix, by matching size."""
    sums: dict[int, float] = {0: 1.0}
    for row in weights:
        updated = dict(sums)
        for mask, value in sums.items():
            for c, w in enumerate(row):
                if w and not (mask >> c) & 1:
                    key = mask | (1 << c)
                    updated[key] = updated.get(key, 0.0) + value * w
        sums = updated
    by_size = [0.0] * (columns + 1)
    for mask, value in sums.items():
        by_size[mask.bit_count()] += value
    return by_size


def _order_tables(g1: LabeledGraph, g2: LabeledGraph, order: int, variant: str, lam: float) -> list[np.ndarray]:
    """``tables[k - 1]`` is ``K_k`` for ``k = 1..order``."""
    l1 = np.asarray(g1.vertex_labels, dtype=np.int64)
    l2 = np.asarray(g2.vertex_labels, dtype=np.int64)
    same = l1[:, None] == l2[None, :]
    leaf = lam if variant == "branch" else 1.0
    current = np.where(same, leaf, 0.0)
    tables = [current]
    candidates = list(zip(*(idx.tolist() for idx in np.nonzero(same))))

    for k in range(2, order + 1):
        following = np.zeros_like(current)
        for u, v in candidates:
            mine, theirs = g1.neighbors[u], g2.neighbors[v]
            if not mine or not theirs:
                continue
            weights = [
                [
                    current[a, b] if g1.edge_labels[(u, a)] == g2.edge_labels[(v, b)] else 0.0
                    for b in theirs
                ]
                for a in mine
            ]
            by_size = _matching_sums(weights, len(theirs))
            total = 0.0
            for j in range(1, len(by_size)):
                if by_size[j]:
                    # a node with j children of order k - 1 adds (j - 1)(k - 1) nodes beyond a chain
                    step = lam ** ((j - 1) * (k - 1)) if variant == "size" else 1.0
                    total += step * factorial(j) * by_size[j]
            following[u, v] = total
        tables.append(following)
        current = following
    return tables


def _check_degrees(cap: int, *graphs: LabeledGraph) -> None:
    for g in graphs:
        if g.max_degree > cap:
            raise DegreeOverflow(g.max_degree, cap)


def prepare_tree_graph(g: LabeledGraph, cfg: TreePatternConfig) -> tuple[LabeledGraph, int]:
    """Graph the recursion runs on and the number of leading vertices used as roots."""
    _check_degrees(cfg.max_degree, g)
    if cfg.no_tottering:
        return non_tottering_transform(g), g.vertex_count
    return g, g.vertex_count


def tree_pattern_value(
    prepared1: tuple[LabeledGraph, int], prepared2: tuple[LabeledGraph, int], cfg: TreePatternConfig
) -> float:
    (t1, roots1), (t2, roots2) = prepared1, prepared2
    if roots1 == 0 or roots2 == 0:
        return 0.0
    variant, lam = cfg.variant, cfg.lam
    if variant == "branch" and cfg.branch_convention == "leaves_minus_one" and lam == 0:
        # 0^(leaves - 1) keeps the single-leaf (linear) patterns only, as the size weight does
        variant = "size"
    tables = _order_tables(t1, t2, cfg.depth_h, variant, lam)
    if cfg.tree_set == "balanced":
        tables = tables[-1:]
    value = float(sum(table[:roots1, :roots2].sum() for table in tables))
    if variant == "branch":
        value = value * lam if cfg.branch_convention == "leaves_plus_one" else value / lam
    return value


def tree_pattern_kernel(g1: LabeledGraph, g2: LabeledGraph, cfg: TreePatternConfig) -> float:
    return tree_pattern_value(prepare_tree_graph(g1, cfg), prepare_tree_graph(g2, cfg), cfg)
