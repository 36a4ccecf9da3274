"""Random-walk kernels on the direct product graph.

Geometric, exponential and N-step kernels weight the walks of the product
graph; the marginalized kernels sum walk-pair probabilities under a simple
stop-or-move random walk and are evaluated as one linear solve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field, field_validator
from scipy.sparse import csc_matrix, csr_matrix, identity
from scipy.sparse.linalg import spsolve

from app.errors import GammaTooLarge, NonConvergence, NonFiniteKernelValue
from app.graphs import LabeledGraph, direct_product, morgan_index, non_tottering_transform, product_structure

logger = logging.getLogger(__name__)

DENSE_SOLVE_LIMIT = 2000
FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITER = 100_000


class WalkKernelConfig(BaseModel):
    """Parameters of the walk kernels; ``gamma`` stays unset until a dataset resolves it."""

    gamma: Optional[float] = Field(default=None, gt=0)
    beta: float = Field(default=1.0, ge=0)
    weights: list[float] = Field(default_factory=lambda: [1.0] * 5)
    stop_prob: float = Field(default=0.1, gt=0, lt=1)

    @field_validator("weights")
    @classmethod
    def weights_non_negative(cls, v):
        if not v or any(w < 0 for w in v):
            raise ValueError("weights must be a non-empty list of non-negative numbers")
        return v


def max_product_degree(g1: LabeledGraph, g2: LabeledGraph) -> int:
    structure = product_structure(g1, g2)
    if structure.sources.size == 0:
        return 0
    return int(np.bincount(structure.sources, minlength=structure.size).max())


def auto_gamma(graphs: Sequence[LabeledGraph]) -> float:
    """Decay that is valid for every pair drawn from ``graphs``.

    A product vertex has at most ``deg(i1) * deg(i2)`` neighbors, so half the
    inverse of the squared maximum degree stays below every pairwise bound.
    """
    top = max((g.max_degree for g in graphs), default=0)
    return 0.5 / (top * top) if top else 0.5


def _sparse_product_adjacency(g1: LabeledGraph, g2: LabeledGraph) -> csr_matrix:
    structure = product_structure(g1, g2)
    data = np.ones(structure.sources.size, dtype=np.float64)
    return csr_matrix(
        (data, (structure.sources, structure.targets)), shape=(structure.size, structure.size)
    )


def grw_kernel(g1: LabeledGraph, g2: LabeledGraph, gamma: float) -> float:
    """Entry sum of ``(I - gamma A)^-1`` over the direct product graph."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    adjacency = _sparse_product_adjacency(g1, g2)
    size = adjacency.shape[0]
    if size == 0:
        return 0.0
    degree = int(adjacency.sum(axis=1).max())
    if degree and gamma >= 1.0 / degree:
        raise GammaTooLarge(gamma, degree)
    system = csc_matrix(identity(size, format="csc") - gamma * adjacency)
    solution = spsolve(system, np.ones(size))
    return float(np.sum(solution))


def exp_walk_kernel(g1: LabeledGraph, g2: LabeledGraph, beta: float) -> float:
    """Entry sum of ``exp(beta A)`` via the eigen-decomposition of the symmetric A."""
    product = direct_product(g1, g2)
    if product.size == 0:
        return 0.0
    eigenvalues, eigenvectors = scipy.linalg.eigh(product.adjacency)
    projections = eigenvectors.T @ np.ones(product.size)
    with np.errstate(over="ignore", invalid="ignore"):
        value = float(np.sum(np.exp(beta * eigenvalues) * projections**2))
    if not np.isfinite(value):
        raise NonFiniteKernelValue("exp", value)
    return value


def nstep_kernel(g1: LabeledGraph, g2: LabeledGraph, weights: Sequence[float]) -> float:
    if not weights:
        raise ValueError("at least one weight is required")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be non-negative")
    adjacency = _sparse_product_adjacency(g1, g2)
    size = adjacency.shape[0]
    if size == 0:
        return 0.0
    walks = np.ones(size)
    total = weights[0] * size
    for weight in weights[1:]:
        walks = adjacency @ walks
        total += weight * walks.sum()
    return float(total)


# ---------------------------------------------------------------------------
# Marginalized kernels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkModel:
    """Start, stop and per-step move probabilities of a random walk on ``graph``."""

    graph: LabeledGraph
    start: np.ndarray
    stop: np.ndarray
    move: np.ndarray

    @classmethod
    def plain(cls, g: LabeledGraph, stop_prob: float) -> "WalkModel":
        degrees = g.degrees
        start = np.full(g.vertex_count, 1.0 / g.vertex_count) if g.vertex_count else np.zeros(0)
        return cls(g, start, *_stop_and_move(degrees, stop_prob))

    @classmethod
    def non_tottering(cls, g: LabeledGraph, stop_prob: float, morgan_iterations: int = 0) -> "WalkModel":
        """Walk on the non-tottering expansion of ``g``.

        Walks start on original vertices only and move with the probabilities
        of the vertex they sit on, so every non-tottering walk of ``g`` keeps
        its probability and tottering walks lose theirs.
        """
        if morgan_iterations:
            g = morgan_relabel(g, morgan_iterations)
        n = g.vertex_count
        expanded = non_tottering_transform(g)
        underlying = np.array(list(range(n)) + [v for _, v in sorted(g.edges)], dtype=np.int64)
        degrees = g.degrees[underlying] if n else np.zeros(0, dtype=np.int64)
        start = np.zeros(expanded.vertex_count)
        start[:n] = 1.0 / n if n else 0.0
        return cls(expanded, start, *_stop_and_move(degrees, stop_prob))


def _stop_and_move(degrees: np.ndarray, stop_prob: float) -> tuple[np.ndarray, np.ndarray]:
    if not 0 < stop_prob < 1:
        raise ValueError("stop_prob must lie in (0, 1)")
    has_neighbors = degrees > 0
    stop = np.where(has_neighbors, stop_prob, 1.0)
    move = np.zeros(len(degrees))
    move[has_neighbors] = (1.0 - stop_prob) / degrees[has_neighbors]
    return stop, move


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def morgan_relabel(g: LabeledGraph, iterations: int) -> LabeledGraph:
    """Replace each label by the pair (label, Morgan index), encoded as one integer."""
    morgan = morgan_index(g, iterations)
    return g.relabeled([cantor_pair(label, int(m)) for label, m in zip(g.vertex_labels, morgan)])


def marginalized_from_models(m1: WalkModel, m2: WalkModel) -> float:
    """``s^T (I - T)^-1 q`` on the label-matched product of two walk models."""
    structure = product_structure(m1.graph, m2.graph)
    size = structure.size
    if size == 0:
        return 0.0
    left, right = structure.pairs[:, 0], structure.pairs[:, 1]
    start = m1.start[left] * m2.start[right]
    stop = m1.stop[left] * m2.stop[right]
    src = structure.sources
    weights = m1.move[left[src]] * m2.move[right[src]]
    transition = csr_matrix((weights, (src, structure.targets)), shape=(size, size))

    if size <= DENSE_SOLVE_LIMIT:
        system = np.eye(size) - transition.toarray()
        return float(start @ scipy.linalg.solve(system, stop))

    logger.debug("product with %d states solved by fixed-point iteration", size)
    x = stop.copy()
    for _ in range(FIXED_POINT_MAX_ITER):
        updated = stop + transition @ x
        if np.max(np.abs(updated - x)) < FIXED_POINT_TOL:
            return float(start @ updated)
        x = updated
    raise NonConvergence(
        f"marginalized fixed-point iteration did not reach {FIXED_POINT_TOL} "
        f"after {FIXED_POINT_MAX_ITER} steps on a {size}-state product"
    )


def marginalized_kernel(g1: LabeledGraph, g2: LabeledGraph, stop_prob: float) -> float:
    return marginalized_from_models(WalkModel.plain(g1, stop_prob), WalkModel.plain(g2, stop_prob))


def marginalized_nt_kernel(
    g1: LabeledGraph, g2: LabeledGraph, stop_prob: float, morgan_iterations: int = 0
) -> float:
    return marginalized_from_models(
        WalkModel.non_tottering(g1, stop_prob, morgan_iterations),
        WalkModel.non_tottering(g2, stop_prob, morgan_iterations),
    )
