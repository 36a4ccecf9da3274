"""Gram matrix assembly, graph RBF composition, min-max scaling and PSD checks."""

from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence, Union

import numpy as np
import scipy.linalg
from joblib import Parallel, delayed

from app.errors import DegenerateRange, GraphKernelError, NonFiniteKernelValue, PairKernelError
from app.graphs import LabeledGraph
from app.kernel_registry import KernelDescriptor, PairKernel, build_kernel, graph_ids

logger = logging.getLogger(__name__)

DEFAULT_PSD_TOL = 1e-8
SIGMA_GRID = tuple(2.0**e for e in range(-7, 8))


@dataclass(frozen=True)
class ScalingParams:
    lo: float
    hi: float

    @classmethod
    def fit(cls, values: np.ndarray) -> "ScalingParams":
        return cls(lo=float(np.min(values)), hi=float(np.max(values)))

    @property
    def degenerate(self) -> bool:
        return self.hi == self.lo

    def apply(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        if self.degenerate:
            return np.zeros_like(values)
        return (values - self.lo) / (self.hi - self.lo)


@dataclass(frozen=True)
class PsdReport:
    min_eigenvalue: float
    max_eigenvalue: float
    passed: bool
    tol: float


@dataclass(frozen=True)
class GramMatrix:
    values: np.ndarray
    graph_ids: tuple[str, ...]
    kernel_descriptor: dict[str, Any]
    scaling: Optional[ScalingParams] = None
    psd: Optional[PsdReport] = None

    @property
    def size(self) -> int:
        return len(self.graph_ids)


def kernel_metric(k11: float, k12: float, k22: float) -> float:
    return math.sqrt(max(0.0, k11 - 2.0 * k12 + k22))


def graph_rbf(base_k11: float, base_k12: float, base_k22: float, sigma: float) -> float:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    squared = base_k11 - 2.0 * base_k12 + base_k22
    return math.exp(-squared / (2.0 * sigma * sigma))


def rbf_values(values: np.ndarray, sigma: float) -> np.ndarray:
    """Graph RBF applied to a whole base Gram matrix."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    diagonal = np.diag(values)
    squared = diagonal[:, None] - 2.0 * values + diagonal[None, :]
    return np.exp(-squared / (2.0 * sigma * sigma))


def _row_block(kernel: PairKernel, prepared: list, ids: list[str], rows: list[int]) -> list[list[float]]:
    out = []
    for i in rows:
        row = []
        for j in range(i, len(prepared)):
            try:
                value = float(kernel.pair(prepared[i], prepared[j]))
                if not math.isfinite(value):
                    raise NonFiniteKernelValue(kernel.descriptor.kernel, value)
            except GraphKernelError as exc:
                raise PairKernelError(ids[i], ids[j], exc) from exc
            row.append(value)
        out.append(row)
    return out


def compute_gram(
    graphs: Sequence[LabeledGraph],
    descriptor: Union[KernelDescriptor, dict],
    n_jobs: int = 1,
) -> GramMatrix:
    """Evaluate the kernel once per unordered pair and mirror the upper triangle.

    Rows are dealt to ``n_jobs`` workers; each worker owns whole rows, so the
    result does not depend on the worker count.
    """
    if isinstance(descriptor, dict):
        descriptor = KernelDescriptor.model_validate(descriptor)
    started = time.perf_counter()
    ids = graph_ids(graphs)
    kernel = build_kernel(descriptor)
    prepared = kernel.prepare_all(graphs)

    n = len(graphs)
    values = np.zeros((n, n), dtype=np.float64)
    block_count = 1 if n_jobs == 1 else max(1, min(n, 4 * abs(n_jobs)))
    blocks = [list(range(b, n, block_count)) for b in range(block_count)]
    results = Parallel(n_jobs=n_jobs)(
        delayed(_row_block)(kernel, prepared, ids, rows) for rows in blocks if rows
    )
    for rows, block in zip([rows for rows in blocks if rows], results):
        for i, row in zip(rows, block):
            values[i, i:] = row
            values[i:, i] = row

    if descriptor.sigma is not None:
        values = rbf_values(values, descriptor.sigma)
    logger.info(
        "Gram matrix computed: kernel=%s n=%d seconds=%.3f",
        descriptor.kernel,
        n,
        time.perf_counter() - started,
    )
    return GramMatrix(values=values, graph_ids=tuple(ids), kernel_descriptor=descriptor.record())


def with_rbf(m: GramMatrix, sigma: float) -> GramMatrix:
    record = dict(m.kernel_descriptor, sigma=sigma)
    return replace(m, values=rbf_values(m.values, sigma), kernel_descriptor=record, psd=None)


def scale_gram(m: GramMatrix) -> GramMatrix:
    """Affine map of the entries to [0, 1]; the parameters are kept for test rows."""
    params = ScalingParams.fit(m.values)
    if params.degenerate:
        warnings.warn(
            f"all Gram entries equal {params.lo}; scaling returns zeros", DegenerateRange, stacklevel=2
        )
        logger.warning("degenerate scaling range: every entry is %s", params.lo)
    return replace(m, values=params.apply(m.values), scaling=params, psd=None)


def check_psd(m: Union[GramMatrix, np.ndarray], tol: float = DEFAULT_PSD_TOL) -> PsdReport:
    values = m.values if isinstance(m, GramMatrix) else np.asarray(m, dtype=np.float64)
    if values.size == 0:
        return PsdReport(min_eigenvalue=0.0, max_eigenvalue=0.0, passed=True, tol=tol)
    eigenvalues = scipy.linalg.eigvalsh((values + values.T) / 2.0)
    lowest, highest = float(eigenvalues[0]), float(eigenvalues[-1])
    return PsdReport(
        min_eigenvalue=lowest,
        max_eigenvalue=highest,
        passed=lowest >= -tol * max(1.0, highest),
        tol=tol,
    )


def submatrix(values: np.ndarray, rows: Sequence[int], cols: Optional[Sequence[int]] = None) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    cols = rows if cols is None else np.asarray(cols, dtype=np.int64)
    return values[np.ix_(rows, cols)]
