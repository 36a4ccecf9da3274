"""Stratified k-fold cross-validation with grid search over C and kernel parameters."""

from __future__ import annotations

import logging
from itertools import product
from typing import Any, Callable, Literal, Mapping, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

from app.errors import FoldTooSmall
from app.gram import GramMatrix, ScalingParams, rbf_values
from app.svm import multiclass_predict_many, multiclass_train

logger = logging.getLogger(__name__)

DEFAULT_C_GRID = (1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3)

GramSource = Union[GramMatrix, np.ndarray, Callable[[dict[str, Any]], Union[GramMatrix, np.ndarray]]]


class GridPoint(BaseModel):
    C: float
    params: dict[str, Any] = Field(default_factory=dict)
    mean_error: float


class CvReport(BaseModel):
    fold_errors: list[float]
    mean_error: float
    hyperparameters: dict[str, Any]
    seed: int
    folds: int
    grid: list[GridPoint] = Field(default_factory=list)


class RepeatedCvReport(BaseModel):
    reports: list[CvReport]
    mean_error: float
    seed: int
    repeats: int


def error_rate(y_true: Sequence[int], y_pred: Sequence[int]) -> float:
    y_true, y_pred = np.asarray(y_true), np.asarray(y_pred)
    if len(y_true) == 0:
        return 0.0
    return float(np.mean(y_true != y_pred))


def stratified_folds(labels: Sequence[int], k: int, seed: int) -> list[np.ndarray]:
    """Shuffle each class with a seeded generator and deal it round-robin over the folds.

    The deal continues across classes, so fold sizes differ by at most one
    and each class is spread as evenly as its size allows.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if not 2 <= k <= n:
        raise ValueError(f"folds must lie between 2 and the sample count ({n}), got {k}")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    position = 0
    for cls in np.unique(labels):
        for member in rng.permutation(np.flatnonzero(labels == cls)):
            fold_of[member] = position % k
            position += 1
    return [np.flatnonzero(fold_of == f) for f in range(k)]


def expand_grid(param_grid: Optional[Mapping[str, Sequence[Any]]]) -> list[dict[str, Any]]:
    if not param_grid:
        return [{}]
    keys = sorted(param_grid)
    return [dict(zip(keys, combo)) for combo in product(*(param_grid[key] for key in keys))]


class _GramCache:
    """Base Gram per kernel parameter setting; ``sigma`` is applied on top."""

    def __init__(self, source: GramSource):
        self.source = source
        self._cache: dict[tuple, np.ndarray] = {}

    def values(self, params: dict[str, Any]) -> np.ndarray:
        kernel_params = {k: v for k, v in params.items() if k != "sigma"}
        key = tuple(sorted(kernel_params.items()))
        if key not in self._cache:
            if callable(self.source):
                base = self.source(kernel_params)
            elif kernel_params:
                raise ValueError("a fixed Gram matrix cannot vary kernel parameters")
            else:
                base = self.source
            self._cache[key] = base.values if isinstance(base, GramMatrix) else np.asarray(base, float)
        values = self._cache[key]
        if params.get("sigma") is not None:
            values = rbf_values(values, float(params["sigma"]))
        return values


def _fold_errors(
    values: np.ndarray,
    labels: np.ndarray,
    folds: list[np.ndarray],
    C: float,
    scale: bool,
    scheme: str,
    n_jobs: int,
) -> list[float]:
    errors = []
    everyone = np.arange(len(labels))
    for held_out in folds:
        train = np.setdiff1d(everyone, held_out)
        train_values = values[np.ix_(train, train)]
        test_rows = values[np.ix_(held_out, train)]
        if scale:
            scaling = ScalingParams.fit(train_values)
            train_values, test_rows = scaling.apply(train_values), scaling.apply(test_rows)
        bundle = multiclass_train(train_values, labels[train], C, scheme=scheme, n_jobs=n_jobs)
        errors.append(error_rate(labels[held_out], multiclass_predict_many(bundle, test_rows)))
    return errors


def kfold_cv(
    gram: GramSource,
    labels: Sequence[int],
    k: int,
    C_grid: Sequence[float] = DEFAULT_C_GRID,
    param_grid: Optional[Mapping[str, Sequence[Any]]] = None,
    seed: int = 0,
    scale: bool = False,
    scheme: Literal["ovo", "ova"] = "ovo",
    n_jobs: int = 1,
) -> CvReport:
    """Select (C, params) by mean 0-1 error over stratified folds; ties go to the smallest C.

    ``gram`` is either a fixed Gram matrix or a callable returning the Gram
    matrix for a dict of kernel parameters. A ``sigma`` entry in the grid
    applies the graph RBF to the Gram matrix of the remaining parameters.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if not C_grid:
        raise ValueError("C_grid must not be empty")
    folds = stratified_folds(labels, k, seed)
    classes = set(np.unique(labels).tolist())
    everyone = np.arange(len(labels))
    for f, held_out in enumerate(folds):
        present = set(labels[np.setdiff1d(everyone, held_out)].tolist())
        if present != classes:
            raise FoldTooSmall(
                f"fold {f} leaves class(es) {sorted(classes - present)} out of its training split"
            )

    cache = _GramCache(gram)
    settings = expand_grid(param_grid)
    grid: list[GridPoint] = []
    best: Optional[tuple[float, float, int, list[float]]] = None
    for C in sorted(float(c) for c in C_grid):
        for order, params in enumerate(settings):
            errors = _fold_errors(cache.values(params), labels, folds, C, scale, scheme, n_jobs)
            mean = float(np.mean(errors))
            grid.append(GridPoint(C=C, params=params, mean_error=mean))
            if best is None or mean < best[0]:
                best = (mean, C, order, errors)

    mean, C, order, errors = best
    hyperparameters = {"C": C, **settings[order]}
    logger.info("CV finished: hyperparameters=%s mean_error=%.4f", hyperparameters, mean)
    return CvReport(
        fold_errors=errors,
        mean_error=mean,
        hyperparameters=hyperparameters,
        seed=seed,
        folds=k,
        grid=grid,
    )


def repeated_kfold_cv(
    gram: GramSource,
    labels: Sequence[int],
    k: int,
    C_grid: Sequence[float] = DEFAULT_C_GRID,
    param_grid: Optional[Mapping[str, Sequence[Any]]] = None,
    seed: int = 0,
    repeats: int = 10,
    scale: bool = False,
    scheme: Literal["ovo", "ova"] = "ovo",
    n_jobs: int = 1,
) -> RepeatedCvReport:
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    source = gram
    if callable(gram):
        # base Gram matrices are shared by all repeats
        source = _GramCache(gram).values
    reports = [
        kfold_cv(source, labels, k, C_grid, param_grid, seed + r, scale, scheme, n_jobs)
        for r in range(repeats)
    ]
    return RepeatedCvReport(
        reports=reports,
        mean_error=float(np.mean([r.mean_error for r in reports])),
        seed=seed,
        repeats=repeats,
    )
