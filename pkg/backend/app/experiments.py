"""Gram and cross-validation runs over a parsed dataset, shared by the CLI and the API."""

from __future__ import annotations

from typing import Any, Literal, Mapping, Optional, Sequence, Union

from app.cross_validation import (
    DEFAULT_C_GRID,
    CvReport,
    RepeatedCvReport,
    kfold_cv,
    repeated_kfold_cv,
)
from app.datasets import Dataset
from app.gram import DEFAULT_PSD_TOL, SIGMA_GRID, GramMatrix, PsdReport, check_psd, compute_gram, scale_gram
from app.kernel_registry import KernelDescriptor

WL_KERNELS = ("wl", "wls", "wloa")
DEFAULT_WL_DEPTHS = tuple(range(8))


def run_gram(
    dataset: Dataset,
    descriptor: KernelDescriptor,
    scale: bool = False,
    n_jobs: int = 1,
    psd_tol: float = DEFAULT_PSD_TOL,
) -> tuple[GramMatrix, PsdReport]:
    m = compute_gram(dataset.graphs, descriptor, n_jobs=n_jobs)
    if scale:
        m = scale_gram(m)
    return m, check_psd(m, psd_tol)


def cv_param_grid(
    descriptor: KernelDescriptor,
    param_grid: Optional[Mapping[str, Sequence[Any]]] = None,
    rbf: bool = False,
) -> dict[str, list[Any]]:
    """Grid searched besides C.

    WL kernels search h over 0..7 when no grid is given, ``rbf`` adds the
    sigma grid and a descriptor sigma is pinned when the grid has none.
    """
    grid = {key: list(values) for key, values in (param_grid or {}).items()}
    if not grid and descriptor.kernel in WL_KERNELS:
        grid = {"h": list(DEFAULT_WL_DEPTHS)}
    if rbf and "sigma" not in grid:
        grid["sigma"] = list(SIGMA_GRID)
    if "lam" in grid:
        grid["lambda"] = grid.pop("lam")
    unknown = set(grid) - set(KernelDescriptor.model_fields) - {"lambda"}
    if unknown:
        raise ValueError(f"unknown grid parameter(s): {', '.join(sorted(unknown))}")
    if descriptor.sigma is not None and "sigma" not in grid:
        grid["sigma"] = [descriptor.sigma]
    return grid


def run_cv(
    dataset: Dataset,
    descriptor: KernelDescriptor,
    folds: int = 10,
    C_grid: Sequence[float] = DEFAULT_C_GRID,
    param_grid: Optional[Mapping[str, Sequence[Any]]] = None,
    seed: int = 0,
    repeats: int = 1,
    scale: bool = False,
    scheme: Literal["ovo", "ova"] = "ovo",
    rbf: bool = False,
    n_jobs: int = 1,
) -> Union[CvReport, RepeatedCvReport]:
    grid = cv_param_grid(descriptor, param_grid, rbf)
    base = descriptor.record()
    base.pop("sigma")

    def gram_for(params: dict[str, Any]) -> GramMatrix:
        return compute_gram(dataset.graphs, KernelDescriptor.model_validate({**base, **params}), n_jobs=n_jobs)

    common = dict(
        labels=dataset.class_labels,
        k=folds,
        C_grid=list(C_grid),
        param_grid=grid,
        seed=seed,
        scale=scale,
        scheme=scheme,
    )
    if repeats > 1:
        return repeated_kfold_cv(gram_for, repeats=repeats, **common)
    return kfold_cv(gram_for, **common)
