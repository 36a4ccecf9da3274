from __future__ import annotations

import json
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app import models
from app.cross_validation import DEFAULT_C_GRID
from app.kernel_registry import KernelDescriptor


class DatasetInspectRequest(BaseModel):
    path: str

    @field_validator("path")
    @classmethod
    def validate_path(cls, v):
        if not v or not v.strip():
            raise ValueError("Dataset path cannot be empty")
        return v


class DatasetStats(BaseModel):
    name: str
    graphs: int
    classes: Dict[str, int]
    mean_vertices: float
    mean_directed_edges: float
    mean_undirected_edges: float
    vertex_labels: int
    edge_labels: int
    max_degree: int
    connected_graphs: int


class GramRunCreate(BaseModel):
    dataset_path: str
    kernel: KernelDescriptor
    scale: bool = False
    include_matrix: bool = False


class GramRun(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: int
    dataset_path: str
    kernel: str
    descriptor: Dict[str, Any]
    graph_ids: List[str]
    graph_count: int
    scaled: bool
    psd_passed: bool
    min_eigenvalue: float
    created_at: Optional[datetime] = None
    matrix: Optional[List[List[float]]] = None

    @classmethod
    def from_row(cls, row: models.GramRun, include_matrix: bool = False) -> "GramRun":
        return cls(
            id=row.id,
            dataset_path=row.dataset_path,
            kernel=row.kernel,
            descriptor=json.loads(row.descriptor),
            graph_ids=json.loads(row.graph_ids),
            graph_count=row.graph_count,
            scaled=bool(row.scaled),
            psd_passed=row.psd_passed,
            min_eigenvalue=row.min_eigenvalue,
            created_at=row.created_at,
            matrix=json.loads(row.matrix) if include_matrix else None,
        )


class CvRunCreate(BaseModel):
    dataset_path: str
    kernel: KernelDescriptor
    C_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_C_GRID))
    param_grid: Dict[str, List[Any]] = Field(default_factory=dict)
    folds: int = Field(default=10, ge=2)
    seed: int = 0
    repeats: int = Field(default=1, ge=1)
    scale: bool = False
    scheme: Literal["ovo", "ova"] = "ovo"

    @field_validator("C_grid")
    @classmethod
    def validate_c_grid(cls, v):
        if not v or any(c <= 0 for c in v):
            raise ValueError("C_grid must hold positive values")
        return v


class CvRun(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    id: int
    dataset_path: str
    kernel: str
    descriptor: Dict[str, Any]
    folds: int
    seed: int
    repeats: int
    mean_error: float
    report: Dict[str, Any]
    created_at: Optional[datetime] = None

    @classmethod
    def from_row(cls, row: models.CvRun) -> "CvRun":
        return cls(
            id=row.id,
            dataset_path=row.dataset_path,
            kernel=row.kernel,
            descriptor=json.loads(row.descriptor),
            folds=row.folds,
            seed=row.seed,
            repeats=row.repeats,
            mean_error=row.mean_error,
            report=json.loads(row.report),
            created_at=row.created_at,
        )
