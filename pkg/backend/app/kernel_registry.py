"""Kernel descriptors and the per-kernel adapters used for Gram assembly.

Every adapter turns a graph into a reusable representation once
(``prepare_all``) and then evaluates pairs of representations (``pair``).
Dataset-level parameters such as ``gamma="auto"`` or the Hybrid density
``c="auto"`` are resolved inside ``prepare_all``.
"""

from __future__ import annotations

from typing import Any, Literal, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.baseline_kernels import edge_histogram, veh_kernel, vertex_histogram
from app.errors import GraphKernelError, PairKernelError, UnknownKernel
from app.fingerprints import (
    DEFAULT_DEPTH,
    DEFAULT_VECTOR_LENGTH,
    enumerate_labeled_paths,
    fingerprint,
    hybrid,
    mean_bit_density,
    minmax,
    tanimoto,
)
from app.graphs import LabeledGraph, floyd_transform
from app.path_kernels import shortest_path_histogram
from app.tree_kernels import TreePatternConfig, prepare_tree_graph, tree_pattern_value
from app.walk_kernels import (
    WalkKernelConfig,
    WalkModel,
    auto_gamma,
    exp_walk_kernel,
    grw_kernel,
    marginalized_from_models,
    nstep_kernel,
)
from app.weisfeiler_lehman import WlColorizer
from app.wl_kernels import WlHistogram, histogram_intersection


class KernelDescriptor(BaseModel):
    """Kernel id plus every parameter any kernel understands.

    Parameters that do not apply to the chosen kernel are ignored.
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    kernel: str
    h: int = Field(default=3, ge=0)
    base: Literal["vh", "eh", "sp"] = "vh"
    gamma: Union[float, Literal["auto"]] = "auto"
    beta: float = Field(default=1.0, ge=0)
    weights: Optional[list[float]] = None
    steps: int = Field(default=4, ge=0)
    stop_prob: float = Field(default=0.1, gt=0, lt=1)
    morgan_iterations: int = Field(default=0, ge=0)
    depth: int = Field(default=DEFAULT_DEPTH, ge=0)
    prune: bool = True
    vector_length: int = Field(default=DEFAULT_VECTOR_LENGTH, gt=0)
    bits: Literal[1, 4] = 1
    c: Union[float, Literal["auto"]] = "auto"
    lam: float = Field(default=1.0, ge=0, alias="lambda")
    variant: Literal["size", "branch"] = "size"
    tree_set: Literal["balanced", "up_to_depth"] = "balanced"
    no_tottering: bool = False
    branch_convention: Literal["leaves_plus_one", "leaves_minus_one"] = "leaves_plus_one"
    max_degree: int = Field(default=8, ge=1)
    use_labels: bool = True
    sigma: Optional[float] = Field(default=None, gt=0)

    @field_validator("kernel")
    @classmethod
    def kernel_known(cls, v: str) -> str:
        if v not in KERNELS:
            raise ValueError(f"unknown kernel '{v}' (known: {', '.join(sorted(KERNELS))})")
        return v

    @field_validator("gamma")
    @classmethod
    def gamma_positive(cls, v):
        if v != "auto" and v <= 0:
            raise ValueError("gamma must be positive")
        return v

    @field_validator("c")
    @classmethod
    def c_in_range(cls, v):
        if v != "auto" and not -1 < v < 2:
            raise ValueError("c must lie in (-1, 2)")
        return v

    @field_validator("weights")
    @classmethod
    def weights_non_negative(cls, v):
        if v is not None and (not v or any(w < 0 for w in v)):
            raise ValueError("weights must be a non-empty list of non-negative numbers")
        return v

    def record(self) -> dict[str, Any]:
        return self.model_dump(by_alias=True)


def graph_ids(graphs: Sequence[LabeledGraph]) -> list[str]:
    return [g.name if g.name is not None else str(i + 1) for i, g in enumerate(graphs)]


class PairKernel:
    """Base adapter: identity preparation, subclasses implement ``pair``."""

    def __init__(self, descriptor: KernelDescriptor):
        self.descriptor = descriptor

    def prepare(self, g: LabeledGraph) -> Any:
        return g

    def prepare_all(self, graphs: Sequence[LabeledGraph]) -> list[Any]:
        prepared = []
        for name, g in zip(graph_ids(graphs), graphs):
            try:
                prepared.append(self.prepare(g))
            except GraphKernelError as exc:
                raise PairKernelError(name, name, exc) from exc
        return prepared

    def pair(self, a: Any, b: Any) -> float:
        raise NotImplementedError


class VhKernel(PairKernel):
    def prepare(self, g):
        return vertex_histogram(g)

    def pair(self, a, b):
        return float(a.dot(b))


class EhKernel(VhKernel):
    def prepare(self, g):
        return edge_histogram(g)


class VehKernel(PairKernel):
    def pair(self, a, b):
        return veh_kernel(a, b)


class WalkKernel(PairKernel):
    """Adapter base holding the resolved walk parameters."""

    def __init__(self, descriptor):
        super().__init__(descriptor)
        self.config = WalkKernelConfig(
            gamma=None if descriptor.gamma == "auto" else descriptor.gamma,
            beta=descriptor.beta,
            weights=descriptor.weights or [1.0] * (descriptor.steps + 1),
            stop_prob=descriptor.stop_prob,
        )


class GrwKernel(WalkKernel):
    def prepare_all(self, graphs):
        if self.descriptor.gamma == "auto":
            self.config = self.config.model_copy(update={"gamma": auto_gamma(graphs)})
        return super().prepare_all(graphs)

    @property
    def gamma(self) -> float:
        return self.config.gamma

    def pair(self, a, b):
        return grw_kernel(a, b, self.config.gamma)


class ExpKernel(WalkKernel):
    def pair(self, a, b):
        return exp_walk_kernel(a, b, self.config.beta)


class NstepKernel(WalkKernel):
    def pair(self, a, b):
        return nstep_kernel(a, b, self.config.weights)


class MarginalizedKernel(WalkKernel):
    def prepare(self, g):
        return WalkModel.plain(g, self.config.stop_prob)

    def pair(self, a, b):
        return marginalized_from_models(a, b)


class MarginalizedNtKernel(MarginalizedKernel):
    def prepare(self, g):
        return WalkModel.non_tottering(g, self.config.stop_prob, self.descriptor.morgan_iterations)


class SpKernel(VhKernel):
    def prepare(self, g):
        return shortest_path_histogram(floyd_transform(g))


class TreeKernel(PairKernel):
    def __init__(self, descriptor):
        super().__init__(descriptor)
        self.config = TreePatternConfig(
            depth_h=max(descriptor.h, 1),
            lam=descriptor.lam,
            variant=descriptor.variant,
            tree_set=descriptor.tree_set,
            no_tottering=descriptor.no_tottering,
            branch_convention=descriptor.branch_convention,
            max_degree=descriptor.max_degree,
        )

    def prepare(self, g):
        return prepare_tree_graph(g, self.config)

    def pair(self, a, b):
        return tree_pattern_value(a, b, self.config)


class TanimotoKernel(PairKernel):
    def prepare(self, g):
        paths = enumerate_labeled_paths(g, self.descriptor.depth, self.descriptor.prune)
        return fingerprint(paths, "binary")

    def pair(self, a, b):
        return tanimoto(a, b)


class MinmaxKernel(PairKernel):
    def prepare(self, g):
        return enumerate_labeled_paths(g, self.descriptor.depth, self.descriptor.prune)

    def pair(self, a, b):
        return minmax(a, b)


class HybridKernel(PairKernel):
    def prepare(self, g):
        d = self.descriptor
        paths = enumerate_labeled_paths(g, d.depth, d.prune)
        return fingerprint(paths, "hashed", d.vector_length, d.bits)

    def prepare_all(self, graphs):
        prepared = super().prepare_all(graphs)
        c = self.descriptor.c
        self.c = mean_bit_density(prepared) if c == "auto" else c
        return prepared

    def pair(self, a, b):
        return hybrid(tanimoto(a, b), self.c)


def _sp_histogram(g: LabeledGraph):
    return shortest_path_histogram(floyd_transform(g))


# per-level representations whose dot product is the base kernel
WL_LEVEL_FEATURES = {
    "vh": vertex_histogram,
    "eh": edge_histogram,
    "sp": _sp_histogram,
}


class WlKernel(PairKernel):
    """WL kernel with a vh, eh or sp base; all graphs share one color dictionary."""

    def prepare_all(self, graphs):
        represent = WL_LEVEL_FEATURES[self.descriptor.base]
        per_graph = WlColorizer().refine(graphs, self.descriptor.h)
        prepared = []
        for name, g, levels in zip(graph_ids(graphs), graphs, per_graph):
            try:
                prepared.append([represent(g.relabeled(coloring)) for coloring in levels])
            except GraphKernelError as exc:
                raise PairKernelError(name, name, exc) from exc
        return prepared

    def pair(self, a, b):
        return float(sum(x.dot(y) for x, y in zip(a, b)))


class WlsKernel(PairKernel):
    def prepare_all(self, graphs):
        per_graph = WlColorizer().refine(graphs, self.descriptor.h)
        return [WlHistogram.from_levels(levels).counts for levels in per_graph]

    def pair(self, a, b):
        return float(sum(count * b.get(color, 0) for color, count in a.items()))


class WloaKernel(PairKernel):
    def prepare_all(self, graphs):
        colorizer = WlColorizer(use_labels=self.descriptor.use_labels)
        per_graph = colorizer.refine(graphs, self.descriptor.h)
        return [WlHistogram.from_levels(levels).counts for levels in per_graph]

    def pair(self, a, b):
        return histogram_intersection(a, b)


KERNELS: dict[str, type[PairKernel]] = {
    "vh": VhKernel,
    "eh": EhKernel,
    "veh": VehKernel,
    "grw": GrwKernel,
    "exp": ExpKernel,
    "nstep": NstepKernel,
    "marginalized": MarginalizedKernel,
    "marginalized_nt": MarginalizedNtKernel,
    "sp": SpKernel,
    "tree": TreeKernel,
    "tanimoto": TanimotoKernel,
    "minmax": MinmaxKernel,
    "hybrid": HybridKernel,
    "wl": WlKernel,
    "wls": WlsKernel,
    "wloa": WloaKernel,
}


def build_kernel(descriptor: KernelDescriptor) -> PairKernel:
    try:
        kernel_class = KERNELS[descriptor.kernel]
    except KeyError:
        raise UnknownKernel(descriptor.kernel, sorted(KERNELS)) from None
    return kernel_class(descriptor)
