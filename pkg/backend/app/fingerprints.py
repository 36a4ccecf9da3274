"""Path fingerprints and the Tanimoto, MinMax and Hybrid kernels.

Paths are walks with pairwise distinct edges (vertices may repeat) of 0 up
to ``depth`` bonds. A path's feature is its alternating vertex/edge label
sequence; a sequence and its reverse are one feature, stored in the
lexicographically smaller orientation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence, Union

import numpy as np

from app.errors import FeatureExplosion
from app.graphs import LabeledGraph

DEFAULT_DEPTH = 10
DEFAULT_VECTOR_LENGTH = 1024
FEATURE_CAP = 10_000_000

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1

LabelSequence = tuple[int, ...]
Mode = Literal["binary", "counting", "hashed"]


@dataclass(frozen=True)
class PathFeatureSet:
    features: dict[LabelSequence, int]
    depth: int
    mode: Mode = "counting"
    vector_length: Optional[int] = None
    bits: Optional[int] = None
    bitvector: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def popcount(self) -> int:
        if self.bitvector is not None:
            return int(self.bitvector.sum())
        return len(self.features)


def canonical(sequence: Sequence[int]) -> LabelSequence:
    forward = tuple(sequence)
    backward = forward[::-1]
    return min(forward, backward)


def enumerate_labeled_paths(
    g: LabeledGraph,
    depth: int = DEFAULT_DEPTH,
    prune: bool = True,
    cap: int = FEATURE_CAP,
) -> PathFeatureSet:
    """Counting feature set of all labeled paths with up to ``depth`` bonds.

    Paths from one start vertex grow one bond per round. With ``prune`` on,
    a bond that some path crossed in an earlier round is closed to every
    later round, so branches that diverged never re-walk each other's bonds.
    Rounds treat all branches alike, which keeps the result independent of
    vertex numbering.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    labels = g.vertex_labels
    vertex_counts: Counter = Counter((label,) for label in labels)
    directed_counts: Counter = Counter()

    for start in range(g.vertex_count):
        closed: set[tuple[int, int]] = set()
        frontier = [(start, (labels[start],), frozenset())]
        for _ in range(depth):
            crossed: set[tuple[int, int]] = set()
            grown = []
            for vertex, sequence, path_edges in frontier:
                for nxt in g.neighbors[vertex]:
                    bond = (min(vertex, nxt), max(vertex, nxt))
                    if bond in path_edges or bond in closed:
                        continue
                    crossed.add(bond)
                    extended = sequence + (g.edge_labels[(vertex, nxt)], labels[nxt])
                    directed_counts[canonical(extended)] += 1
                    if len(directed_counts) + len(vertex_counts) > cap:
                        raise FeatureExplosion(len(directed_counts) + len(vertex_counts), cap)
                    grown.append((nxt, extended, path_edges | {bond}))
            if prune:
                closed |= crossed
            frontier = grown
            if not frontier:
                break

    features = dict(vertex_counts)
    for key, count in directed_counts.items():
        # each undirected occurrence is met once from either end
        features[key] = (count + 1) // 2
    return PathFeatureSet(features=features, depth=depth, mode="counting")


def fnv1a_64(data: bytes) -> int:
    value = FNV_OFFSET
    for byte in data:
        value ^= byte
        value = (value * FNV_PRIME) & MASK64
    return value


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + SPLITMIX_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


def serialize(sequence: Sequence[int]) -> bytes:
    return ",".join(str(label) for label in sequence).encode("ascii")


def hash_indices(sequence: Sequence[int], vector_length: int, bits: int = 1) -> list[int]:
    generator = SplitMix64(fnv1a_64(serialize(sequence)))
    return [generator.next() % vector_length for _ in range(bits)]


def fingerprint(
    ps: PathFeatureSet,
    mode: Mode,
    vector_length: int = DEFAULT_VECTOR_LENGTH,
    bits: int = 1,
) -> PathFeatureSet:
    if mode == "counting":
        if ps.mode != "counting":
            raise ValueError("counts cannot be recovered from a binary or hashed feature set")
        return ps
    binary = {key: 1 for key in ps.features}
    if mode == "binary":
        return PathFeatureSet(features=binary, depth=ps.depth, mode="binary")
    if mode != "hashed":
        raise ValueError(f"unknown fingerprint mode '{mode}'")
    if vector_length <= 0:
        raise ValueError("vector_length must be positive")
    if bits not in (1, 4):
        raise ValueError("bits must be 1 or 4")
    vector = np.zeros(vector_length, dtype=bool)
    for key in sorted(binary):
        vector[hash_indices(key, vector_length, bits)] = True
    return PathFeatureSet(
        features=binary,
        depth=ps.depth,
        mode="hashed",
        vector_length=vector_length,
        bits=bits,
        bitvector=vector,
    )


# ---------------------------------------------------------------------------
# Kernels over feature sets
# ---------------------------------------------------------------------------


def tanimoto(a: PathFeatureSet, b: PathFeatureSet) -> float:
    if a.bitvector is not None and b.bitvector is not None:
        shared = float(np.count_nonzero(a.bitvector & b.bitvector))
        union = float(np.count_nonzero(a.bitvector | b.bitvector))
    else:
        shared = float(len(a.features.keys() & b.features.keys()))
        union = float(len(a.features) + len(b.features)) - shared
    return shared / union if union else 0.0


def minmax(a: PathFeatureSet, b: PathFeatureSet) -> float:
    low = high = 0
    for key in a.features.keys() | b.features.keys():
        x, y = a.features.get(key, 0), b.features.get(key, 0)
        low += min(x, y)
        high += max(x, y)
    return low / high if high else 0.0


def hybrid(k_t: float, c: float) -> float:
    if not -1 < c < 2:
        raise ValueError("c must lie in (-1, 2)")
    return ((2 - c) * k_t + (1 + c) * (1 - k_t)) / 3


def mean_bit_density(feature_sets: Sequence[PathFeatureSet]) -> float:
    """Mean fraction of set bits over hashed fingerprints."""
    densities = [ps.popcount / ps.vector_length for ps in feature_sets if ps.bitvector is not None]
    if not densities:
        raise ValueError("bit density needs hashed fingerprints")
    return float(np.mean(densities))


def tanimoto_kernel(g1: LabeledGraph, g2: LabeledGraph, depth: int = DEFAULT_DEPTH, prune: bool = True) -> float:
    a = fingerprint(enumerate_labeled_paths(g1, depth, prune), "binary")
    b = fingerprint(enumerate_labeled_paths(g2, depth, prune), "binary")
    return tanimoto(a, b)


def minmax_kernel(g1: LabeledGraph, g2: LabeledGraph, depth: int = DEFAULT_DEPTH, prune: bool = True) -> float:
    return minmax(enumerate_labeled_paths(g1, depth, prune), enumerate_labeled_paths(g2, depth, prune))


def hybrid_kernel(
    g1: LabeledGraph,
    g2: LabeledGraph,
    depth: int = DEFAULT_DEPTH,
    vector_length: int = DEFAULT_VECTOR_LENGTH,
    c: Union[float, Literal["auto"]] = "auto",
    bits: int = 1,
    prune: bool = True,
) -> float:
    a = fingerprint(enumerate_labeled_paths(g1, depth, prune), "hashed", vector_length, bits)
    b = fingerprint(enumerate_labeled_paths(g2, depth, prune), "hashed", vector_length, bits)
    if c == "auto":
        c = mean_bit_density([a, b])
    return hybrid(tanimoto(a, b), float(c))
