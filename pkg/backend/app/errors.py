"""Exception types shared by the kernel library, the CLI and the API.

Data errors (bad input files, invalid graphs) and numeric errors (parameters
that make a kernel or a solver diverge) are kept apart so callers can map
them to distinct exit codes and HTTP statuses.
"""

from __future__ import annotations

from typing import Optional


def _rebuild(cls, args, state):
    exc = Exception.__new__(cls)
    exc.args = args
    exc.__dict__.update(state)
    return exc


class GraphKernelError(Exception):
    """Base class for every error raised by this package."""

    def __reduce__(self):
        # subclasses take structured constructor arguments; keep them intact across worker processes
        return (_rebuild, (self.__class__, self.args, self.__dict__))


class DataError(GraphKernelError):
    """The input data cannot be used as given."""


class NumericError(GraphKernelError):
    """A kernel or solver cannot produce a finite, trustworthy value."""


class DisconnectedGraph(DataError):
    def __init__(self, graph_name: Optional[str] = None):
        self.graph_name = graph_name
        label = f"'{graph_name}'" if graph_name else "graph"
        super().__init__(f"{label} is disconnected; shortest-path distances are undefined")


class InvalidGraph(DataError):
    def __init__(self, graph_name: Optional[str], violations: list[str]):
        self.graph_name = graph_name
        self.violations = list(violations)
        super().__init__(f"graph {graph_name!r} is invalid: {'; '.join(violations)}")


class MalformedLine(DataError):
    def __init__(self, file: str, line_no: int, reason: str = "cannot parse line"):
        self.file = file
        self.line_no = line_no
        super().__init__(f"{file}:{line_no}: {reason}")


class IndexOutOfRange(DataError):
    def __init__(self, file: str, line_no: int, index: int, upper: int):
        self.file = file
        self.line_no = line_no
        self.index = index
        super().__init__(f"{file}:{line_no}: index {index} outside 1..{upper}")


class MissingFile(DataError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"required file not found: {path}")


class FoldTooSmall(DataError):
    pass


class UnknownKernel(DataError):
    def __init__(self, kernel: str, known: list[str]):
        self.kernel = kernel
        super().__init__(f"unknown kernel '{kernel}' (known: {', '.join(known)})")


class GammaTooLarge(NumericError):
    def __init__(self, gamma: float, max_degree: int):
        self.gamma = gamma
        self.max_degree = max_degree
        super().__init__(
            f"gamma={gamma} must be below 1/{max_degree} for this product graph"
        )


class DegreeOverflow(NumericError):
    def __init__(self, degree: int, cap: int):
        self.degree = degree
        self.cap = cap
        super().__init__(f"vertex degree {degree} exceeds the configured cap {cap}")


class FeatureExplosion(NumericError):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"path enumeration produced more than {cap} features")


class NoSupportVectors(NumericError):
    pass


class NonConvergence(NumericError):
    pass


class NonFiniteKernelValue(NumericError):
    def __init__(self, kernel: str, value: float):
        self.kernel = kernel
        self.value = value
        super().__init__(f"{kernel} kernel value is not finite ({value})")


class DimensionMismatch(GraphKernelError, ValueError):
    pass


class IoFailure(GraphKernelError):
    pass


class PairKernelError(GraphKernelError):
    """A kernel evaluation failed for one pair of graphs during Gram assembly."""

    def __init__(self, first: str, second: str, cause: GraphKernelError):
        self.first = first
        self.second = second
        self.cause = cause
        super().__init__(f"kernel failed on pair ({first}, {second}): {cause}")


class DegenerateRange(UserWarning):
    """Scaling was asked for a matrix whose entries are all equal."""


def is_data_error(exc: BaseException) -> bool:
    if isinstance(exc, PairKernelError):
        return is_data_error(exc.cause)
    return isinstance(exc, DataError)


def is_numeric_error(exc: BaseException) -> bool:
    if isinstance(exc, PairKernelError):
        return is_numeric_error(exc.cause)
    return isinstance(exc, NumericError)
