"""Soft-margin SVM on precomputed Gram matrices.

The dual is solved by sequential minimal optimization: each step picks the
maximal violating pair and solves the two-variable subproblem analytically.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Literal, NamedTuple, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from app.errors import DimensionMismatch, NonConvergence, NoSupportVectors
from app.gram import GramMatrix, check_psd

logger = logging.getLogger(__name__)

KKT_TOL = 1e-6
MAX_ITER = 1_000_000
TAU = 1e-12

GramLike = Union[GramMatrix, np.ndarray]


@dataclass(frozen=True)
class SvmModel:
    support_indices: np.ndarray
    multipliers: np.ndarray
    labels: np.ndarray
    bias: float
    C: float
    kernel_descriptor: dict[str, Any] = field(default_factory=dict)
    n_train: int = 0
    iterations: int = 0


class Prediction(NamedTuple):
    label: int
    decision_value: float


def _values(gram: GramLike) -> np.ndarray:
    return gram.values if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.float64)


def svm_train(
    gram: GramLike,
    labels: Sequence[int],
    C: float,
    tol: float = KKT_TOL,
    max_iter: int = MAX_ITER,
) -> SvmModel:
    values = _values(gram)
    y = np.asarray(labels, dtype=np.float64)
    n = len(y)
    if values.shape != (n, n):
        raise DimensionMismatch(f"Gram matrix of shape {values.shape} for {n} labels")
    if C <= 0:
        raise ValueError("C must be positive")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("binary labels must be +1 or -1")
    if np.all(y == y[0]):
        raise NoSupportVectors("all training labels are equal; there is nothing to separate")
    if isinstance(gram, GramMatrix):
        report = gram.psd or check_psd(gram)
        if not report.passed:
            logger.warning(
                "training on a Gram matrix that fails the PSD check (min eigenvalue %.3g)",
                report.min_eigenvalue,
            )

    q = np.outer(y, y) * values
    diag = np.diag(q).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)

    iterations = 0
    while True:
        score = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        i = int(np.argmax(np.where(up, score, -np.inf)))
        j = int(np.argmin(np.where(low, score, np.inf)))
        if not up[i] or not low[j] or score[i] - score[j] < tol:
            break
        if iterations >= max_iter:
            raise NonConvergence(f"SMO did not reach KKT tolerance {tol} after {max_iter} updates")
        iterations += 1

        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = diag[i] + diag[j] + 2.0 * q[i, j]
            delta = (-grad[i] - grad[j]) / (quad if quad > 0 else TAU)
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, diff
            elif alpha[i] < 0:
                alpha[i], alpha[j] = 0.0, -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, C - diff
            elif alpha[j] > C:
                alpha[j], alpha[i] = C, C + diff
        else:
            quad = diag[i] + diag[j] - 2.0 * q[i, j]
            delta = (grad[i] - grad[j]) / (quad if quad > 0 else TAU)
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i], alpha[j] = C, total - C
                if alpha[j] > C:
                    alpha[j], alpha[i] = C, total - C
            else:
                if alpha[j] < 0:
                    alpha[j], alpha[i] = 0.0, total
                if alpha[i] < 0:
                    alpha[i], alpha[j] = 0.0, total
        grad += q[:, i] * (alpha[i] - old_i) + q[:, j] * (alpha[j] - old_j)

    bias = _bias(alpha, y, grad, C)
    support = np.flatnonzero(alpha > 0)
    if support.size == 0:
        raise NoSupportVectors("the solver returned no support vectors")
    descriptor = gram.kernel_descriptor if isinstance(gram, GramMatrix) else {}
    return SvmModel(
        support_indices=support,
        multipliers=alpha[support],
        labels=y[support].astype(np.int64),
        bias=bias,
        C=float(C),
        kernel_descriptor=dict(descriptor),
        n_train=n,
        iterations=iterations,
    )


def _bias(alpha: np.ndarray, y: np.ndarray, grad: np.ndarray, C: float) -> float:
    """Average over free multipliers, midpoint of the feasible interval otherwise."""
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yg[free].mean())
    else:
        upper_bound = np.inf
        lower_bound = -np.inf
        at_upper = alpha >= C
        at_lower = ~at_upper
        ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
        if ub_mask.any():
            upper_bound = float(yg[ub_mask].min())
        if lb_mask.any():
            lower_bound = float(yg[lb_mask].max())
        rho = (upper_bound + lower_bound) / 2.0
    return -rho


def decision_values(model: SvmModel, kernel_rows: np.ndarray) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(kernel_rows, dtype=np.float64))
    if rows.shape[1] != model.n_train:
        raise DimensionMismatch(
            f"kernel rows have {rows.shape[1]} columns, the model was trained on {model.n_train} graphs"
        )
    weights = model.multipliers * model.labels
    return rows[:, model.support_indices] @ weights + model.bias


def svm_predict(model: SvmModel, kernel_row: Sequence[float]) -> Prediction:
    row = np.asarray(kernel_row, dtype=np.float64)
    if row.ndim != 1:
        raise DimensionMismatch("svm_predict takes a single kernel row")
    value = float(decision_values(model, row)[0])
    return Prediction(label=1 if value >= 0 else -1, decision_value=value)


def kkt_residual(model: SvmModel, gram: GramLike, labels: Sequence[int]) -> float:
    """Largest violation of the complementary slackness conditions on the training set."""
    values = _values(gram)
    y = np.asarray(labels, dtype=np.float64)
    alpha = np.zeros(model.n_train)
    alpha[model.support_indices] = model.multipliers
    margins = y * decision_values(model, values)
    residual = np.zeros_like(margins)
    at_zero = alpha == 0
    at_c = alpha >= model.C
    free = ~at_zero & ~at_c
    residual[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
    residual[at_c] = np.maximum(0.0, margins[at_c] - 1.0)
    residual[free] = np.abs(margins[free] - 1.0)
    return float(residual.max()) if residual.size else 0.0


# ---------------------------------------------------------------------------
# Multiclass wrappers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BinaryMember:
    positive: int
    negative: Optional[int]
    train_index: np.ndarray
    model: SvmModel


@dataclass(frozen=True)
class MulticlassModel:
    scheme: Literal["ovo", "ova"]
    classes: tuple[int, ...]
    members: tuple[BinaryMember, ...]
    absolute_value_rule: bool = False


def _train_member(values, labels, positive, negative, index, C) -> BinaryMember:
    y = np.where(labels[index] == positive, 1, -1)
    model = svm_train(values[np.ix_(index, index)], y, C)
    return BinaryMember(positive=positive, negative=negative, train_index=index, model=model)


def multiclass_train(
    gram: GramLike,
    labels: Sequence[int],
    C: float,
    scheme: Literal["ovo", "ova"] = "ovo",
    absolute_value_rule: bool = False,
    n_jobs: int = 1,
) -> MulticlassModel:
    values = _values(gram)
    labels = np.asarray(labels, dtype=np.int64)
    if values.shape != (len(labels), len(labels)):
        raise DimensionMismatch(f"Gram matrix of shape {values.shape} for {len(labels)} labels")
    if scheme not in ("ovo", "ova"):
        raise ValueError(f"unknown multiclass scheme '{scheme}'")
    classes = tuple(int(c) for c in np.unique(labels))
    if len(classes) < 2:
        raise NoSupportVectors("at least two classes are needed")

    everyone = np.arange(len(labels))
    if len(classes) == 2:
        jobs = [(classes[1], classes[0], everyone)]
    elif scheme == "ovo":
        jobs = [
            (b, a, np.flatnonzero((labels == a) | (labels == b))) for a, b in combinations(classes, 2)
        ]
    else:
        jobs = [(c, None, everyone) for c in classes]

    members = Parallel(n_jobs=n_jobs)(
        delayed(_train_member)(values, labels, positive, negative, index, C)
        for positive, negative, index in jobs
    )
    return MulticlassModel(
        scheme=scheme,
        classes=classes,
        members=tuple(members),
        absolute_value_rule=absolute_value_rule,
    )


def multiclass_predict_many(bundle: MulticlassModel, kernel_rows: np.ndarray) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(kernel_rows, dtype=np.float64))
    decisions = np.stack(
        [decision_values(m.model, rows[:, m.train_index]) for m in bundle.members], axis=1
    )
    classes = np.asarray(bundle.classes)

    if len(bundle.members) == 1:
        member = bundle.members[0]
        return np.where(decisions[:, 0] >= 0, member.positive, member.negative)

    if bundle.scheme == "ova":
        scores = np.abs(decisions) if bundle.absolute_value_rule else decisions
        return classes[np.argmax(scores, axis=1)]

    position = {c: k for k, c in enumerate(bundle.classes)}
    votes = np.zeros((len(rows), len(classes)))
    confidence = np.zeros((len(rows), len(classes)))
    for k, member in enumerate(bundle.members):
        d = decisions[:, k]
        winner_pos = d >= 0
        votes[winner_pos, position[member.positive]] += 1
        votes[~winner_pos, position[member.negative]] += 1
        confidence[:, position[member.positive]] += d
        confidence[:, position[member.negative]] -= d
    predicted = []
    for r in range(len(rows)):
        best = max(range(len(classes)), key=lambda c: (votes[r, c], confidence[r, c], -c))
        predicted.append(classes[best])
    return np.asarray(predicted)


def multiclass_predict(bundle: MulticlassModel, kernel_row: Sequence[float]) -> int:
    return int(multiclass_predict_many(bundle, np.asarray(kernel_row, dtype=np.float64))[0])
