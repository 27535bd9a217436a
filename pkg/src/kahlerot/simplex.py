"""
Natural parameters and simplex weights.

A point x in R^d corresponds to the weights
p_i = exp(x_i) / (1 + sum_j exp(x_j)) for i <= d and p_{d+1} = 1 / (1 + sum_j exp(x_j)).
"""

from typing import Sequence

import numpy as np
from pydantic import BaseModel
from scipy.special import softmax

from .constants import WEIGHT_SUM_TOL
from .enums import SimplexDirection
from .errors import PreconditionError
from .jets import Jet4, Scalar, apply_primitive


def to_weights(x: Sequence[float] | np.ndarray) -> np.ndarray:
    """Natural parameters of shape ``(..., d)`` to weights of shape ``(..., d+1)``."""
    x = np.asarray(x, dtype=float)
    padded = np.concatenate([x, np.zeros(x.shape[:-1] + (1,))], axis=-1)
    return softmax(padded, axis=-1)


def to_natural(p: Sequence[float] | np.ndarray, tol: float = WEIGHT_SUM_TOL) -> np.ndarray:
    """Weights of shape ``(..., n)`` to natural parameters of shape ``(..., n-1)``."""
    p = np.asarray(p, dtype=float)
    if p.shape[-1] < 2:
        raise PreconditionError("simplex weights need at least two components")
    if np.any(p <= 0):
        raise PreconditionError("simplex weights must be strictly positive")
    sums = p.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > tol):
        worst = float(np.max(np.abs(sums - 1.0)))
        raise PreconditionError(f"simplex weights must sum to 1 (off by {worst:.3e})")
    logs = np.log(p)
    return logs[..., :-1] - logs[..., -1:]


def simplex_transform(
    direction: SimplexDirection | str, value: Sequence[float] | np.ndarray
) -> np.ndarray:
    direction = SimplexDirection(direction)
    if direction is SimplexDirection.TO_WEIGHTS:
        return to_weights(value)
    return to_natural(value)


class UniformProbabilityCheck(BaseModel):
    holds: bool
    delta: float
    min_weight: float


def uniform_probability(
    points: Sequence[Sequence[float]] | np.ndarray, delta: float
) -> UniformProbabilityCheck:
    """Whether every weight of every point exceeds ``delta``."""
    weights = np.atleast_2d(np.asarray(points, dtype=float))
    min_weight = float(weights.min())
    return UniformProbabilityCheck(
        holds=bool(min_weight > delta), delta=delta, min_weight=min_weight
    )


def weights_of(x: Sequence[Jet4 | Scalar]) -> list[Jet4 | Scalar]:
    """The weight map on jets or arrays, for differentiating through the chart."""
    exps = [apply_primitive("exp", xi) for xi in x]
    total = 1.0
    for e in exps:
        total = total + e
    return [apply_primitive("div", e, total) for e in exps] + [
        apply_primitive("div", 1.0, total)
    ]
