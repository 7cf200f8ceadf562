"""The J_n polynomials of an f-deformed oscillator.

J_0 = 1, J_1 = 2x / sqrt([1](1+Q)) and

    J_{n+1} = ( 2x/sqrt(1+Q) J_n - sqrt([n]) J_{n-1} ) / sqrt([n+1]).

They are orthonormal with respect to the ground-state density (see
``spectral``).  Hermite and Chebyshev-U evaluators are kept here as
independent references for the q -> 1 and q -> 0 limits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .deformation import DeformationSpec, bracket_sequence, bracket_factorial, deformation_Q

__all__ = [
    "OVERFLOW_THRESHOLD",
    "PolynomialEvaluation",
    "eval_all",
    "eval_grid",
    "eval_table",
    "closed_form_j2",
    "closed_form_j3",
    "hermite_oracle",
    "chebyshevU_oracle",
    "normalized_hermite",
]

OVERFLOW_THRESHOLD = 1e300


@dataclass(frozen=True)
class PolynomialEvaluation:
    spec: DeformationSpec
    x: float
    values: np.ndarray
    overflow_at: Optional[int] = None

    @property
    def order(self) -> int:
        return len(self.values) - 1


def _recurrence_terms(spec: DeformationSpec, N: int):
    seq = bracket_sequence(spec, max(N, 1))
    return 2.0 / math.sqrt(1.0 + deformation_Q(spec)), np.sqrt(seq.values)


def eval_table(spec: DeformationSpec, x, N: int) -> np.ndarray:
    """J_0..J_N at every abscissa of `x`, shape (len(x), N+1).

    Entries past a magnitude of 1e300 are set to nan; that happens only far
    outside the support of the orthogonality measure.
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    scale, root = _recurrence_terms(spec, N)
    out = np.full((x.size, N + 1), np.nan)
    out[:, 0] = 1.0
    if N == 0:
        return out
    prev = np.ones_like(x)
    cur = (scale * x) / root[1]
    alive = np.ones(x.size, dtype=bool)
    out[:, 1] = cur
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, N):
            nxt = ((scale * x) * cur - root[n] * prev) / root[n + 1]
            alive &= np.abs(nxt) <= OVERFLOW_THRESHOLD
            out[alive, n + 1] = nxt[alive]
            prev, cur = cur, nxt
    return out


def eval_all(spec: DeformationSpec, x: float, N: int) -> PolynomialEvaluation:
    row = eval_table(spec, [x], N)[0]
    bad = np.flatnonzero(np.isnan(row))
    if bad.size:
        cut = int(bad[0])
        return PolynomialEvaluation(spec, float(x), row[:cut], overflow_at=cut)
    return PolynomialEvaluation(spec, float(x), row)


def eval_grid(spec: DeformationSpec, grid: Sequence[float], N: int) -> list[PolynomialEvaluation]:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty one-dimensional sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return [eval_all(spec, x, N) for x in grid]


def closed_form_j2(spec: DeformationSpec, x):
    """(4x^2 - (1+Q)[1]) / sqrt([2]! (1+Q)^2)"""
    Q = deformation_Q(spec)
    b1 = bracket_sequence(spec, 1).values[1]
    x = np.asarray(x, dtype=float)
    return (4.0 * x**2 - (1.0 + Q) * b1) / math.sqrt(bracket_factorial(spec, 2) * (1.0 + Q) ** 2)


def closed_form_j3(spec: DeformationSpec, x):
    """(8x^3 - 2(1+Q)([1]+[2]) x) / sqrt([3]! (1+Q)^3)"""
    Q = deformation_Q(spec)
    br = bracket_sequence(spec, 2).values
    x = np.asarray(x, dtype=float)
    num = 8.0 * x**3 - 2.0 * (1.0 + Q) * (br[1] + br[2]) * x
    return num / math.sqrt(bracket_factorial(spec, 3) * (1.0 + Q) ** 3)


def hermite_oracle(n: int, x):
    """Physicists' Hermite H_n(x) from H_{n+1} = 2x H_n - 2n H_{n-1}."""
    x = np.asarray(x, dtype=float)
    h_prev, h = np.zeros_like(x), np.ones_like(x)
    for k in range(int(n)):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h


def chebyshevU_oracle(n: int, x):
    """Chebyshev U_n(x) from U_{n+1} = 2x U_n - U_{n-1}."""
    x = np.asarray(x, dtype=float)
    u_prev, u = np.zeros_like(x), np.ones_like(x)
    for _ in range(int(n)):
        u_prev, u = u, 2.0 * x * u - u_prev
    return u


def normalized_hermite(n: int, x):
    """H_n(x) / sqrt(2^n n!), the undeformed limit of J_n."""
    return hermite_oracle(n, x) / math.sqrt(2.0**n * math.factorial(n))
