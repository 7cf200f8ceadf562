"""Truncated Fock-space matrices of the deformed ladder and quadrature operators.

Basis states are |0>_f ... |D-1>_f.  The lowering operator sends |n>_f to
sqrt([n]) |n-1>_f, so its only nonzeros sit on the first superdiagonal.
Quadrature operators use the normalisation alpha = beta = sqrt(1+Q)/2.

The residual checks compare both sides of an operator identity on the
leading block of the truncated space; the last one or two levels are
dropped because truncation corrupts them.  By default they run in
extended precision: for the geometrically growing physics-type and (p,q)
brackets the matrix entries reach 1e8 and beyond at D = 32, and a float64
evaluation cannot resolve a 1e-12 absolute residual at that scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .deformation import (
    DeformationSpec,
    bracket_sequence,
    commutator_rhs,
    deformation_Q,
    mp_brackets,
    validate,
)

__all__ = [
    "OperatorMatrix",
    "lowering_matrix",
    "raising_matrix",
    "number_matrix",
    "quadrature_matrix",
    "position_matrix",
    "momentum_matrix",
    "q_commutator_residual",
    "xp_commutator_residual",
]

DEFAULT_DPS = 40


@dataclass(frozen=True)
class OperatorMatrix:
    label: str
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.label + "^dagger", self.entries.conj().T)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(f"{self.label}*{other.label}", self.entries @ other.entries)


def _check_dim(dim: int, least: int) -> int:
    dim = int(dim)
    if dim < least:
        raise ValueError(f"dimension must be at least {least}, got {dim}")
    return dim


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _sqrt_brackets(spec: DeformationSpec, dim: int) -> np.ndarray:
    return np.sqrt(bracket_sequence(spec, dim - 1).values[1:])


def lowering_matrix(spec: DeformationSpec, dim: int) -> OperatorMatrix:
    dim = _check_dim(dim, 2)
    a = np.zeros((dim, dim))
    idx = np.arange(1, dim)
    a[idx - 1, idx] = _sqrt_brackets(spec, dim)
    return OperatorMatrix("A", _frozen(a))


def raising_matrix(spec: DeformationSpec, dim: int) -> OperatorMatrix:
    return OperatorMatrix("A^dagger", _frozen(lowering_matrix(spec, dim).entries.T.copy()))


def number_matrix(spec: DeformationSpec, dim: int) -> OperatorMatrix:
    """N = A^dagger A, diagonal with entries [0] .. [dim-1].

    The diagonal is formed from the same square roots as the ladder matrices,
    so it equals raising @ lowering bit for bit (and [n] to within an ulp).
    """
    dim = _check_dim(dim, 2)
    s = np.concatenate(([0.0], _sqrt_brackets(spec, dim)))
    return OperatorMatrix("N", _frozen(np.diag(s * s)))


def _phase(theta: float) -> complex:
    theta = math.fmod(float(theta), 2.0 * math.pi)
    return complex(math.cos(theta), -math.sin(theta))


def quadrature_matrix(spec: DeformationSpec, dim: int, theta: float) -> OperatorMatrix:
    """X_theta = sqrt(1+Q)/2 (A e^{-i theta} + A^dagger e^{i theta}).

    Hermitian by construction: the subdiagonal is written as the conjugate of
    the superdiagonal.
    """
    dim = _check_dim(dim, 2)
    b = bracket_sequence(spec, dim - 1).offdiag
    upper = b * _phase(theta)
    x = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(1, dim)
    x[idx - 1, idx] = upper
    x[idx, idx - 1] = upper.conj()
    return OperatorMatrix(f"X_theta({float(theta):.6g})", _frozen(x))


def position_matrix(spec: DeformationSpec, dim: int) -> OperatorMatrix:
    m = quadrature_matrix(spec, dim, 0.0)
    return OperatorMatrix("X", m.entries)


def momentum_matrix(spec: DeformationSpec, dim: int) -> OperatorMatrix:
    """P = i beta (A^dagger - A)."""
    beta = 0.5 * math.sqrt(1.0 + deformation_Q(spec))
    a = lowering_matrix(spec, dim).entries
    return OperatorMatrix("P", _frozen(1j * beta * (a.T - a)))


# --- residual checks -------------------------------------------------------


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object:
        return a @ b
    # object arrays hold mpmath numbers; the factors are banded, so walk the nonzeros
    n = a.shape[0]
    out = np.empty((n, n), dtype=object)
    out[:] = mpmath.mpf(0)
    rows_b = [[(j, b[k, j]) for j in range(n) if b[k, j] != 0] for k in range(n)]
    for i in range(n):
        for k in range(n):
            aik = a[i, k]
            if aik == 0:
                continue
            for j, bkj in rows_b[k]:
                out[i, j] += aik * bkj
    return out


def _ladder(spec: DeformationSpec, dim: int, exact: bool):
    """Lowering matrix plus the brackets [0..dim] and Q, float or mpmath."""
    if exact:
        br = mp_brackets(spec, dim)
        a = np.empty((dim, dim), dtype=object)
        a[:] = mpmath.mpf(0)
        for n in range(1, dim):
            a[n - 1, n] = mpmath.sqrt(br[n])
        q = deformation_Q(spec)
        Q = mpmath.mpf(q) if spec.kind != "mathq" else mpmath.mpf(spec.q) ** 2
        return a, br, Q
    br = bracket_sequence(spec, dim).values
    a = np.zeros((dim, dim))
    idx = np.arange(1, dim)
    a[idx - 1, idx] = np.sqrt(br[1:dim])
    return a, br, deformation_Q(spec)


def _max_abs(block: np.ndarray) -> float:
    if block.size == 0:
        return 0.0
    if block.dtype == object:
        return float(max(abs(v) for v in block.ravel()))
    return float(np.max(np.abs(block)))


def _diag(values, exact: bool) -> np.ndarray:
    n = len(values)
    if exact:
        d = np.empty((n, n), dtype=object)
        d[:] = mpmath.mpf(0)
        for i, v in enumerate(values):
            d[i, i] = v
        return d
    return np.diag(np.asarray(values, dtype=float))


def q_commutator_residual(spec: DeformationSpec, dim: int, *, dps: int | None = DEFAULT_DPS) -> float:
    """max |A A^dagger - Q A^dagger A - rhs| over the leading (dim-1) block.

    rhs is the identity for the harmonic and math-type algebras and q^{-N}
    for the physics-type and (p,q) algebras.  ``dps=None`` evaluates in
    float64; otherwise mpmath at that many decimal digits is used.
    """
    dim = _check_dim(dim, 3)
    validate(spec)
    exact = dps is not None
    with mpmath.workdps(dps or 15):
        a, _, Q = _ladder(spec, dim, exact)
        ad = a.T.copy()
        m = _product(a, ad) - Q * _product(ad, a)
        rhs = _diag([commutator_rhs(spec, n, exact=exact) for n in range(dim)], exact)
        return _max_abs((m - rhs)[: dim - 1, : dim - 1])


def xp_commutator_residual(spec: DeformationSpec, dim: int, *, dps: int | None = DEFAULT_DPS) -> float:
    """Deformed [X, P] identity checked on the leading (dim-2) block.

    Left side: X P - P X.  Right side:
    i ([n+1] - Q [n] - (1-Q)/(1+Q) (X^2 + P^2)), with the diagonal terms read
    off from the bracket sequence.
    """
    dim = _check_dim(dim, 4)
    validate(spec)
    exact = dps is not None
    with mpmath.workdps(dps or 15):
        a, br, Q = _ladder(spec, dim, exact)
        ad = a.T.copy()
        one = mpmath.mpf(1) if exact else 1.0
        i = mpmath.mpc(0, 1) if exact else 1j
        beta = (mpmath.sqrt(one + Q) if exact else math.sqrt(1.0 + Q)) / 2
        x = beta * (ad + a)
        p = i * beta * (ad - a)
        lhs = _product(x, p) - _product(p, x)
        shifted = _diag([br[n + 1] - Q * br[n] for n in range(dim)], exact)
        rhs = i * (shifted - (one - Q) / (one + Q) * (_product(x, x) + _product(p, p)))
        return _max_abs((lhs - rhs)[: dim - 2, : dim - 2])
