"""Deformation families and their bracket numbers [n].

Four families are supported: the undeformed (harmonic) oscillator, the
math-type q-oscillator, the physics-type q-oscillator and the two-parameter
(p, q) oscillator.  Every other module reads the deformed number spectrum
[n] = |f(n)|^2 n and the commutator parameter Q from here.

Brackets are evaluated as finite geometric sums rather than as the usual
difference quotients, which lose all accuracy as q -> 1 or pq -> 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

__all__ = [
    "DomainError",
    "Kind",
    "DeformationSpec",
    "BracketSequence",
    "validate",
    "deformation_Q",
    "bracket",
    "bracket_factorial",
    "log_bracket_factorial",
    "bracket_sequence",
    "mp_brackets",
    "commutator_rhs",
]


class DomainError(ValueError):
    """Deformation parameters outside the family's admissible range."""


class Kind(str, enum.Enum):
    HARMONIC = "harmonic"
    MATHQ = "mathq"
    PHYSICSQ = "physicsq"
    PQ = "pq"


@dataclass(frozen=True)
class DeformationSpec:
    kind: Kind
    q: Optional[float] = None
    p: Optional[float] = None

    @classmethod
    def harmonic(cls) -> "DeformationSpec":
        return cls(Kind.HARMONIC)

    @classmethod
    def math_q(cls, q: float) -> "DeformationSpec":
        return cls(Kind.MATHQ, q=float(q))

    @classmethod
    def physics_q(cls, q: float) -> "DeformationSpec":
        return cls(Kind.PHYSICSQ, q=float(q))

    @classmethod
    def pq(cls, p: float, q: float) -> "DeformationSpec":
        return cls(Kind.PQ, q=float(q), p=float(p))

    @property
    def label(self) -> str:
        if self.kind is Kind.HARMONIC:
            return "harmonic"
        if self.kind is Kind.PQ:
            return f"pq(p={self.p:g},q={self.q:g})"
        return f"{self.kind.value}(q={self.q:g})"

    def as_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.q is not None:
            d["q"] = self.q
        if self.p is not None:
            d["p"] = self.p
        return d


def _positive_finite(name: str, value) -> float:
    if value is None:
        raise DomainError(f"parameter {name} is required")
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"parameter {name} must be a positive finite number, got {value!r}")
    return value


def validate(spec: DeformationSpec) -> DeformationSpec:
    """Return `spec` unchanged if its parameters are admissible.

    Raises
    ------
    DomainError
        With a message naming the violated constraint.
    """
    kind = Kind(spec.kind)
    if kind is Kind.HARMONIC:
        if spec.q is not None or spec.p is not None:
            raise DomainError("harmonic oscillator takes no deformation parameters")
        return spec
    q = _positive_finite("q", spec.q)
    if kind is Kind.MATHQ:
        if spec.p is not None:
            raise DomainError("math-type deformation takes no parameter p")
        if not q < 1.0:
            raise DomainError(f"math-type deformation requires 0<q<1, got q={q:g}")
    elif kind is Kind.PHYSICSQ:
        if spec.p is not None:
            raise DomainError("physics-type deformation takes no parameter p")
        if not q > 1.0:
            raise DomainError(f"physics-type deformation requires q>1, got q={q:g}")
    else:
        p = _positive_finite("p", spec.p)
        if p * q == 1.0:
            raise DomainError(
                f"(p,q)-deformation requires p*q != 1 (1-pq=0 is singular), got p={p:g}, q={q:g}"
            )
    return spec


def deformation_Q(spec: DeformationSpec) -> float:
    kind = Kind(spec.kind)
    if kind is Kind.HARMONIC:
        return 1.0
    if kind is Kind.MATHQ:
        return spec.q * spec.q
    if kind is Kind.PHYSICSQ:
        return spec.q
    return spec.p


def bracket(spec: DeformationSpec, n: int) -> float:
    """Deformed number [n] via the stable geometric sum.

    math-type  [n] = sum_{k<n} q^(2k)
    physics    [n] = sum_{k<n} q^(n-1-2k)
    (p,q)      [n] = sum_{k<n} p^k q^(k-n+1)
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    kind = Kind(spec.kind)
    if kind is Kind.HARMONIC:
        return float(n)
    q = spec.q
    # float ** raises OverflowError on its own
    if kind is Kind.MATHQ:
        terms = (q ** (2 * k) for k in range(n))
    elif kind is Kind.PHYSICSQ:
        terms = (q ** (n - 1 - 2 * k) for k in range(n))
    else:
        p = spec.p
        terms = (p**k * q ** (k - n + 1) for k in range(n))
    value = math.fsum(terms)
    if not math.isfinite(value):
        raise OverflowError(f"bracket [{n}] overflows for {spec.label}")
    return value


def bracket_factorial(spec: DeformationSpec, n: int) -> float:
    """[n]! = [n][n-1]...[1], with [0]! = 1.

    Raises OverflowError when the product leaves the float range; use
    `log_bracket_factorial` instead.
    """
    out = 1.0
    for k in range(1, int(n) + 1):
        out *= bracket(spec, k)
    if not math.isfinite(out):
        raise OverflowError(
            f"[{n}]! overflows for {spec.label}; use log_bracket_factorial"
        )
    return out


def log_bracket_factorial(spec: DeformationSpec, n: int) -> float:
    values = bracket_sequence(spec, int(n)).values[1:] if n >= 1 else np.empty(0)
    return float(np.sum(np.log(values)))


@dataclass(frozen=True)
class BracketSequence:
    """[0..N] together with the recurrence off-diagonals b_1..b_N."""

    spec: DeformationSpec
    values: np.ndarray
    offdiag: np.ndarray

    @property
    def N(self) -> int:
        return len(self.values) - 1

    @property
    def Q(self) -> float:
        return deformation_Q(self.spec)


def bracket_sequence(spec: DeformationSpec, N: int) -> BracketSequence:
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    validate(spec)
    kind = Kind(spec.kind)
    k = np.arange(N, dtype=float)
    n = k + 1.0
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        if kind is Kind.HARMONIC:
            tail = n
        elif kind is Kind.MATHQ:
            tail = np.cumsum(spec.q ** (2.0 * k))
        elif kind is Kind.PHYSICSQ:
            q = spec.q
            tail = q ** (n - 1.0) * np.cumsum(q ** (-2.0 * k))
        else:
            p, q = spec.p, spec.q
            tail = q ** (1.0 - n) * np.cumsum((p * q) ** k)
    if not np.all(np.isfinite(tail)):
        first = int(np.argmax(~np.isfinite(tail))) + 1
        raise OverflowError(f"bracket [{first}] overflows for {spec.label}")
    if np.any(tail <= 0.0):
        first = int(np.argmax(tail <= 0.0)) + 1
        raise DomainError(f"bracket [{first}] is not positive for {spec.label}")
    values = np.concatenate(([0.0], tail))
    Q = deformation_Q(spec)
    offdiag = 0.5 * math.sqrt(1.0 + Q) * np.sqrt(tail)
    values.setflags(write=False)
    offdiag.setflags(write=False)
    return BracketSequence(spec, values, offdiag)


def _mp_params(spec):
    q = mpmath.mpf(spec.q) if spec.q is not None else None
    p = mpmath.mpf(spec.p) if spec.p is not None else None
    return q, p


def mp_brackets(spec: DeformationSpec, N: int) -> list:
    """[0..N] as mpmath numbers at the current working precision."""
    validate(spec)
    kind = Kind(spec.kind)
    q, p = _mp_params(spec)
    out = [mpmath.mpf(0)]
    for n in range(1, N + 1):
        if kind is Kind.HARMONIC:
            out.append(mpmath.mpf(n))
        elif kind is Kind.MATHQ:
            out.append(mpmath.fsum(q ** (2 * k) for k in range(n)))
        elif kind is Kind.PHYSICSQ:
            out.append(mpmath.fsum(q ** (n - 1 - 2 * k) for k in range(n)))
        else:
            out.append(mpmath.fsum(p**k * q ** (k - n + 1) for k in range(n)))
    return out


def commutator_rhs(spec: DeformationSpec, n, *, exact: bool = False):
    """Diagonal of the family's Q-commutator right-hand side at level n.

    Identity for the harmonic and math-type algebras, q^(-n) for the
    physics-type and (p,q) algebras.
    """
    kind = Kind(spec.kind)
    if exact:
        if kind in (Kind.HARMONIC, Kind.MATHQ):
            return mpmath.mpf(1)
        return mpmath.mpf(spec.q) ** (-int(n))
    n = np.asarray(n, dtype=float)
    if kind in (Kind.HARMONIC, Kind.MATHQ):
        return np.ones_like(n)
    return spec.q ** (-n)
