"""Invariant suites behind ``defquad verify``.

Each suite returns a list of `Check` records holding the measured value and
the tolerance it was held to; `run_suites` bundles them into a JSON-ready
report.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable

import numpy as np

from .deformation import DeformationSpec, Kind
from .operators import q_commutator_residual, quadrature_matrix, xp_commutator_residual
from .polynomials import (
    chebyshevU_oracle,
    closed_form_j2,
    closed_form_j3,
    eval_table,
    normalized_hermite,
)
from .spectral import gauss_measure
from .wavefunction import (
    eigen_residual,
    ground_wavefunction,
    orthonormality_matrix,
    probability_density,
    recurrence_wavefunctions,
    explicit_psi2,
    explicit_psi3,
    state_wavefunction,
)

SUITES = ("algebra", "polynomials", "measure", "wavefunctions")

DEFAULT_SPECS = (
    DeformationSpec.harmonic(),
    DeformationSpec.math_q(0.9),
    DeformationSpec.math_q(0.5),
    DeformationSpec.physics_q(1.1),
    DeformationSpec.physics_q(1.9),
    DeformationSpec.pq(1.3, 0.5),
    DeformationSpec.pq(1.9, 0.5),
)


@dataclass(frozen=True)
class Check:
    name: str
    spec: str
    value: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _check(name: str, spec: DeformationSpec, value: float, tolerance: float) -> Check:
    value = float(value)
    return Check(name, spec.label, value, tolerance, bool(value <= tolerance))


# --- algebra ---------------------------------------------------------------


def algebra_checks(spec: DeformationSpec, dim: int = 32) -> list[Check]:
    out = [
        _check("q_commutator_residual", spec, q_commutator_residual(spec, dim), 1e-12),
        _check("xp_commutator_residual", spec, xp_commutator_residual(spec, dim), 1e-12),
    ]
    hermit = 0.0
    spectra = []
    for theta in (0.0, math.pi / 6, math.pi / 2, 1.0):
        x = quadrature_matrix(spec, 16, theta).entries
        hermit = max(hermit, float(np.max(np.abs(x - x.conj().T))))
        spectra.append(np.linalg.eigvalsh(x))
    out.append(_check("quadrature_hermiticity", spec, hermit, 0.0))
    ref = spectra[0]
    drift = max(float(np.max(np.abs(s - ref) / np.maximum(1.0, np.abs(ref)))) for s in spectra)
    out.append(_check("quadrature_theta_covariance", spec, drift, 1e-10))
    return out


# --- polynomials -----------------------------------------------------------


def _relative_gap(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1.0)))


def hermite_limit_deviation(spec: DeformationSpec, nmax: int = 8) -> float:
    x = np.linspace(-3.0, 3.0, 61)
    table = eval_table(spec, x, nmax)
    return max(float(np.max(np.abs(table[:, n] - normalized_hermite(n, x)))) for n in range(nmax + 1))


def chebyshev_limit_deviation(spec: DeformationSpec, nmax: int = 10) -> float:
    x = np.linspace(-1.0, 1.0, 41)
    table = eval_table(spec, x, nmax)
    return max(float(np.max(np.abs(table[:, n] - chebyshevU_oracle(n, x)))) for n in range(nmax + 1))


def closed_form_gap(spec: DeformationSpec) -> float:
    x = np.linspace(-3.0, 3.0, 61)
    table = eval_table(spec, x, 3)
    return max(_relative_gap(table[:, 2], closed_form_j2(spec, x)), _relative_gap(table[:, 3], closed_form_j3(spec, x)))


def polynomial_checks(spec: DeformationSpec) -> list[Check]:
    out = [_check("closed_form_j2_j3", spec, closed_form_gap(spec), 1e-12)]
    half = np.linspace(0.1, 3.0, 30)
    # mirrored exactly, so the recurrence sees bitwise negated abscissae
    x = np.concatenate([-half[::-1], [0.0], half])
    table = eval_table(spec, x, 12)
    signs = (-1.0) ** np.arange(13)
    parity = float(np.max(np.abs(table[::-1] - table * signs)))
    out.append(_check("parity", spec, parity, 0.0))
    kind = Kind(spec.kind)
    if kind is Kind.HARMONIC or (kind is Kind.MATHQ and spec.q >= 0.999):
        tol = 1e-12 if kind is Kind.HARMONIC else 20.0 * (1.0 - spec.q)
        out.append(_check("hermite_limit", spec, hermite_limit_deviation(spec), tol))
    if kind is Kind.MATHQ and spec.q <= 1e-6:
        out.append(_check("chebyshev_limit", spec, chebyshev_limit_deviation(spec), 1e-8))
    return out


# --- measure ---------------------------------------------------------------


def gauss_exactness(spec: DeformationSpec, N: int = 32, nmax: int = 15) -> float:
    return float(np.max(np.abs(orthonormality_matrix(spec, nmax, N) - np.eye(nmax + 1))))


def sign_change_defect(spec: DeformationSpec, N: int = 16) -> float:
    """Count of violations of "the Gauss nodes are the N simple roots of J_N".

    J_N must keep its sign inside every gap between neighbouring nodes and
    flip across every node; J_{N-1} must alternate in sign over the nodes,
    i.e. its roots interlace them.
    """
    nodes = gauss_measure(spec, N).nodes
    gaps = np.diff(nodes)
    probe = np.sort(np.concatenate([nodes[:-1] + 0.25 * gaps, nodes[:-1] + 0.75 * gaps]))
    vals = np.sign(eval_table(spec, probe, N)[:, N])
    inside = vals[0::2] != vals[1::2]
    across = vals[1:-1:2] == vals[2::2]
    prev = np.sign(eval_table(spec, nodes, N - 1)[:, N - 1])
    interlace = prev[:-1] == prev[1:]
    return float(np.count_nonzero(inside) + np.count_nonzero(across) + np.count_nonzero(interlace))


def measure_checks(spec: DeformationSpec) -> list[Check]:
    m = gauss_measure(spec, 32)
    scale = np.maximum(1.0, np.abs(m.nodes))
    return [
        _check("gauss_exactness_N32", spec, gauss_exactness(spec, 32, 15), 1e-10),
        _check("orthonormality_N64", spec, gauss_exactness(spec, 64, 15), 1e-10),
        _check("weights_sum", spec, abs(float(np.sum(m.weights)) - 1.0), 1e-13),
        _check("node_symmetry", spec, float(np.max(np.abs(m.nodes + m.nodes[::-1]) / scale)), 1e-12),
        _check("interlacing", spec, sign_change_defect(spec), 0.0),
    ]


# --- wavefunctions ---------------------------------------------------------


def eigenstate_residual(spec: DeformationSpec, N: int = 32, theta: float = 0.7) -> float:
    nodes = gauss_measure(spec, N).nodes[1:-1]
    return max(eigen_residual(spec, float(x), theta, N) for x in nodes)


def recurrence_gap(spec: DeformationSpec, theta: float = 0.7, nmax: int = 10) -> float:
    x = np.linspace(-3.0, 3.0, 61)
    psi0 = ground_wavefunction(spec, x).values.real
    rec = recurrence_wavefunctions(spec, x, theta, psi0, nmax)
    table = eval_table(spec, x, nmax)
    gap = 0.0
    for n in range(nmax + 1):
        prod = np.exp(-1j * n * theta) * table[:, n] * psi0
        gap = max(gap, _relative_gap(rec[n], prod))
    gap = max(gap, _relative_gap(explicit_psi2(spec, x, theta, psi0), rec[2]))
    gap = max(gap, _relative_gap(explicit_psi3(spec, x, theta, psi0), rec[3]))
    return gap


def modulus_drift(spec: DeformationSpec) -> float:
    x = np.linspace(-3.0, 3.0, 61)
    drift = 0.0
    for n in range(7):
        ref = np.abs(state_wavefunction(spec, n, 0.0, x).values)
        scale = np.maximum(1.0, ref)
        for theta in (0.7, math.pi / 2, 3.0):
            moved = np.abs(state_wavefunction(spec, n, theta, x).values)
            drift = max(drift, float(np.max(np.abs(moved - ref) / scale)))
    return drift


def wavefunction_checks(spec: DeformationSpec) -> list[Check]:
    out = [
        _check("eigenstate_residual_N32", spec, eigenstate_residual(spec), 1e-8),
        _check("recurrence_consistency", spec, recurrence_gap(spec), 1e-12),
        _check("theta_modulus_invariance", spec, modulus_drift(spec), 1e-14),
    ]
    for n in (0, 1):
        d = probability_density(spec, n)
        out.append(_check(f"renormalization_n{n}", spec, abs(d.raw_integral - 1.0), 0.02))
    if Kind(spec.kind) is Kind.HARMONIC:
        x = np.linspace(-4.0, 4.0, 801)
        for n in (0, 1):
            exact = normalized_hermite(n, x) ** 2 * np.exp(-x * x) / math.sqrt(math.pi)
            got = probability_density(spec, n, x).density
            out.append(_check(f"harmonic_density_n{n}", spec, float(np.max(np.abs(got - exact))), 5e-3))
    return out


SUITE_RUNNERS: dict[str, Callable[[DeformationSpec], list[Check]]] = {
    "algebra": algebra_checks,
    "polynomials": polynomial_checks,
    "measure": measure_checks,
    "wavefunctions": wavefunction_checks,
}


def run_suites(suites: Iterable[str], specs: Iterable[DeformationSpec] = DEFAULT_SPECS) -> dict:
    suites = list(suites)
    if "all" in suites:
        suites = list(SUITES)
    specs = list(specs)
    report = {"suites": suites, "specs": [s.as_dict() for s in specs], "checks": []}
    for suite in suites:
        runner = SUITE_RUNNERS[suite]
        for spec in specs:
            for c in runner(spec):
                report["checks"].append({"suite": suite, **c.as_dict()})
    report["passed"] = all(c["passed"] for c in report["checks"])
    return report
