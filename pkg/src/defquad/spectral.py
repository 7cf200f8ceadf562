"""Jacobi-operator view of the J_n recurrence.

Rearranged, the recurrence reads x J_n = b_{n+1} J_{n+1} + b_n J_{n-1} with
b_n = sqrt(1+Q)/2 sqrt([n]) and zero diagonal, so the J_n are the orthonormal
polynomials of the spectral measure of that Jacobi matrix at e_0.  This
module produces the Gauss rule of the truncated matrix and a continuous
density estimate of the measure; the density is |Psi_0|^2.

For the physics-type and (p,q) families b_n grows geometrically and the
moment problem need not be determinate.  The Stieltjes estimate then picks
the solution induced by a self-similar closure of the continued fraction
(see `stieltjes_density`); metadata records the truncation used.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .deformation import DeformationSpec, Kind, bracket_sequence

__all__ = [
    "ConvergenceError",
    "JacobiMatrix",
    "DiscreteMeasure",
    "DensityEstimate",
    "Support",
    "METHODS",
    "DEFAULT_ETA",
    "BANDWIDTH_FLOOR",
    "jacobi_matrix",
    "eig_sym_tridiag",
    "gauss_measure",
    "stieltjes_density",
    "smoothed_gauss_density",
    "default_bandwidth",
    "ground_density",
    "support_estimate",
]

METHODS = ("stieltjes", "smoothed-gauss")
# The closed continued fraction is already smooth on the real axis, so the
# Stieltjes estimate needs eta only as a regulariser; a visible eta leaves
# Lorentzian tails ~ eta/(pi x^2) that J_n^2 amplifies for n >= 2.
DEFAULT_ETA = 1e-14
BANDWIDTH_FLOOR = 1e-3


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class JacobiMatrix:
    diagonal: np.ndarray
    offdiag: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class DiscreteMeasure:
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class Support:
    lower: float
    upper: float
    bounded: bool


@dataclass(frozen=True)
class DensityEstimate:
    grid: np.ndarray
    density: np.ndarray
    method: str
    levels: int
    eta: float
    raw_integral: float
    level: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def normalization(self) -> float:
        """Factor the raw estimate was divided by."""
        return self.raw_integral

    def peak(self) -> float:
        return float(np.max(self.density))


def jacobi_matrix(spec: DeformationSpec, N: int) -> JacobiMatrix:
    N = int(N)
    if N < 1:
        raise ValueError("N must be at least 1")
    b = bracket_sequence(spec, N - 1).offdiag if N > 1 else np.empty(0)
    return JacobiMatrix(np.zeros(N), np.array(b))


def eig_sym_tridiag(J: JacobiMatrix, max_sweeps: int | None = None):
    """Eigenvalues and eigenvector first components by implicit-shift QL.

    Only the first row of the eigenvector matrix is accumulated, which is all
    the Gauss rule needs.  A subdiagonal entry is treated as zero once it is
    below machine epsilon times its two diagonal neighbours; that local test
    keeps small eigenvalues of strongly graded matrices accurate.

    Returns
    -------
    (eigenvalues, first_components), both sorted by eigenvalue.
    """
    n = J.dim
    d = [float(v) for v in J.diagonal]
    e = [float(v) for v in J.offdiag] + [0.0]
    z = [0.0] * n
    z[0] = 1.0
    eps = np.finfo(float).eps
    budget = 50 * n if max_sweeps is None else max_sweeps
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > budget:
                raise ConvergenceError(f"QL iteration did not converge within {budget} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    order = np.argsort(d, kind="stable")
    return np.asarray(d)[order], np.asarray(z)[order]


@functools.lru_cache(maxsize=64)
def gauss_measure(spec: DeformationSpec, N: int) -> DiscreteMeasure:
    """Golub-Welsch rule: nodes are eigenvalues, weights squared first components.

    The zeroth moment is 1 because J_0 = 1 is normalised.  Results are cached
    and returned read-only.
    """
    nodes, first = eig_sym_tridiag(jacobi_matrix(spec, int(N)))
    weights = first * first
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return DiscreteMeasure(nodes, weights)


def _tail_closure(b_last: float, b_next: float, b_after: float, z: np.ndarray) -> np.ndarray:
    # Resolvent of the discarded tail assuming it continues with the ratio
    # r = b_after / b_next; r = 1 is the usual square-root terminator.
    r = b_after / b_next
    c2 = b_next * b_next / r
    c = math.sqrt(c2)
    t = (z - np.sqrt(z - 2.0 * c) * np.sqrt(z + 2.0 * c)) / (2.0 * c2)
    return z - b_last * b_last * t


def stieltjes_density(spec: DeformationSpec, N: int, x, eta: float = DEFAULT_ETA):
    """-Im S(x + i eta) / pi for the N-level Jacobi operator.

    S is evaluated bottom-up as the continued fraction
    1/(z - b_1^2/(z - ... - b_{N-1}^2/(z - b_N^2 T(z)))), where T closes the
    fraction with a tail whose off-diagonals keep growing at the last
    observed ratio.  With this closure a small eta already yields a smooth
    curve instead of a comb of Lorentzians at the Gauss nodes, and eta can
    be taken far below the node spacing.
    """
    N = int(N)
    if N < 1:
        raise ValueError("N must be at least 1")
    if not eta > 0:
        raise ValueError("eta must be positive")
    b = bracket_sequence(spec, N + 2).offdiag
    scalar = np.ndim(x) == 0
    z = np.atleast_1d(np.asarray(x, dtype=float)) + 1j * eta
    g = _tail_closure(b[N - 1], b[N], b[N + 1], z)
    for n in range(N - 2, -1, -1):
        g = z - (b[n] * b[n]) / g
    out = np.maximum(-(1.0 / g).imag / math.pi, 0.0)
    return float(out[0]) if scalar else out


def smoothed_gauss_density(measure: DiscreteMeasure, x, eta: float):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    keep = (measure.weights > 0) & (np.abs(measure.nodes) < np.max(np.abs(x)) + 40.0 * eta)
    nodes, weights = measure.nodes[keep], measure.weights[keep]
    u = (x[:, None] - nodes[None, :]) / eta
    return np.exp(-0.5 * u * u) @ weights / (math.sqrt(2.0 * math.pi) * eta)


def default_bandwidth(spec: DeformationSpec, measure: DiscreteMeasure) -> float:
    """Twice the median Gauss-node gap within three standard deviations of 0.

    The standard deviation of the measure is b_1.
    """
    sigma = float(bracket_sequence(spec, 1).offdiag[0])
    central = measure.nodes[np.abs(measure.nodes) <= 3.0 * sigma]
    if central.size < 2:
        return max(BANDWIDTH_FLOOR, 0.5 * sigma)
    return max(BANDWIDTH_FLOOR, 2.0 * float(np.median(np.diff(central))))


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid needs at least two points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def ground_density(
    spec: DeformationSpec,
    N: int,
    grid,
    method: str = "stieltjes",
    eta: float | None = None,
) -> DensityEstimate:
    """Ground-state probability density sampled on `grid`, unit trapezoid integral."""
    grid = _check_grid(grid)
    if method == "stieltjes":
        eta = DEFAULT_ETA if eta is None else float(eta)
        raw = stieltjes_density(spec, N, grid, eta)
    elif method == "smoothed-gauss":
        measure = gauss_measure(spec, N)
        eta = default_bandwidth(spec, measure) if eta is None else float(eta)
        raw = smoothed_gauss_density(measure, grid, eta)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    total = float(np.trapezoid(raw, grid))
    if not total > 0:
        raise ValueError("density estimate vanishes on the grid")
    return DensityEstimate(grid, raw / total, method, int(N), eta, total)


def support_estimate(spec: DeformationSpec, N: int) -> Support:
    """Interval spanned by the Gauss nodes, padded by three edge gaps.

    Only the math-type measure has compact support; for the other families
    the interval keeps growing with N and `bounded` is False.
    """
    if int(N) < 8:
        raise ValueError("support estimate needs N >= 8")
    nodes = gauss_measure(spec, N).nodes
    pad_lo = 3.0 * (nodes[1] - nodes[0])
    pad_hi = 3.0 * (nodes[-1] - nodes[-2])
    return Support(float(nodes[0] - pad_lo), float(nodes[-1] + pad_hi), Kind(spec.kind) is Kind.MATHQ)
