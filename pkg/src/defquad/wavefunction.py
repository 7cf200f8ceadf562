"""Quadrature wavefunctions Psi_n(x; theta) = e^{-i n theta} J_n(x) Psi_0(x).

Psi_0 is taken real and nonnegative, the square root of the ground-state
density from ``spectral``.  Densities are normalised against a
support-covering reference grid rather than the grid they are sampled on, so
sampling a single point gives the same value as sampling a full curve.  For
excited levels the reference grid reaches as far as J_n^2 w has mass.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .deformation import DeformationSpec, bracket_sequence, deformation_Q
from .operators import quadrature_matrix
from .polynomials import eval_table
from .spectral import (
    DEFAULT_ETA,
    DensityEstimate,
    default_bandwidth,
    gauss_measure,
    smoothed_gauss_density,
    stieltjes_density,
    support_estimate,
)

__all__ = [
    "DEFAULT_LEVELS",
    "DEFAULT_POINTS",
    "WavefunctionSample",
    "default_grid",
    "ground_wavefunction",
    "state_wavefunction",
    "probability_density",
    "normalization",
    "orthonormality_matrix",
    "eigenstate_coefficients",
    "eigen_residual",
    "recurrence_wavefunctions",
    "explicit_psi2",
    "explicit_psi3",
    "resolved_eta",
]

DEFAULT_LEVELS = 400
DEFAULT_POINTS = 801
_TAIL_MASS = 1e-8


@dataclass(frozen=True)
class WavefunctionSample:
    grid: np.ndarray
    values: np.ndarray
    level: int
    theta: float
    spec: DeformationSpec
    levels: int

    @property
    def probability(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def _reduce_angle(theta: float) -> float:
    return math.fmod(float(theta), 2.0 * math.pi)


def default_grid(spec: DeformationSpec, N: int = DEFAULT_LEVELS, points: int = DEFAULT_POINTS) -> np.ndarray:
    return _default_grid(spec, int(N), int(points)).copy()


@functools.lru_cache(maxsize=64)
def _default_grid(spec: DeformationSpec, N: int, points: int) -> np.ndarray:
    """Symmetric grid over the bulk of the ground-state measure.

    Bounded (math-type) measures use the padded Gauss-node span.  Otherwise
    the half-width is the smallest |x| outside which the Gauss rule carries
    less than 1e-8 of the mass, and never less than 4.
    """
    support = support_estimate(spec, N)
    if support.bounded:
        half = max(abs(support.lower), abs(support.upper))
    else:
        half = max(4.0, _tail_halfwidth(spec, N, 0))
    grid = np.linspace(-half, half, int(points))
    grid.setflags(write=False)
    return grid


def _tail_halfwidth(spec: DeformationSpec, N: int, level: int) -> float:
    """Smallest |x| beyond which the Gauss rule puts < 1e-8 of the J_level^2 w mass."""
    m = gauss_measure(spec, N)
    j = eval_table(spec, m.nodes, level)[:, level]
    live = (m.weights > 0) & np.isfinite(j)
    mass = np.where(live, m.weights * np.where(live, j, 0.0) ** 2, 0.0)
    order = np.argsort(-np.abs(m.nodes))
    k = int(np.searchsorted(np.cumsum(mass[order]), _TAIL_MASS))
    return float(np.abs(m.nodes[order][min(k, len(order) - 1)]))


@functools.lru_cache(maxsize=128)
def _reference_grid(spec: DeformationSpec, N: int, level: int) -> np.ndarray:
    """Integration grid for the level-`level` density.

    The uniform default grid, extended by geometrically spaced points (1%
    apart) out to where the J_level^2 w tail is negligible.  Heavy-tailed
    families need the extension once J_n^2 weights the far field.
    """
    core = _default_grid(spec, N, DEFAULT_POINTS)
    if support_estimate(spec, N).bounded:
        return core
    half = float(core[-1])
    reach = _tail_halfwidth(spec, N, level)
    if reach <= half:
        return core
    count = int(math.ceil(math.log(reach / half) / math.log(1.01)))
    outer = np.geomspace(half, reach, count + 1)[1:]
    grid = np.concatenate([-outer[::-1], core, outer])
    grid.setflags(write=False)
    return grid


class _Ground:
    """Unnormalised ground density plus its integral on the reference grid."""

    def __init__(self, spec, N, method, eta, level=0):
        self.spec, self.N, self.method = spec, int(N), method
        if method == "stieltjes":
            self.eta = DEFAULT_ETA if eta is None else float(eta)
            self._measure = None
        elif method == "smoothed-gauss":
            self._measure = gauss_measure(spec, N)
            self.eta = default_bandwidth(spec, self._measure) if eta is None else float(eta)
        else:
            raise ValueError(f"unknown method {method!r}")
        self.reference = _reference_grid(spec, self.N, int(level))
        self.total = float(np.trapezoid(self.raw(self.reference), self.reference))

    def raw(self, x):
        if self._measure is None:
            return stieltjes_density(self.spec, self.N, np.asarray(x, dtype=float), self.eta)
        return smoothed_gauss_density(self._measure, x, self.eta)

    def __call__(self, x):
        return self.raw(x) / self.total


def resolved_eta(spec: DeformationSpec, N: int, method: str = "stieltjes", eta: float | None = None) -> float:
    """Broadening actually used when `eta` is left to its default."""
    if eta is not None:
        return float(eta)
    if method == "stieltjes":
        return DEFAULT_ETA
    if method == "smoothed-gauss":
        return default_bandwidth(spec, gauss_measure(spec, N))
    raise ValueError(f"unknown method {method!r}")


def _as_grid(grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty one-dimensional sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return grid


def ground_wavefunction(
    spec: DeformationSpec,
    grid,
    N: int = DEFAULT_LEVELS,
    method: str = "stieltjes",
    eta: float | None = None,
) -> WavefunctionSample:
    grid = _as_grid(grid)
    w = _Ground(spec, N, method, eta)(grid)
    return WavefunctionSample(grid, np.sqrt(w).astype(complex), 0, 0.0, spec, int(N))


def _polynomial(spec: DeformationSpec, n: int, grid: np.ndarray) -> np.ndarray:
    j = eval_table(spec, grid, n)[:, n]
    if np.any(np.isnan(j)):
        raise OverflowError(f"J_{n} overflows on the requested grid for {spec.label}")
    return j


def state_wavefunction(
    spec: DeformationSpec,
    n: int,
    theta: float,
    grid,
    N: int = DEFAULT_LEVELS,
    method: str = "stieltjes",
    eta: float | None = None,
) -> WavefunctionSample:
    grid = _as_grid(grid)
    n = int(n)
    psi0 = np.sqrt(_Ground(spec, N, method, eta)(grid))
    phase = np.exp(-1j * n * _reduce_angle(theta))
    values = phase * _polynomial(spec, n, grid) * psi0
    return WavefunctionSample(grid, values, n, float(theta), spec, int(N))


def probability_density(
    spec: DeformationSpec,
    n: int,
    grid=None,
    N: int = DEFAULT_LEVELS,
    method: str = "stieltjes",
    eta: float | None = None,
) -> DensityEstimate:
    """|Psi_n|^2 = J_n^2 w, renormalised to unit integral on the reference grid.

    ``raw_integral`` holds the integral before that last renormalisation; it
    should sit within a couple of percent of 1.
    """
    n = int(n)
    ground = _Ground(spec, N, method, eta, level=n)
    ref = ground.reference
    factor = float(np.trapezoid(_polynomial(spec, n, ref) ** 2 * ground(ref), ref))
    # without a grid, sample on the reference grid itself, which covers the mass
    grid = ref if grid is None else _as_grid(grid)
    values = _polynomial(spec, n, grid) ** 2 * ground(grid)
    return DensityEstimate(
        grid,
        values / factor,
        method,
        int(N),
        ground.eta,
        factor,
        level=n,
        meta={"ground_integral": ground.total, "reference_halfwidth": float(ref[-1])},
    )


def _gram(spec: DeformationSpec, nmax: int, N: int) -> np.ndarray:
    m = gauss_measure(spec, N)
    j = eval_table(spec, m.nodes, nmax)
    # nodes where J overflowed carry weights that underflow to zero
    live = m.weights > 0
    j, w = j[live], m.weights[live]
    if np.any(np.isnan(j)):
        raise OverflowError("polynomial overflow at a Gauss node with nonzero weight")
    return (j * w[:, None]).T @ j


def normalization(spec: DeformationSpec, n: int, N: int) -> float:
    """sum_i w_i J_n(x_i)^2 over the N-point Gauss rule; exactly 1 for n < N."""
    if not 2 * int(n) < int(N):
        raise ValueError("need n < N/2")
    return float(_gram(spec, int(n), N)[n, n])


def orthonormality_matrix(spec: DeformationSpec, nmax: int, N: int) -> np.ndarray:
    if not 2 * int(nmax) < int(N):
        raise ValueError("need nmax < N/2")
    return _gram(spec, int(nmax), N)


def eigenstate_coefficients(
    spec: DeformationSpec,
    x: float,
    theta: float,
    N: int,
    levels: int = DEFAULT_LEVELS,
) -> np.ndarray:
    """First N Fock coefficients of the quadrature eigenstate |X_theta = x>.

    c_n = conj(Psi_0(x)) J_n(x) e^{i n theta}.
    """
    if int(N) < 4:
        raise ValueError("need N >= 4")
    psi0 = ground_wavefunction(spec, [x], levels).values[0].real
    j = eval_table(spec, [x], int(N) - 1)[0]
    if np.any(np.isnan(j)):
        raise OverflowError(f"J_n overflows at x={x:g} for {spec.label}")
    n = np.arange(int(N))
    return psi0 * j * np.exp(1j * n * _reduce_angle(theta))


def eigen_residual(spec: DeformationSpec, x: float, theta: float, N: int, levels: int = DEFAULT_LEVELS) -> float:
    """max |(X_theta - x) v| over the first N-1 components, v the normalised coefficients."""
    c = eigenstate_coefficients(spec, x, theta, N, levels)
    v = c / np.linalg.norm(c)
    r = quadrature_matrix(spec, N, theta).entries @ v - x * v
    return float(np.max(np.abs(r[: int(N) - 1])))


def recurrence_wavefunctions(spec: DeformationSpec, x, theta: float, psi0, nmax: int) -> np.ndarray:
    """Psi_0..Psi_nmax from the two-term wavefunction recurrence.

    Psi_1 = e^{-i theta}/sqrt([1]) 2x/sqrt(1+Q) Psi_0 and
    Psi_{n+1} = e^{-i theta}/sqrt([n+1]) (2x/sqrt(1+Q) Psi_n - sqrt([n]) Psi_{n-1} e^{-i theta}).
    Independent of the J_n evaluator; used to cross-check it.
    """
    x = np.asarray(x, dtype=float)
    root = np.sqrt(bracket_sequence(spec, max(int(nmax), 1)).values)
    c = 2.0 / math.sqrt(1.0 + deformation_Q(spec))
    ph = np.exp(-1j * _reduce_angle(theta))
    out = np.zeros((int(nmax) + 1,) + x.shape, dtype=complex)
    out[0] = psi0
    if nmax >= 1:
        out[1] = ph / root[1] * c * x * out[0]
    for n in range(1, int(nmax)):
        out[n + 1] = ph / root[n + 1] * (c * x * out[n] - root[n] * out[n - 1] * ph)
    return out


def explicit_psi2(spec: DeformationSpec, x, theta: float, psi0):
    br = bracket_sequence(spec, 2).values
    Q = deformation_Q(spec)
    x = np.asarray(x, dtype=float)
    c = 2.0 * x / math.sqrt(1.0 + Q)
    inner = 2.0 * x / math.sqrt(br[1] * (1.0 + Q))
    return np.exp(-2j * _reduce_angle(theta)) / math.sqrt(br[2]) * (c * inner - math.sqrt(br[1])) * psi0


def explicit_psi3(spec: DeformationSpec, x, theta: float, psi0):
    br = bracket_sequence(spec, 3).values
    Q = deformation_Q(spec)
    x = np.asarray(x, dtype=float)
    c = 2.0 * x / math.sqrt(1.0 + Q)
    inner = 2.0 * x / math.sqrt(br[1] * (1.0 + Q))
    bracketed = c / math.sqrt(br[2]) * (c * inner - math.sqrt(br[1])) - math.sqrt(br[2]) * inner
    return np.exp(-3j * _reduce_angle(theta)) / math.sqrt(br[3]) * bracketed * psi0
