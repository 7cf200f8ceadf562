import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defquad.checks import modulus_drift, recurrence_gap
from defquad.deformation import DeformationSpec
from defquad.polynomials import normalized_hermite
from defquad.spectral import gauss_measure
from defquad.wavefunction import (
    default_grid,
    eigen_residual,
    eigenstate_coefficients,
    ground_wavefunction,
    normalization,
    orthonormality_matrix,
    probability_density,
    recurrence_wavefunctions,
    resolved_eta,
    state_wavefunction,
)

PI_QUARTER = math.pi ** -0.25


def test_harmonic_ground_values():
    w = ground_wavefunction(DeformationSpec.harmonic(), [0.0, 1.0])
    assert w.values[0].real == pytest.approx(PI_QUARTER, abs=2e-3)
    assert w.values[1].real == pytest.approx(math.exp(-0.5) * PI_QUARTER, abs=2e-3)
    assert np.all(w.values.imag == 0)


def test_ground_is_even(spec):
    w = ground_wavefunction(spec, [-1.3, 1.3]).values
    assert w[0] == pytest.approx(w[1], rel=1e-10)


def test_first_excited_harmonic():
    w = state_wavefunction(DeformationSpec.harmonic(), 1, 0.0, [1.0])
    assert w.values[0].real == pytest.approx(math.sqrt(2) * math.exp(-0.5) * PI_QUARTER, abs=3e-3)


def test_right_angle_phase(spec):
    x = [-0.7, 0.4, 1.1]
    a = state_wavefunction(spec, 1, 0.0, x).values
    b = state_wavefunction(spec, 1, math.pi / 2, x).values
    np.testing.assert_allclose(b, -1j * a, atol=1e-15)


def test_level_zero_ignores_theta():
    spec = DeformationSpec.math_q(0.9)
    x = np.linspace(-2, 2, 11)
    g = ground_wavefunction(spec, x).values
    for theta in (0.0, 1.3, 4.0):
        np.testing.assert_array_equal(state_wavefunction(spec, 0, theta, x).values, g)


def test_harmonic_probability_values():
    spec = DeformationSpec.harmonic()
    assert probability_density(spec, 0, [0.0]).density[0] == pytest.approx(1 / math.sqrt(math.pi), abs=2e-3)
    assert probability_density(spec, 1, [0.0]).density[0] == 0.0


@pytest.mark.parametrize("n", [0, 1])
def test_harmonic_density_limit(n):
    x = np.linspace(-4, 4, 801)
    got = probability_density(DeformationSpec.harmonic(), n, x).density
    exact = normalized_hermite(n, x) ** 2 * np.exp(-x * x) / math.sqrt(math.pi)
    assert np.max(np.abs(got - exact)) <= 5e-3


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_renormalisation_factor_in_band(spec, n):
    d = probability_density(spec, n)
    assert 0.98 <= d.normalization <= 1.02
    assert np.trapezoid(d.density, d.grid) == pytest.approx(1.0, abs=1e-3)


def test_default_grid_covers_bulk(spec):
    g = default_grid(spec)
    assert g.size == 801 and g[0] == -g[-1] and g[-1] >= 1.0
    g[0] = 99.0  # a copy; the cached grid stays intact
    assert default_grid(spec)[0] != 99.0


def test_pointwise_value_independent_of_grid(spec):
    a = probability_density(spec, 1, [0.75]).density[0]
    b = probability_density(spec, 1, np.linspace(-2, 2, 17)).density
    assert a == pytest.approx(b[np.argmin(np.abs(np.linspace(-2, 2, 17) - 0.75))], rel=1e-12)


def test_normalization_examples():
    assert normalization(DeformationSpec.harmonic(), 3, 32) == pytest.approx(1, abs=1e-12)
    assert normalization(DeformationSpec.physics_q(1.5), 5, 64) == pytest.approx(1, abs=1e-10)
    assert normalization(DeformationSpec.pq(1.5, 0.5), 0, 8) == pytest.approx(1, abs=1e-14)


def test_normalization_precondition():
    with pytest.raises(ValueError):
        normalization(DeformationSpec.harmonic(), 8, 16)


def test_orthonormality_examples():
    g = orthonormality_matrix(DeformationSpec.harmonic(), 10, 32)
    assert np.max(np.abs(g - np.eye(11))) <= 1e-11
    g = orthonormality_matrix(DeformationSpec.math_q(0.8), 15, 64)
    assert np.max(np.abs(g - np.eye(16))) <= 1e-10
    np.testing.assert_allclose(orthonormality_matrix(DeformationSpec.pq(1.3, 0.5), 0, 4), [[1.0]])


def test_gram_six_specs_N64(spec):
    assert np.max(np.abs(orthonormality_matrix(spec, 15, 64) - np.eye(16))) <= 1e-10


def test_coefficients_parity():
    c = eigenstate_coefficients(DeformationSpec.harmonic(), 0.0, 0.0, 10)
    assert np.all(c[1::2] == 0)
    assert np.all(c[0::2] != 0)


def test_two_level_exact_eigenvector():
    spec = DeformationSpec.math_q(0.9)
    # N=4 is the smallest admitted truncation; the 2x2 block is checked by hand
    x = gauss_measure(spec, 2).nodes[1]
    c = eigenstate_coefficients(spec, x, 0.0, 4)[:2]
    v = c / np.linalg.norm(c)
    X = np.array([[0, math.sqrt(1.81) / 2], [math.sqrt(1.81) / 2, 0]])
    np.testing.assert_allclose(X @ v, x * v, atol=1e-15)


def test_coefficients_periodic_in_theta(spec):
    a = eigenstate_coefficients(spec, 0.4, 0.9, 12)
    b = eigenstate_coefficients(spec, 0.4, 0.9 + 2 * math.pi, 12)
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-300)


def test_eigen_residual_at_interior_nodes(spec):
    nodes = gauss_measure(spec, 32).nodes[1:-1]
    assert max(eigen_residual(spec, float(x), 0.7, 32) for x in nodes) <= 1e-8


def test_recurrence_consistency(spec):
    assert recurrence_gap(spec) <= 1e-12


def test_theta_modulus_invariance(spec):
    assert modulus_drift(spec) <= 1e-14


def test_recurrence_wavefunctions_seed():
    spec = DeformationSpec.pq(1.3, 0.5)
    x = np.array([0.5])
    rec = recurrence_wavefunctions(spec, x, 0.3, np.array([0.7]), 1)
    Q = 1.3
    assert rec[1][0] == pytest.approx(np.exp(-0.3j) * 2 * 0.5 / math.sqrt(1 + Q) * 0.7, rel=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 6), st.floats(-10, 10), st.floats(-2.5, 2.5))
def test_modulus_independent_of_theta_random(n, theta, x):
    spec = DeformationSpec.physics_q(1.5)
    a = abs(state_wavefunction(spec, n, 0.0, [x]).values[0])
    b = abs(state_wavefunction(spec, n, theta, [x]).values[0])
    assert abs(a - b) <= 1e-14 * max(1.0, a)


def test_resolved_eta():
    spec = DeformationSpec.math_q(0.8)
    assert resolved_eta(spec, 400) == 1e-14
    assert resolved_eta(spec, 400, eta=0.05) == 0.05
    assert resolved_eta(spec, 400, "smoothed-gauss") > 1e-3


def test_overflowing_level_raises():
    with pytest.raises(OverflowError):
        state_wavefunction(DeformationSpec.harmonic(), 300, 0.0, [1e5], N=50)
