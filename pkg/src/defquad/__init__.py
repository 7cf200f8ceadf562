"""Deformed-oscillator quadrature wavefunctions.

The package builds the bracket spectrum [n] of a deformation family, the
truncated ladder and quadrature operators, the J_n polynomials, the
spectral measure they are orthonormal against, and the wavefunctions
Psi_n(x; theta) = e^{-i n theta} J_n(x) Psi_0(x).
"""
from .deformation import (
    BracketSequence,
    DeformationSpec,
    DomainError,
    Kind,
    bracket,
    bracket_factorial,
    bracket_sequence,
    deformation_Q,
    validate,
)
from .operators import (
    lowering_matrix,
    momentum_matrix,
    number_matrix,
    position_matrix,
    q_commutator_residual,
    quadrature_matrix,
    raising_matrix,
    xp_commutator_residual,
)
from .polynomials import eval_all, eval_grid, eval_table
from .spectral import (
    ConvergenceError,
    DensityEstimate,
    eig_sym_tridiag,
    gauss_measure,
    ground_density,
    jacobi_matrix,
    support_estimate,
)
from .wavefunction import (
    eigen_residual,
    eigenstate_coefficients,
    ground_wavefunction,
    normalization,
    orthonormality_matrix,
    probability_density,
    state_wavefunction,
)

__version__ = "0.1.0"
