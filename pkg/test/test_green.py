"""Green function Hessian test suite.

Tests:
    1. Periodicity and oddness of grad G
    2. The five trivial critical points
    3. Determinants against both closed forms
    4. The half-period identity
    5. pair_hessian against central differences
    6. Argument validation
"""

import numpy as np
import pytest

from torus_zeros.exceptions.numerical import LatticePointException
from torus_zeros.exceptions.validation import InvalidRangeException
from torus_zeros.green.gradient import addition_witness, green_grad, q_point, trivial_critical_points
from torus_zeros.green.hessian import all_hessians, half_period_identity, hessian_half_period, hessian_q, pair_hessian
from torus_zeros.models.enums import CriticalKind

TAUS = [1j, 0.5 + 0.866025403784j, 0.21 + 0.93j, -0.37 + 1.45j]


def _det_gap(matrix, a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-6 * matrix.scale**4)


def test_1_gradient_periodicity():
    """Test grad G on the torus.

    Validates:
        - invariance under z -> z + 1 and z -> z + tau
        - grad G(-z) = -grad G(z)
        - the lattice guard
    """
    tau = 0.21 + 0.93j
    for z in (0.17 + 0.31j, -0.42 + 0.6j, 0.3 - 0.2j):
        base = np.array(green_grad(z, tau))
        assert np.allclose(green_grad(z + 1, tau), base, atol=1e-10)
        assert np.allclose(green_grad(z + tau, tau), base, atol=1e-10)
        assert np.allclose(green_grad(-z, tau), -base, atol=1e-10)

    with pytest.raises(LatticePointException):
        green_grad(1 + tau, tau)


def test_2_trivial_critical_points(run_config):
    """Test the half-period pairs and (q_pm, -q_pm).

    Validates:
        - five pairs in a fixed order of kinds
        - both critical point equations hold within tol.sz15
        - wp(q_pm)^2 = g2/12 through the duplication witness
        - q_plus and q_minus are flagged degenerate only at rho
    """
    kinds = [CriticalKind.HALF_PERIOD] * 3 + [CriticalKind.Q_PLUS, CriticalKind.Q_MINUS]
    for tau in TAUS:
        pairs = trivial_critical_points(tau)
        assert [p.kind for p in pairs] == kinds
        assert [p.indices for p in pairs[:3]] == [(1, 2), (1, 3), (2, 3)]
        for pair in pairs:
            assert pair.residual < run_config.tolerances.sz15, pair.to_dict()
        assert pairs[3].degenerate == (tau == TAUS[1])

    q = q_point(1, 1j)
    assert abs(addition_witness(q, 1j)) < 1e-8


def test_3_determinant_closed_forms(run_config):
    """Test det of the five Hessians.

    Validates:
        - det agrees with the kernel closed form
        - the closed form agrees with the phi form
        - every matrix is symmetric
    """
    tolerance = run_config.tolerances.hessian
    for tau in TAUS:
        matrices = all_hessians(tau)
        assert [m.label for m in matrices] == [
            "half_period(1,2)",
            "half_period(1,3)",
            "half_period(2,3)",
            "q_plus",
            "q_minus",
        ]
        for matrix in matrices:
            assert _det_gap(matrix, matrix.det, matrix.closed_form) < tolerance, matrix.to_dict()
            assert _det_gap(matrix, matrix.closed_form, matrix.phi_form) < tolerance, matrix.to_dict()
            assert matrix.asymmetry < 1e-12


def test_4_half_period_identity(run_config):
    """Test 2 e_i e_j + e_k^2 - 3 e_k eta_1 = -f_{k,inf}.

    Validates:
        - the identity for k = 1, 2, 3 at several tau
    """
    for tau in TAUS:
        for k in (1, 2, 3):
            assert half_period_identity(k, tau) < run_config.tolerances.identity


def test_5_pair_hessian_finite_differences(run_config):
    """Test the blockwise Hessian of G_2 at points that are not critical.

    Validates:
        - central differences of the G_2 gradient match pair_hessian
        - the Hessian is symmetric
    """
    h = run_config.tolerances.fd_hessian_step
    tau = 0.21 + 0.93j

    def gradient(point):
        a, b = complex(point[0], point[1]), complex(point[2], point[3])
        diff = np.array(green_grad(a - b, tau))
        return np.concatenate([diff - 2 * np.array(green_grad(a, tau)), -diff - 2 * np.array(green_grad(b, tau))])

    for z1, z2 in ((0.13 + 0.27j, -0.31 + 0.55j), (0.4 + 0.1j, 0.05 + 0.7j)):
        base = np.array([z1.real, z1.imag, z2.real, z2.imag])
        numeric = np.column_stack(
            [(gradient(base + h * e) - gradient(base - h * e)) / (2 * h) for e in np.eye(4)]
        )
        analytic = pair_hessian(z1, z2, tau)
        gap = np.max(np.abs(numeric - analytic)) / max(1.0, np.max(np.abs(analytic)))
        assert gap < run_config.tolerances.fd_hessian
        assert np.allclose(analytic, analytic.T, atol=1e-12)


def test_6_argument_validation():
    """Test rejection of bad half-period pairs and signs.

    Validates:
        - i == j raises InvalidRangeException
        - an index outside 1..3 raises
        - a sign other than +-1 raises
    """
    with pytest.raises(InvalidRangeException):
        hessian_half_period(2, 2, 1j)
    with pytest.raises(InvalidRangeException):
        hessian_half_period(0, 1, 1j)
    with pytest.raises(InvalidRangeException):
        hessian_q(0, 1j)
