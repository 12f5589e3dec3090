"""Painleve lab test suite.

Tests:
    1. The modular lambda t(tau)
    2. Riccati equations at level 0 along a path
    3. Riccati equations at level 1, including the cubic for k = 0
    4. Full PVI residuals at both levels
    5. Hamiltonian gradient against finite differences
    6. Okamoto map against the closed forms
    7. Hamilton's equations along the level-1 solution
    8. Guards on singular and mislabelled states
    9. lambda has a simple pole where f_{k,C} vanishes
    10. Paths skip the poles of lambda
    11. Reports carry the scale of their worst point
"""

import numpy as np
import pytest

from torus_zeros.exceptions.numerical import SingularInputException
from torus_zeros.exceptions.validation import InvalidRangeException
from torus_zeros.exceptions.verification import AllPointsSkippedException
from torus_zeros.models.enums import PhiBranch
from torus_zeros.models.painleve import HamiltonianState, PviParams, RiccatiFamily
from torus_zeros.moduli.functions import phi
from torus_zeros.painleve.okamoto import (
    closed_form_deviations,
    hamilton_residuals,
    hamiltonian_K,
    hamiltonian_gradient,
    level0_state,
    level1_state,
    mu_tilde,
    okamoto_deviation,
    okamoto_forward,
)
from torus_zeros.painleve.riccati import (
    EQUATIONS,
    POLE_EXCISION,
    FamilyFunctions,
    dt_dtau,
    lambda_of,
    make_path,
    pole_locations,
    pole_winding,
    pvi_residual,
    riccati_residual,
    t_of_tau,
)
from torus_zeros.models.moduli import Rectangle
from torus_zeros.utils.cauchy import cauchy_derivative

START = 0.1 + 0.7j
END = 0.3 + 1.4j
CS = [None, 2 + 1j]
TAUS = [0.2 + 0.9j, -0.3 + 1.2j]


def _path(level, k, C, points=8):
    return make_path(RiccatiFamily.of(level, k, C), START, END, points)


def test_1_modular_lambda():
    """Test t(tau) = (e_3 - e_1) / (e_2 - e_1).

    Validates:
        - t(i) = 1/2
        - dt/dtau matches Cauchy differentiation and does not vanish
        - PVI parameters of the two levels
    """
    assert abs(t_of_tau(1j) - 0.5) < 1e-12
    for tau in TAUS:
        numeric = cauchy_derivative(FamilyFunctions.t, tau)
        assert abs(dt_dtau(tau) - numeric) / max(1.0, abs(numeric)) < 1e-8
        assert abs(dt_dtau(tau)) > 1e-6

    assert PviParams.riccati(0).alpha == 0.125
    assert PviParams.riccati(1).alpha == 1.125
    assert PviParams.riccati(1).alphas == (1.125, 0.125, 0.125, 0.125)


def test_2_riccati_level0(run_config):
    """Test the four level-0 Riccati equations.

    Validates:
        - max residual along the path below tol.riccati0 for every k and C
        - every point is accounted for, evaluated or skipped
    """
    tolerance = run_config.tolerances.riccati0
    for k in range(4):
        for C in CS:
            path = _path(0, k, C)
            report = riccati_residual(0, k, C, path)
            assert report.max_residual < tolerance, report.to_dict()
            assert report.evaluated + len(report.skipped) == len(path)
            assert report.equation == EQUATIONS[(0, k)]


def test_3_riccati_level1(run_config):
    """Test the level-1 equations.

    Validates:
        - the three quadratic Riccati equations (k = 1, 2, 3)
        - the cubic relation P0 for k = 0
    """
    tolerance = run_config.tolerances.riccati1
    for k in range(4):
        for C in CS:
            report = riccati_residual(1, k, C, _path(1, k, C))
            assert report.max_residual < tolerance, report.to_dict()


def test_4_pvi_residuals(run_config):
    """Test the second-order PVI along the path.

    Validates:
        - level 0 solves PVI(1/8, -1/8, 1/8, 3/8)
        - level 1 solves PVI(9/8, -1/8, 1/8, 3/8)
    """
    tolerance = run_config.tolerances.pvi
    for level in (0, 1):
        for k in (0, 1, 3):
            report = pvi_residual(level, k, 2 + 1j, _path(level, k, 2 + 1j))
            assert report.max_residual < tolerance, report.to_dict()


def test_5_hamiltonian_gradient():
    """Test (dK/dlambda, dK/dmu) against central differences of K.

    Validates:
        - both partial derivatives for n = 0 and n = 1
    """
    state = HamiltonianState(lam=0.3 + 0.2j, mu=1.1 - 0.4j, t=0.4 + 0.3j, level=1)
    h = 1e-6
    for n in (0, 1):
        d_lam, d_mu = hamiltonian_gradient(n, state)
        plus = HamiltonianState(lam=state.lam + h, mu=state.mu, t=state.t)
        minus = HamiltonianState(lam=state.lam - h, mu=state.mu, t=state.t)
        numeric_lam = (hamiltonian_K(n, plus) - hamiltonian_K(n, minus)) / (2 * h)
        plus = HamiltonianState(lam=state.lam, mu=state.mu + h, t=state.t)
        minus = HamiltonianState(lam=state.lam, mu=state.mu - h, t=state.t)
        numeric_mu = (hamiltonian_K(n, plus) - hamiltonian_K(n, minus)) / (2 * h)

        assert abs(d_lam - numeric_lam) / max(1.0, abs(d_lam)) < 1e-7
        assert abs(d_mu - numeric_mu) / max(1.0, abs(d_mu)) < 1e-7


def test_6_okamoto_closed_forms(run_config):
    """Test the Okamoto map from level 0 to level 1.

    Validates:
        - the mapped lambda equals the level-1 closed form
        - wp, Mobius and momentum closed forms agree with the map
        - level-0 momenta are the family-specific mu~
    """
    tol = run_config.tolerances
    for tau in TAUS:
        for k in range(4):
            for C in CS:
                try:
                    deviation = okamoto_deviation(k, C, tau)
                    deviations = closed_form_deviations(k, C, tau)
                except SingularInputException:
                    continue
                assert deviation < tol.okamoto, (tau, k, C)
                assert max(deviations.values()) < tol.okamoto, (tau, k, C, deviations)

                state = level0_state(k, C, tau)
                assert state.mu == mu_tilde(k, state.lam, state.t)


def test_7_hamilton_equations(run_config):
    """Test Hamilton's equations for the level-1 solution.

    Validates:
        - dlambda/dt = dK/dmu and dmu/dt = -dK/dlambda
        - mu recovered from lambda' alone matches
    """
    tol = run_config.tolerances
    checked = 0
    for tau in TAUS:
        for k in (1, 2, 3):
            residuals = hamilton_residuals(k, 2 + 1j, tau)
            if residuals is None:
                continue
            checked += 1
            assert residuals["first"] < tol.hamilton
            assert residuals["second"] < tol.hamilton
            if "mu_formula" in residuals:
                assert residuals["mu_formula"] < tol.mu_formula
    assert checked > 0


def test_8_state_guards():
    """Test the guards on Hamiltonian states.

    Validates:
        - t = 1 is rejected
        - a level-1 state cannot be pushed through the map again
        - lambda~ = 0 is singular for the map
        - K needs a momentum
    """
    with pytest.raises(InvalidRangeException):
        HamiltonianState(lam=0.5, mu=1.0, t=1.0)

    state = level1_state(1, 2 + 1j, TAUS[0])
    with pytest.raises(InvalidRangeException):
        okamoto_forward(state)

    with pytest.raises(SingularInputException):
        okamoto_forward(HamiltonianState(lam=0.0, mu=1.0, t=0.4 + 0.3j))

    with pytest.raises(SingularInputException):
        hamiltonian_K(1, HamiltonianState(lam=0.3, mu=None, t=0.4 + 0.3j))


def test_9_simple_pole_at_zero_of_f():
    """Test the level-1 lambda near a zero of f_{1,C}.

    The zero is placed at tau0 by taking C = phi_1(tau0).

    Validates:
        - lambda blows up at tau0
        - 1/lambda and t - t(tau0) both wind once around tau0
    """
    tau0 = 0.1 + 1.1j
    C = phi(PhiBranch.K1, tau0).value
    at_zero = lambda_of(1, 1, C, tau0)
    assert at_zero.is_infinite or abs(at_zero.value) > 1e6

    winding = pole_winding(1, C, tau0)
    assert abs(winding.lambda_winding - 1) < 1e-6
    assert abs(winding.t_winding - 1) < 1e-6


def test_10_paths_skip_poles():
    """Test pole excision and the all-skipped guard.

    Validates:
        - a pole of lambda in the box is located
        - path points within the excision radius are dropped
        - a path made only of poles raises AllPointsSkippedException
    """
    tau0 = 0.2 + 1.0j
    C = phi(PhiBranch.K2, tau0).value
    family = RiccatiFamily.of(1, 2, C)

    poles = pole_locations(family, Rectangle(0.0, 0.4, 0.8, 1.2))
    assert min(abs(p - tau0) for p in poles) < 1e-9

    path = make_path(family, tau0 - 0.1, tau0 + 0.1, 20)
    assert len(path) <= 16
    assert all(abs(p.tau - tau0) > POLE_EXCISION for p in path)

    with pytest.raises(AllPointsSkippedException):
        riccati_residual(1, 2, C, [tau0])

    assert np.isfinite(FamilyFunctions(family).lam(np.array([tau0 + 0.05]))[0])


def test_11_residual_scale_at_worst_point():
    """Test the scale stored next to max_residual.

    Validates:
        - every evaluated point records its own scale
        - residual_scale is the scale where max_residual was attained
        - first- and second-order scales are at least 1
    """
    for report in (
        riccati_residual(0, 1, 2 + 1j, _path(0, 1, 2 + 1j)),
        riccati_residual(1, 3, None, _path(1, 3, None)),
        pvi_residual(1, 1, 2 + 1j, _path(1, 1, 2 + 1j)),
    ):
        assert len(report.residuals) == report.evaluated
        assert all(r.scale is not None and r.scale >= 1.0 for r in report.residuals)
        worst = max(report.residuals, key=lambda r: r.residual)
        assert report.max_residual == worst.residual
        assert report.residual_scale == worst.scale
        assert report.to_dict()["residual_scale"] == worst.scale
