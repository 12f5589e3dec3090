"""
Hamiltonian form of the Riccati solutions and the Okamoto map between levels.

    K_n = [ l(l-1)(l-t) m^2 - (l^2 - 2tl + t) m / 2 - n(n+1)(l-t)/4 ] / (t(t-1))

A level-0 solution (l~, m~) is sent to level 1 by

    m = m~ - (1/l~ + 1/(l~-1) + 1/(l~-t)) / 2,    l = l~ + 1/m.
"""

import logging

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.numerical import SingularInputException
from torus_zeros.exceptions.validation import InvalidRangeException
from torus_zeros.kernel.weierstrass import invariant_arrays, invariants
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, ModuliPoint
from torus_zeros.models.painleve import HamiltonianState, RiccatiFamily
from torus_zeros.painleve.riccati import FamilyFunctions, lambda_of, t_arrays, t_of_tau, wp_p_formula
from torus_zeros.utils.cauchy import cauchy_expansion

logger = logging.getLogger(__name__)

# |l~|, |l~ - 1|, |l~ - t| below this times max(1, |t|) make a state singular
_SINGULAR = 1e-12


def mu_tilde(k: int, lam_tilde, t):
    """The level-0 momentum attached to family k."""
    if k == 0:
        return 0 * lam_tilde
    return {1: 0.5 / lam_tilde, 2: 0.5 / (lam_tilde - 1), 3: 0.5 / (lam_tilde - t)}[k]


def _forward(lam_tilde, mu_t, t):
    mu = mu_t - 0.5 * (1 / lam_tilde + 1 / (lam_tilde - 1) + 1 / (lam_tilde - t))
    return lam_tilde + 1 / mu, mu


def _near_special(lam: complex, t: complex) -> str | None:
    bound = _SINGULAR * max(1.0, abs(t))
    for label, value in (("0", lam), ("1", lam - 1), ("t", lam - t)):
        if abs(value) < bound:
            return f"lambda = {label}"
    return None


def level0_state(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> HamiltonianState:
    """(l~, m~) of family k at tau.

    Raises:
        SingularInputException: l~ is infinite or sits on 0, 1 or t.
    """
    k = FamilyIndex.of(k).k
    lam = lambda_of(0, k, C, tau)
    t = t_of_tau(tau)
    if lam.is_infinite:
        raise SingularInputException(reason="lambda~ is infinite", tau=ModuliPoint.of(tau))
    special = _near_special(lam.value, t)
    if special and k:
        raise SingularInputException(reason=special, tau=ModuliPoint.of(tau))
    return HamiltonianState(lam=lam.value, mu=complex(mu_tilde(k, lam.value, t)), t=t, level=0)


def okamoto_forward(state: HamiltonianState) -> HamiltonianState:
    """
    Level-0 state to level-1 state.

    Raises:
        InvalidRangeException: the state is not at level 0.
        SingularInputException: l~ in {0, 1, t}, m~ missing, or m = 0.
    """
    if state.level != 0:
        raise InvalidRangeException(field="level", value=state.level, min_value=0, max_value=0)
    if state.mu is None:
        raise SingularInputException(reason="mu~ is undefined")
    special = _near_special(state.lam, state.t)
    if special:
        raise SingularInputException(reason=special, t=state.t)

    lam_tilde, t = state.lam, state.t
    mu = state.mu - 0.5 * (1 / lam_tilde + 1 / (lam_tilde - 1) + 1 / (lam_tilde - t))
    if abs(mu) < _SINGULAR * max(1.0, abs(state.mu)):
        raise SingularInputException(reason="mu = 0 after the shift", t=t)
    return HamiltonianState(lam=lam_tilde + 1 / mu, mu=mu, t=t, level=1)


def level1_state(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> HamiltonianState:
    return okamoto_forward(level0_state(k, C, tau))


def lambda_closed_form(k: int, lam_tilde, t):
    """Level-1 lambda as a Mobius image of level-0 lambda~ (k = 1, 2, 3)."""
    if k == 1:
        return ((1 + t) * lam_tilde - 2 * t) / (2 * lam_tilde - 1 - t)
    if k == 2:
        return t * lam_tilde / (2 * lam_tilde - t)
    if k == 3:
        return lam_tilde / (2 * lam_tilde - 1)
    raise InvalidRangeException(field="k", value=k, min_value=1, max_value=3)


def wp_closed_form(k: int, wp_tilde: complex, tau: ModuliPoint | complex) -> complex:
    """Level-1 wp(p) from level-0 wp(p~), without passing through lambda."""
    inv = invariants(tau)
    if k == 0:
        return (4 * wp_tilde**3 + inv.g2 * wp_tilde + 2 * inv.g3) / (12 * wp_tilde**2 - inv.g2)
    e = inv.e(k)
    return -(e * wp_tilde + 2 * e * e - inv.g2 / 2) / (2 * wp_tilde + e)


def mu_closed_form_k1(lam, t):
    """Level-1 momentum of the k = 1 family in terms of lambda alone."""
    return (2 * lam - 1 - t) / (2 * (lam - 1) * (lam - t))


def mu_from_derivative(lam: complex, dlam_dt: complex, t: complex) -> HamiltonianState:
    """
    Level-1 momentum from Hamilton's first equation solved for mu.

    The state is returned with mu = None when lambda sits on 0, 1 or t.
    """
    if _near_special(lam, t):
        return HamiltonianState(lam=lam, mu=None, t=t, level=1)
    mu = (t * (t - 1) * dlam_dt + 0.5 * (lam * lam - 2 * t * lam + t)) / (2 * lam * (lam - 1) * (lam - t))
    return HamiltonianState(lam=lam, mu=mu, t=t, level=1)


def hamiltonian_K(n: int, state: HamiltonianState) -> complex:
    if n not in (0, 1):
        raise InvalidRangeException(field="n", value=n, min_value=0, max_value=1)
    lam, mu, t = state.lam, state.mu, state.t
    if mu is None:
        raise SingularInputException(reason="mu is undefined", t=t)
    value = lam * (lam - 1) * (lam - t) * mu * mu - 0.5 * (lam * lam - 2 * t * lam + t) * mu - n * (n + 1) * (lam - t) / 4
    return complex(value / (t * (t - 1)))


def hamiltonian_gradient(n: int, state: HamiltonianState) -> tuple[complex, complex]:
    """(dK/dlambda, dK/dmu)."""
    if n not in (0, 1):
        raise InvalidRangeException(field="n", value=n, min_value=0, max_value=1)
    lam, mu, t = state.lam, state.mu, state.t
    if mu is None:
        raise SingularInputException(reason="mu is undefined", t=t)
    a = t * (t - 1)
    d_lam = ((3 * lam * lam - 2 * (1 + t) * lam + t) * mu * mu - (lam - t) * mu - n * (n + 1) / 4) / a
    d_mu = (2 * lam * (lam - 1) * (lam - t) * mu - 0.5 * (lam * lam - 2 * t * lam + t)) / a
    return complex(d_lam), complex(d_mu)


class Level1Functions:
    """Vectorized level-1 (lambda, mu) built through the Okamoto map."""

    def __init__(self, k: int, C: ExtendedScalar):
        self.k = k
        self.level0 = FamilyFunctions(RiccatiFamily.of(0, k, C))

    def state(self, tau: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lam_tilde = self.level0.lam(tau)
        t = t_arrays(invariant_arrays(tau))[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            return _forward(lam_tilde, mu_tilde(self.k, lam_tilde, t), t)

    def lam(self, tau: np.ndarray) -> np.ndarray:
        return self.state(tau)[0]

    def mu(self, tau: np.ndarray) -> np.ndarray:
        return self.state(tau)[1]


def okamoto_deviation(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> float:
    """
    Relative distance between level-1 lambda from the closed form and from
    the Okamoto map applied to level 0.
    """
    k = FamilyIndex.of(k).k
    direct = lambda_of(1, k, C, tau)
    mapped = level1_state(k, C, tau)
    if direct.is_infinite:
        return 0.0 if abs(mapped.lam) > 1 / _SINGULAR else float("inf")
    return abs(direct.value - mapped.lam) / max(1.0, abs(direct.value))


def closed_form_deviations(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> dict[str, float]:
    """
    Relative deviations of the closed forms from the Okamoto map at one point.

    wp: the k-specific wp(p) closed form against the level-1 formula.
    lambda: the Mobius image of lambda~ (k >= 1).
    mu_inverse: mu = 1 / (lambda - lambda~).
    mu_k1: the k = 1 momentum in terms of lambda.
    """
    k = FamilyIndex.of(k).k
    state0 = level0_state(k, C, tau)
    state1 = okamoto_forward(state0)
    scale = max(1.0, abs(state1.lam))
    mu_scale = max(1.0, abs(state1.mu))

    wp_tilde = wp_p_formula(0, k, C, tau).value
    wp_direct = wp_p_formula(1, k, C, tau)
    deviations = {}
    if not wp_direct.is_infinite:
        deviations["wp"] = abs(wp_closed_form(k, wp_tilde, tau) - wp_direct.value) / max(1.0, abs(wp_direct.value))

    deviations["mu_inverse"] = abs(1 / (state1.lam - state0.lam) - state1.mu) / mu_scale
    if k:
        deviations["lambda"] = abs(lambda_closed_form(k, state0.lam, state0.t) - state1.lam) / scale
    if k == 1:
        deviations["mu_k1"] = abs(mu_closed_form_k1(state1.lam, state1.t) - state1.mu) / mu_scale
    return deviations


def hamilton_residuals(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> dict[str, float] | None:
    """
    Both Hamilton equations along the level-1 solution at tau, plus the
    momentum recovered from lambda' alone.

    dl/dt = dK/dm, dm/dt = -dK/dl, with the t-derivatives from Cauchy
    differentiation in tau. None when the Cauchy contour sees a pole.
    """
    config = get_run_config()
    tol = config.tolerances
    k = FamilyIndex.of(k).k
    C = ExtendedScalar.of(C)
    tau = ModuliPoint.of(tau).require_floor(tol.min_im)
    functions = Level1Functions(k, C)

    lam_expansion = cauchy_expansion(functions.lam, tau.tau, order=1)
    mu_expansion = cauchy_expansion(functions.mu, tau.tau, order=1)
    if not (lam_expansion.ok(tol.cauchy_check) and mu_expansion.ok(tol.cauchy_check)):
        logger.debug(f"hamilton check skipped at {tau}: pole near the Cauchy contour")
        return None

    t, dt = (complex(v[0]) for v in t_arrays(invariant_arrays(np.array([tau.tau]))))
    state = HamiltonianState(lam=lam_expansion.center, mu=mu_expansion.center, t=t, level=1)
    dlam = lam_expansion.derivative(1) / dt
    dmu = mu_expansion.derivative(1) / dt
    d_lam, d_mu = hamiltonian_gradient(1, state)

    recovered = mu_from_derivative(state.lam, dlam, t)
    result = {
        "first": abs(dlam - d_mu) / max(1.0, abs(dlam)),
        "second": abs(dmu + d_lam) / max(1.0, abs(dmu)),
    }
    if recovered.mu is not None:
        result["mu_formula"] = abs(recovered.mu - state.mu) / max(1.0, abs(state.mu))
    return result
