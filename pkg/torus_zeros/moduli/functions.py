"""
Function families on the upper half plane built from the lattice invariants.

With x = C eta_1 - eta_2 and y = C - tau (x = y eta_1 + 2 pi i by Legendre):

    f_{0,C}   = 12 x^2 - g_2 y^2                    f_{0,inf} = 12 eta_1^2 - g_2
    f_{k,C}   = 3 e_k x + (g_2/2 - 3 e_k^2) y       f_{k,inf} = 3 e_k eta_1 + g_2/2 - 3 e_k^2
    F_k       = eta_1 + e_k
    phi_pm    = tau - 2 pi i / (eta_1 pm sqrt(g_2/12))
    phi_k     = tau - 6 pi i e_k / f_{k,inf}

C = inf is the projective limit: divide by the leading power of y.
The private helpers take plain numbers or numpy arrays alike.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.validation import InvalidRangeException
from torus_zeros.kernel.derivatives import DTauArrays, dtau_arrays, tau_derivatives
from torus_zeros.kernel.weierstrass import InvariantArrays, invariant_arrays, invariants, weierstrass_arrays
from torus_zeros.models.enums import PhiBranch
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, ModuliPoint
from torus_zeros.models.painleve import LemmaWitness

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FamilyEvaluator:
    """Vectorized f and f' on arrays of tau, as consumed by the zero finder."""

    f: Evaluator
    f_prime: Evaluator
    label: str


def lemma_xy(C: ExtendedScalar, tau, eta1):
    """(x, y) for finite C, (eta_1, 1) for C = inf."""
    if C.is_infinite:
        return eta1, 1.0
    y = C.value - tau
    return y * eta1 + 2j * np.pi, y


def lemma_xy_dtau(C: ExtendedScalar, tau, eta1, deta1):
    if C.is_infinite:
        return deta1, 0.0
    y = C.value - tau
    return deta1 * y - eta1, -1.0


def _f(k: int, x, y, e, g2):
    if k == 0:
        return 12 * x * x - g2 * y * y
    return 3 * e * x + (g2 / 2 - 3 * e * e) * y


def _f_dtau(k: int, x, y, dx, dy, e, de, g2, dg2):
    if k == 0:
        return 24 * x * dx - dg2 * y * y - 2 * g2 * y * dy
    return 3 * de * x + 3 * e * dx + (dg2 / 2 - 6 * e * de) * y + (g2 / 2 - 3 * e * e) * dy


def _companion(k: int, x, y, e, g2, g3):
    """
    The numerator paired with f_{k,C}; cannot vanish together with it.

    Returns (value, monomial scale).
    """
    if k == 0:
        terms = (-4 * x**3, -g2 * x * y * y, 2 * g3 * y**3)
    else:
        terms = ((g2 / 2 - 3 * e * e) * x, (g2 / 4) * e * y)
    scale = np.maximum.reduce([np.abs(np.asarray(t)) for t in terms])
    return sum(terms), scale


def _e_or_none(inv, k: int):
    return inv.e(k) if k else None


def f_value(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> complex:
    """f_{k,C}(tau) for k in 0..3 and C finite or infinite."""
    k = FamilyIndex.of(k).k
    C = ExtendedScalar.of(C)
    inv = invariants(tau)
    x, y = lemma_xy(C, inv.tau.tau, inv.eta1)
    value = complex(_f(k, x, y, _e_or_none(inv, k), inv.g2))

    if k == 0 and not C.is_infinite:
        # same value straight from the definition with eta_2
        direct = 12 * (C.value * inv.eta1 - inv.eta2) ** 2 - inv.g2 * (C.value - inv.tau.tau) ** 2
        if abs(direct - value) > 1e-8 * max(1.0, abs(value), 12 * abs(x) ** 2):
            logger.warning(f"f_0 Legendre collapse off at tau={inv.tau}, C={C}: {direct} vs {value}")

    return value


def f_dtau(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> complex:
    """Analytic d f_{k,C} / d tau by the chain rule over the invariant derivatives."""
    k = FamilyIndex.of(k).k
    C = ExtendedScalar.of(C)
    inv = invariants(tau)
    d = tau_derivatives(tau)
    x, y = lemma_xy(C, inv.tau.tau, inv.eta1)
    dx, dy = lemma_xy_dtau(C, inv.tau.tau, inv.eta1, d.deta1)
    e = _e_or_none(inv, k)
    de = d.de(k) if k else None
    return complex(_f_dtau(k, x, y, dx, dy, e, de, inv.g2, d.dg2))


def f_factorized(C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> complex:
    """12 (x - sqrt(g_2/12) y)(x + sqrt(g_2/12) y), the split form of f_{0,C}."""
    C = ExtendedScalar.of(C)
    inv = invariants(tau)
    x, y = lemma_xy(C, inv.tau.tau, inv.eta1)
    root = inv.sqrt_g2_12
    return complex(12 * (x - root * y) * (x + root * y))


def _require_half_period(k: int) -> int:
    if k not in (1, 2, 3):
        raise InvalidRangeException(field="k", value=k, min_value=1, max_value=3)
    return k


def f_cap(k: int, tau: ModuliPoint | complex) -> complex:
    """F_k = eta_1 + e_k."""
    _require_half_period(k)
    inv = invariants(tau)
    return inv.eta1 + inv.e(k)


def f_cap_dtau(k: int, tau: ModuliPoint | complex) -> complex:
    _require_half_period(k)
    d = tau_derivatives(tau)
    return d.deta1 + d.de(k)


def f_cap_theta_route(k: int, tau: ModuliPoint | complex) -> complex:
    """-(log theta_1)''(omega_k / 2), evaluated without going through e_k."""
    inv = invariants(tau)
    half = FamilyIndex(k).half_period(inv.tau.tau)
    # wp = -eta_1 - (log theta_1)'', so -(log theta_1)'' = wp + eta_1 at the same point
    return complex(weierstrass_arrays(half, inv.tau.tau).wp) + complex(inv.eta1)


def _phi_denominator(branch: PhiBranch, inv):
    if branch.k is None:
        return inv.eta1 + branch.sign * np.sqrt(inv.g2 / 12 + 0j)
    e = inv.e(branch.k)
    return 3 * e * inv.eta1 + inv.g2 / 2 - 3 * e * e


def _phi(branch: PhiBranch, tau, inv, denominator):
    if branch.k is None:
        return tau - 2j * np.pi / denominator
    return tau - 6j * np.pi * inv.e(branch.k) / denominator


def phi(branch: PhiBranch | str, tau: ModuliPoint | complex) -> ExtendedScalar:
    """
    phi_pm or phi_k at tau; infinity at a pole.

    On the orbit of rho, g_2 = 0 and phi_pm collapses to tau - 2 pi i / eta_1,
    which is eta_2 / eta_1 by Legendre. That limit is taken as the value.
    """
    branch = PhiBranch(branch)
    inv = invariants(tau)
    config = get_run_config()
    denominator = complex(_phi_denominator(branch, inv))
    if branch.k is None and abs(inv.g2) < config.tolerances.orbit_g2 * inv.scale**2:
        denominator = complex(inv.eta1)

    scale = inv.scale if branch.k is None else inv.scale**2
    if abs(denominator) < config.tolerances.pole * scale:
        return ExtendedScalar.infinity()
    return ExtendedScalar.finite(_phi(branch, inv.tau.tau, inv, denominator))


def _phi_dtau(branch: PhiBranch, inv, d, denominator):
    if branch.k is None:
        root = np.sqrt(inv.g2 / 12 + 0j)
        d_denominator = d.deta1 + branch.sign * d.dg2 / (24 * root)
        return 1 + 2j * np.pi * d_denominator / denominator**2

    k = branch.k
    e, de = inv.e(k), d.de(k)
    df = 3 * de * inv.eta1 + 3 * e * d.deta1 + d.dg2 / 2 - 6 * e * de
    return 1 - 6j * np.pi * (de * denominator - e * df) / denominator**2


def phi_dtau(branch: PhiBranch | str, tau: ModuliPoint | complex) -> ExtendedScalar:
    """
    d phi / d tau; infinity at poles of phi and, for phi_pm, on the orbit of rho
    where the square root branches.
    """
    branch = PhiBranch(branch)
    inv = invariants(tau)
    config = get_run_config()
    denominator = complex(_phi_denominator(branch, inv))

    scale = inv.scale if branch.k is None else inv.scale**2
    if abs(denominator) < config.tolerances.pole * scale:
        return ExtendedScalar.infinity()
    if branch.k is None and abs(inv.g2) < config.tolerances.orbit_g2 * inv.scale**2:
        return ExtendedScalar.infinity()
    return ExtendedScalar.finite(_phi_dtau(branch, inv, tau_derivatives(tau), denominator))


def lemma_witness(k: FamilyIndex | int, C: ExtendedScalar | complex | None, tau: ModuliPoint | complex) -> LemmaWitness:
    """x, y and the companion numerator of f_{k,C} at tau."""
    k = FamilyIndex.of(k).k
    C = ExtendedScalar.of(C)
    inv = invariants(tau)
    x, y = lemma_xy(C, inv.tau.tau, inv.eta1)
    companion, scale = _companion(k, x, y, _e_or_none(inv, k), inv.g2, inv.g3)
    return LemmaWitness(
        x=complex(x),
        y=complex(y),
        f=complex(_f(k, x, y, _e_or_none(inv, k), inv.g2)),
        companion=complex(companion),
        companion_scale=float(scale),
    )


def lemma_determinant(k: int, tau: ModuliPoint | complex) -> tuple[complex, complex]:
    """
    det [[3 e_k, g_2/2 - 3 e_k^2], [g_2/2 - 3 e_k^2, g_2 e_k / 4]] and its
    factorised value (e_i - e_k)(e_j - e_k)(e_i - e_j)^2.
    """
    index = FamilyIndex(k)
    inv = invariants(tau)
    i, j = index.others()
    e, g2 = inv.e(k), inv.g2
    off = g2 / 2 - 3 * e * e
    det = 3 * e * (g2 * e / 4) - off * off
    product = (inv.e(i) - e) * (inv.e(j) - e) * (inv.e(i) - inv.e(j)) ** 2
    return det, product


# vectorized evaluators


def f_arrays(k: int, C: ExtendedScalar, inv: InvariantArrays) -> np.ndarray:
    x, y = lemma_xy(C, inv.tau, inv.eta1)
    return _f(k, x, y, inv.e(k) if k else None, inv.g2)


def f_dtau_arrays(k: int, C: ExtendedScalar, inv: InvariantArrays, d: DTauArrays) -> np.ndarray:
    x, y = lemma_xy(C, inv.tau, inv.eta1)
    dx, dy = lemma_xy_dtau(C, inv.tau, inv.eta1, d.deta1)
    return _f_dtau(k, x, y, dx, dy, inv.e(k) if k else None, d.de(k) if k else None, inv.g2, d.dg2)


def phi_arrays(branch: PhiBranch, inv: InvariantArrays) -> tuple[np.ndarray, np.ndarray]:
    """(phi, phi') on arrays; entries at poles come out non-finite."""
    denominator = _phi_denominator(branch, inv)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = _phi(branch, inv.tau, inv, denominator)
        derivative = _phi_dtau(branch, inv, dtau_arrays(inv), denominator)
    return value, derivative


def family_evaluator(k: FamilyIndex | int, C: ExtendedScalar | complex | None) -> FamilyEvaluator:
    k = FamilyIndex.of(k).k
    C = ExtendedScalar.of(C)

    def f(tau: np.ndarray) -> np.ndarray:
        return f_arrays(k, C, invariant_arrays(tau))

    def f_prime(tau: np.ndarray) -> np.ndarray:
        inv = invariant_arrays(tau)
        return f_dtau_arrays(k, C, inv, dtau_arrays(inv))

    return FamilyEvaluator(f=f, f_prime=f_prime, label=f"f_{k},{C}")


def f_cap_evaluator(k: int) -> FamilyEvaluator:
    _require_half_period(k)

    def f(tau: np.ndarray) -> np.ndarray:
        inv = invariant_arrays(tau)
        return inv.eta1 + inv.e(k)

    def f_prime(tau: np.ndarray) -> np.ndarray:
        d = dtau_arrays(invariant_arrays(tau))
        return d.deta1 + d.de(k)

    return FamilyEvaluator(f=f, f_prime=f_prime, label=f"F_{k}")


def g2_evaluator() -> FamilyEvaluator:
    def f(tau: np.ndarray) -> np.ndarray:
        return invariant_arrays(tau).g2

    def f_prime(tau: np.ndarray) -> np.ndarray:
        return dtau_arrays(invariant_arrays(tau)).dg2

    return FamilyEvaluator(f=f, f_prime=f_prime, label="g2")

