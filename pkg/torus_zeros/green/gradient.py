"""
Gradient of the Green function on the torus and the trivial critical points
of G_2(z1, z2) = G(z1 - z2) - 2 G(z1) - 2 G(z2).

    -4 pi G_z = zeta(z) - r eta_1 - s eta_2,   z = r + s tau

G itself is never evaluated.
"""

import logging
import math

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.kernel.weierstrass import checked_point, invariants, weierstrass, wp_inverse
from torus_zeros.models.enums import CriticalKind
from torus_zeros.models.hessian import CriticalPair
from torus_zeros.models.moduli import FamilyIndex, ModuliPoint, TorusPoint

logger = logging.getLogger(__name__)

HALF_PERIOD_PAIRS = ((1, 2), (1, 3), (2, 3))


def green_grad(z: TorusPoint | complex, tau: ModuliPoint | complex) -> tuple[float, float]:
    """
    (G_x, G_y) at z.

    Raises:
        LatticePointException: z within lattice_eps of a lattice point.
    """
    tau = ModuliPoint.of(tau).require_floor(get_run_config().tolerances.min_im)
    point = checked_point(z, tau)
    inv = invariants(tau)
    zeta = weierstrass(point, tau).zeta
    g_z = -(zeta - point.r * inv.eta1 - point.s * inv.eta2) / (4 * math.pi)
    return 2 * g_z.real, -2 * g_z.imag


def _grad(z: complex, tau: ModuliPoint) -> np.ndarray:
    return np.array(green_grad(z, tau))


def critical_residual(a1: TorusPoint, a2: TorusPoint, tau: ModuliPoint | complex) -> float:
    """
    max over both equations of |2 grad G(a_1) - grad G(a_1 - a_2)| and
    |2 grad G(a_2) - grad G(a_2 - a_1)|.
    """
    tau = ModuliPoint.of(tau)
    first = 2 * _grad(a1.z, tau) - _grad(a1.z - a2.z, tau)
    second = 2 * _grad(a2.z, tau) - _grad(a2.z - a1.z, tau)
    return float(max(np.max(np.abs(first)), np.max(np.abs(second))))


def addition_witness(a: TorusPoint | complex, tau: ModuliPoint | complex) -> complex:
    """2 zeta(a) - zeta(2a) + wp''(a) / (2 wp'(a)); zero wherever it is defined."""
    tau = ModuliPoint.of(tau)
    point = TorusPoint.of(a, tau)
    at_a = weierstrass(point, tau)
    at_2a = weierstrass(2 * point.z, tau)
    return 2 * at_a.zeta - at_2a.zeta + at_a.wp_pp / (2 * at_a.wp_prime)


def zeta_form_residual(a: TorusPoint, tau: ModuliPoint | complex) -> float:
    """|2 zeta(a) - zeta(2a)| relative to |zeta(a)|, the q_pm equation in zeta form."""
    tau = ModuliPoint.of(tau)
    at_a = weierstrass(a, tau)
    at_2a = weierstrass(2 * a.z, tau)
    return abs(2 * at_a.zeta - at_2a.zeta) / max(1.0, abs(at_a.zeta))


def _half_period_pair(i: int, j: int, tau: ModuliPoint) -> CriticalPair:
    a1 = TorusPoint.from_complex(FamilyIndex(i).half_period(tau.tau), tau)
    a2 = TorusPoint.from_complex(FamilyIndex(j).half_period(tau.tau), tau)
    return CriticalPair(
        a1=a1,
        a2=a2,
        kind=CriticalKind.HALF_PERIOD,
        indices=(i, j),
        residual=critical_residual(a1, a2, tau),
    )


def q_point(sign: int, tau: ModuliPoint | complex) -> TorusPoint:
    """q_pm with wp(q_pm) = pm sqrt(g_2/12), principal square root."""
    tau = ModuliPoint.of(tau)
    inv = invariants(tau)
    return wp_inverse(sign * inv.sqrt_g2_12, tau)


def _q_pair(sign: int, tau: ModuliPoint) -> CriticalPair:
    tol = get_run_config().tolerances
    inv = invariants(tau)
    degenerate = abs(inv.g2) < tol.orbit_g2 * inv.scale**2
    if degenerate:
        logger.warning(f"g2 vanishes at tau={tau}: q_plus and q_minus coincide")

    a1 = q_point(sign, tau)
    a2 = TorusPoint.from_complex(-a1.z, tau)
    residual = max(critical_residual(a1, a2, tau), zeta_form_residual(a1, tau))
    return CriticalPair(
        a1=a1,
        a2=a2,
        kind=CriticalKind.Q_PLUS if sign > 0 else CriticalKind.Q_MINUS,
        wp_value=sign * inv.sqrt_g2_12,
        residual=residual,
        degenerate=degenerate,
    )


def trivial_critical_points(tau: ModuliPoint | complex) -> list[CriticalPair]:
    """
    The five trivial critical points of G_2: three half-period pairs and
    (q_pm, -q_pm).

    Raises:
        ConvergenceException: wp_inverse found no q_pm.
    """
    tau = ModuliPoint.of(tau).require_floor(get_run_config().tolerances.min_im)
    pairs = [_half_period_pair(i, j, tau) for i, j in HALF_PERIOD_PAIRS]
    pairs += [_q_pair(1, tau), _q_pair(-1, tau)]

    worst = max(p.residual for p in pairs)
    logger.debug(f"trivial critical points at {tau}: max residual {worst:.3e}")
    return pairs