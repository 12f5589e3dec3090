"""
Hessians of G_2 at its trivial critical points, in the real coordinates
(x_1, y_1, x_2, y_2).

With P + Q i = wp(z) + eta_1 and b = Im tau the Hessian of G at z is

    H(z) = 1/(2 pi) [[P, -Q], [-Q, -P + 2 pi / b]]

and the Hessian of G_2 at (z_1, z_2) has blocks

    [[H(z_1 - z_2) - 2 H(z_1),  -H(z_1 - z_2)          ],
     [-H(z_1 - z_2),            H(z_1 - z_2) - 2 H(z_2)]].

At the trivial critical points everything reduces to the real and
imaginary parts collected in HessianEntries.
"""

import logging
import math

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.validation import InvalidRangeException
from torus_zeros.kernel.weierstrass import invariants, weierstrass
from torus_zeros.models.enums import PhiBranch
from torus_zeros.models.hessian import HessianEntries, HessianMatrix
from torus_zeros.models.moduli import FamilyIndex, ModuliPoint, TorusPoint
from torus_zeros.moduli.functions import f_value, phi

logger = logging.getLogger(__name__)

_PREFACTOR = 1 / (2 * math.pi)


def hessian_entries(tau: ModuliPoint | complex, sign: int = 1) -> HessianEntries:
    """u_k, v_k from -(e_k + eta_1); s, t from eta_1; u, v from wp(q_sign) = sign sqrt(g_2/12)."""
    inv = invariants(tau)
    minus = [-(inv.e(k) + inv.eta1) for k in (1, 2, 3)]
    mu = sign * inv.sqrt_g2_12
    return HessianEntries(
        u1=minus[0].real,
        v1=minus[0].imag,
        u2=minus[1].real,
        v2=minus[1].imag,
        u3=minus[2].real,
        v3=minus[2].imag,
        s=inv.eta1.real,
        t_img=inv.eta1.imag,
        u=mu.real,
        v=mu.imag,
        b=inv.tau.im,
    )


def green_block(z: TorusPoint | complex, tau: ModuliPoint | complex) -> np.ndarray:
    """The 2 x 2 Hessian of G at z from wp(z) and eta_1."""
    tau = ModuliPoint.of(tau)
    inv = invariants(tau)
    value = weierstrass(z, tau).wp + inv.eta1
    p, q = value.real, value.imag
    return _PREFACTOR * np.array([[p, -q], [-q, -p + 2 * math.pi / tau.im]])


def pair_hessian(z1: complex, z2: complex, tau: ModuliPoint | complex) -> np.ndarray:
    """Hessian of G_2 at an arbitrary (z_1, z_2) off the diagonal, from the blocks of G."""
    tau = ModuliPoint.of(tau)
    diff = green_block(complex(z1) - complex(z2), tau)
    first = green_block(z1, tau)
    second = green_block(z2, tau)
    return np.block([[diff - 2 * first, -diff], [-diff, diff - 2 * second]])


def half_period_matrix(i: int, j: int, entries: HessianEntries) -> np.ndarray:
    k = 6 - i - j
    ui, vi = entries.uv(i)
    uj, vj = entries.uv(j)
    uk, vk = entries.uv(k)
    c = 2 * math.pi / entries.b
    return _PREFACTOR * np.array(
        [
            [2 * ui - uk, vk - 2 * vi, uk, -vk],
            [vk - 2 * vi, uk - 2 * ui - c, -vk, -uk - c],
            [uk, -vk, 2 * uj - uk, vk - 2 * vj],
            [-vk, -uk - c, vk - 2 * vj, uk - 2 * uj - c],
        ]
    )


def q_matrix(entries: HessianEntries) -> np.ndarray:
    u, v, s, t = entries.u, entries.v, entries.s, entries.t_img
    c = 2 * math.pi / entries.b
    return _PREFACTOR * np.array(
        [
            [-4 * u - s, 4 * v + t, 2 * u - s, -2 * v + t],
            [4 * v + t, 4 * u + s - c, -2 * v + t, -2 * u + s - c],
            [2 * u - s, -2 * v + t, -4 * u - s, 4 * v + t],
            [-2 * v + t, -2 * u + s - c, 4 * v + t, 4 * u + s - c],
        ]
    )


def half_period_closed_form(k: int, tau: ModuliPoint | complex) -> float:
    """4/(2 pi)^4 (|f|^2 - (6 pi / b) Re(conj(e_k) f)) with f = f_{k,inf}."""
    inv = invariants(tau)
    f = f_value(k, None, tau)
    e = inv.e(k)
    return 4 / (2 * math.pi) ** 4 * (abs(f) ** 2 - (6 * math.pi / inv.tau.im) * (e.conjugate() * f).real)


def half_period_phi_form(k: int, tau: ModuliPoint | complex) -> float:
    """4 |f_{k,inf}|^2 Im phi_k / ((2 pi)^4 b); zero where f vanishes and phi_k has its pole."""
    inv = invariants(tau)
    value = phi(PhiBranch(f"k{k}"), tau)
    if value.is_infinite:
        return 0.0
    f = f_value(k, None, tau)
    return 4 * abs(f) ** 2 * value.value.imag / ((2 * math.pi) ** 4 * inv.tau.im)


def half_period_identity(k: int, tau: ModuliPoint | complex) -> float:
    """Relative gap in 2 e_i e_j + e_k^2 - 3 e_k eta_1 = -f_{k,inf}."""
    inv = invariants(tau)
    i, j = FamilyIndex(k).others()
    left = 2 * inv.e(i) * inv.e(j) + inv.e(k) ** 2 - 3 * inv.e(k) * inv.eta1
    f = f_value(k, None, tau)
    return abs(left + f) / max(1.0, abs(f), abs(inv.e(k) * inv.eta1))


def q_closed_form(sign: int, tau: ModuliPoint | complex) -> float:
    """9/pi^4 |mu|^2 (|mu + eta_1|^2 - (2 pi / b) Re(mu + eta_1)), mu = wp(q_sign)."""
    inv = invariants(tau)
    mu = sign * inv.sqrt_g2_12
    shifted = mu + inv.eta1
    return 9 / math.pi**4 * abs(mu) ** 2 * (abs(shifted) ** 2 - (2 * math.pi / inv.tau.im) * shifted.real)


def q_phi_form(sign: int, tau: ModuliPoint | complex) -> float:
    """3 |g_2| / (4 pi^4 b) |mu + eta_1|^2 Im phi_pm."""
    inv = invariants(tau)
    value = phi(PhiBranch.PLUS if sign > 0 else PhiBranch.MINUS, tau)
    if value.is_infinite:
        return 0.0
    shifted = sign * inv.sqrt_g2_12 + inv.eta1
    return 3 * abs(inv.g2) / (4 * math.pi**4 * inv.tau.im) * abs(shifted) ** 2 * value.value.imag


def _check_symmetry(matrix: HessianMatrix):
    if matrix.asymmetry > 1e-10:
        logger.warning(f"{matrix.label} Hessian at {matrix.tau} is asymmetric by {matrix.asymmetry:.2e}")


def hessian_half_period(i: int, j: int, tau: ModuliPoint | complex) -> HessianMatrix:
    """Hessian of G_2 at (omega_i/2, omega_j/2) with its determinant and closed forms."""
    if i == j or {i, j} - {1, 2, 3}:
        raise InvalidRangeException(field="(i, j)", value=(i, j), min_value=1, max_value=3)
    tau = ModuliPoint.of(tau).require_floor(get_run_config().tolerances.min_im)
    k = 6 - i - j
    entries = half_period_matrix(i, j, hessian_entries(tau))
    matrix = HessianMatrix(
        entries=entries,
        det=float(np.linalg.det(entries)),
        closed_form=half_period_closed_form(k, tau),
        phi_form=half_period_phi_form(k, tau),
        tau=tau,
        label=f"half_period({i},{j})",
    )
    _check_symmetry(matrix)
    return matrix


def hessian_q(sign: int, tau: ModuliPoint | complex) -> HessianMatrix:
    """Hessian of G_2 at (q_pm, -q_pm)."""
    if sign not in (1, -1):
        raise InvalidRangeException(field="sign", value=sign, min_value=-1, max_value=1)
    tau = ModuliPoint.of(tau).require_floor(get_run_config().tolerances.min_im)
    entries = q_matrix(hessian_entries(tau, sign))
    matrix = HessianMatrix(
        entries=entries,
        det=float(np.linalg.det(entries)),
        closed_form=q_closed_form(sign, tau),
        phi_form=q_phi_form(sign, tau),
        tau=tau,
        label="q_plus" if sign > 0 else "q_minus",
    )
    _check_symmetry(matrix)
    return matrix


def all_hessians(tau: ModuliPoint | complex) -> list[HessianMatrix]:
    """The five trivial-critical-point Hessians in a fixed order."""
    return [hessian_half_period(i, j, tau) for i, j in ((1, 2), (1, 3), (2, 3))] + [
        hessian_q(1, tau),
        hessian_q(-1, tau),
    ]
