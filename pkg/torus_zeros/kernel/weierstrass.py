"""Weierstrass functions for the lattice Z + Z*tau via theta_1.

zeta(z) = eta_1 z + theta_1'(z)/theta_1(z),  wp = -zeta',  eta_1 = -theta_1'''(0) / (3 theta_1'(0))

Arguments are reduced into the cell {r + s*tau : 0 <= r, s < 1} before the
series is summed; zeta picks up m*eta_1 + n*eta_2 from the translation.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.numerical import (
    ConvergenceException,
    LatticePointException,
    PrecisionException,
)
from torus_zeros.kernel.theta import theta_series
from torus_zeros.models.lattice import LatticeInvariants
from torus_zeros.models.moduli import ModuliPoint, TorusPoint

logger = logging.getLogger(__name__)

_CHUNK = 2048


class InvariantArrays(NamedTuple):
    """Lattice invariants evaluated on an array of tau values."""

    tau: np.ndarray
    eta1: np.ndarray
    eta2: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    g2: np.ndarray
    g3: np.ndarray

    def e(self, k: int) -> np.ndarray:
        return (self.e1, self.e2, self.e3)[k - 1]


class WeierstrassArrays(NamedTuple):
    wp: np.ndarray
    wp1: np.ndarray
    wp2: np.ndarray
    zeta: np.ndarray


@dataclass(frozen=True)
class WeierstrassEval:
    """wp, wp', wp'' and zeta at one point."""

    wp: complex
    wp_prime: complex
    wp_pp: complex
    zeta: complex


def _log_derivatives(z: np.ndarray, tau: np.ndarray) -> tuple[np.ndarray, ...]:
    derivatives, _, _ = theta_series(z, tau, order=4)
    v, d1, d2, d3, d4 = derivatives
    l1, l2, l3, l4 = d1 / v, d2 / v, d3 / v, d4 / v
    return (
        l1,
        l2 - l1 * l1,
        l3 - 3 * l2 * l1 + 2 * l1**3,
        l4 - 4 * l3 * l1 - 3 * l2 * l2 + 12 * l2 * l1 * l1 - 6 * l1**4,
    )


def _eta1(tau: np.ndarray) -> np.ndarray:
    derivatives, _, _ = theta_series(np.zeros_like(tau), tau, order=3)
    return -derivatives[3] / (3 * derivatives[1])


def _invariant_chunk(tau: np.ndarray) -> tuple[np.ndarray, ...]:
    eta1 = _eta1(tau)
    half_periods = np.stack([np.full_like(tau, 0.5), 0.5 * tau, 0.5 * (1 + tau)])
    _, log2, _, _ = _log_derivatives(half_periods, np.broadcast_to(tau, half_periods.shape))
    e1, e2, e3 = -eta1 - log2[0], -eta1 - log2[1], -eta1 - log2[2]
    g2 = 2 * (e1 * e1 + e2 * e2 + e3 * e3)
    g3 = (4.0 / 3.0) * (e1**3 + e2**3 + e3**3)
    eta2 = tau * eta1 - 2j * np.pi
    return eta1, eta2, e1, e2, e3, g2, g3


def invariant_arrays(tau: np.ndarray | complex) -> InvariantArrays:
    """
    Lattice invariants on an array of tau, processed in chunks.

    No floor check here: callers that build the tau array (grids, contour
    nodes) are responsible for staying above min_im.
    """
    tau = np.asarray(tau, dtype=complex)
    flat = tau.reshape(-1)
    parts = [_invariant_chunk(flat[i : i + _CHUNK]) for i in range(0, flat.size, _CHUNK)]
    if parts:
        columns = [np.concatenate([p[c] for p in parts]).reshape(tau.shape) for c in range(7)]
    else:
        columns = [np.zeros(tau.shape, dtype=complex) for _ in range(7)]
    return InvariantArrays(tau, *columns)


def weierstrass_arrays(z: np.ndarray | complex, tau: np.ndarray | complex) -> WeierstrassArrays:
    """wp, wp', wp'' and zeta for broadcastable arrays; no lattice-point check."""
    z, tau = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(tau, dtype=complex))
    if z.size <= _CHUNK:
        return _weierstrass_chunk(z, tau)

    flat_z, flat_tau = z.reshape(-1), tau.reshape(-1)
    parts = [
        _weierstrass_chunk(flat_z[i : i + _CHUNK], flat_tau[i : i + _CHUNK])
        for i in range(0, flat_z.size, _CHUNK)
    ]
    return WeierstrassArrays(*(np.concatenate([p[c] for p in parts]).reshape(z.shape) for c in range(4)))


def _weierstrass_chunk(z: np.ndarray, tau: np.ndarray) -> WeierstrassArrays:
    s = z.imag / tau.imag
    r = z.real - s * tau.real
    m = np.floor(r)
    n = np.floor(s)
    z_red = z - m - n * tau

    eta1 = _eta1(tau)
    l1, l2, l3, l4 = _log_derivatives(z_red, tau)
    zeta = eta1 * z - 2j * np.pi * n + l1
    return WeierstrassArrays(wp=-eta1 - l2, wp1=-l3, wp2=-l4, zeta=zeta)


@lru_cache(maxsize=4096)
def _invariants_cached(re: float, im: float, series_depth: int, tail: float) -> LatticeInvariants:
    tau = ModuliPoint(re, im)
    eta1, eta2, e1, e2, e3, g2, g3 = (complex(column[0]) for column in _invariant_chunk(np.array([tau.tau])))
    inv = LatticeInvariants(e1=e1, e2=e2, e3=e3, g2=g2, g3=g3, eta1=eta1, eta2=eta2, tau=tau)

    # eta_1 = 2 zeta(1/2), i.e. theta_1'(1/2) = 0
    zeta_half = complex(weierstrass_arrays(0.5, tau.tau).zeta)
    if abs(2 * zeta_half - eta1) > 1e-9 * max(1.0, abs(eta1)):
        logger.warning(f"eta1 cross-check off at tau={tau}: 2*zeta(1/2)={2 * zeta_half}, eta1={eta1}")

    return inv


def invariants(tau: ModuliPoint | complex) -> LatticeInvariants:
    """
    e_k, g_2, g_3, eta_1, eta_2 at tau.

    Raises:
        PrecisionException: Im tau below the floor, or the branch values
            not numerically distinct.
    """
    config = get_run_config()
    tau = ModuliPoint.of(tau).require_floor(config.tolerances.min_im)
    inv = _invariants_cached(tau.re, tau.im, config.series_depth, config.tolerances.theta_tail)

    gaps = (abs(inv.e1 - inv.e2), abs(inv.e1 - inv.e3), abs(inv.e2 - inv.e3))
    if min(gaps) < 1e-12 * inv.scale:
        raise PrecisionException(reason=f"branch values coincide numerically at tau={tau}", tau=tau.tau)

    return inv


def checked_point(z: TorusPoint | complex, tau: ModuliPoint) -> TorusPoint:
    point = TorusPoint.of(z, tau)
    eps = get_run_config().tolerances.lattice_eps
    distance = point.lattice_distance(tau)
    if distance < eps:
        raise LatticePointException(distance=distance, eps=eps, z=point.z, tau=tau.tau)
    return point


def weierstrass(z: TorusPoint | complex, tau: ModuliPoint | complex) -> WeierstrassEval:
    """
    wp, wp', wp'' and zeta at z.

    Raises:
        LatticePointException: z within lattice_eps of a lattice point.
    """
    config = get_run_config()
    tau = ModuliPoint.of(tau).require_floor(config.tolerances.min_im)
    point = checked_point(z, tau)
    arrays = weierstrass_arrays(point.z, tau.tau)
    return WeierstrassEval(
        wp=complex(arrays.wp),
        wp_prime=complex(arrays.wp1),
        wp_pp=complex(arrays.wp2),
        zeta=complex(arrays.zeta),
    )


def wp(z: TorusPoint | complex, tau: ModuliPoint | complex) -> complex:
    return weierstrass(z, tau).wp


def wp_prime(z: TorusPoint | complex, tau: ModuliPoint | complex) -> complex:
    return weierstrass(z, tau).wp_prime


def wp_pp(z: TorusPoint | complex, tau: ModuliPoint | complex) -> complex:
    return weierstrass(z, tau).wp_pp


def zeta_w(z: TorusPoint | complex, tau: ModuliPoint | complex) -> complex:
    return weierstrass(z, tau).zeta


def canonical_point(z: complex, tau: ModuliPoint) -> TorusPoint:
    """
    Representative of {z, -z} modulo the lattice.

    Reduced into the cell, then the member with the smaller s (and for
    s = 0 or 1/2 the smaller r) is kept. wp cannot tell z from -z, so this
    only fixes a label.
    """
    first, _, _ = TorusPoint.from_complex(z, tau).reduced(tau)
    second, _, _ = TorusPoint.from_complex(-z, tau).reduced(tau)

    def key(p: TorusPoint) -> tuple[float, float]:
        return (round(p.s, 12), round(p.r, 12))

    return min(first, second, key=key)


def _grid_seed(w: complex, tau: ModuliPoint, size: int = 24) -> complex:
    grid = (np.arange(size) + 0.5) / size
    r, s = np.meshgrid(grid, grid, indexing="ij")
    z = r + s * tau.tau
    values = weierstrass_arrays(z, tau.tau).wp
    index = np.unravel_index(np.argmin(np.abs(values - w)), values.shape)
    return complex(z[index])


def wp_inverse(
    w: complex,
    tau: ModuliPoint | complex,
    seed: complex | None = None,
) -> TorusPoint:
    """
    A solution z of wp(z) = w, by Newton iteration.

    Seeded from a coarse grid over the cell when no seed is given. The
    result is normalised by canonical_point.

    Raises:
        ConvergenceException: no root after newton_max_iter steps, best
            candidate attached.
    """
    config = get_run_config()
    tau = ModuliPoint.of(tau).require_floor(config.tolerances.min_im)
    w = complex(w)
    target = config.tolerances.wp_inverse * max(1.0, abs(w))

    z = complex(seed) if seed is not None else _grid_seed(w, tau)
    best_z, best_residual = z, math.inf

    for iteration in range(config.newton_max_iter):
        arrays = weierstrass_arrays(z, tau.tau)
        residual = complex(arrays.wp) - w
        if abs(residual) < best_residual:
            best_z, best_residual = z, abs(residual)
        if abs(residual) < target:
            logger.debug(f"wp_inverse({w}) converged in {iteration} steps at z={z}")
            return canonical_point(z, tau)

        derivative = complex(arrays.wp1)
        if derivative == 0 or not cmath.isfinite(derivative):
            break
        z = z - residual / derivative

    raise ConvergenceException(
        iterations=config.newton_max_iter,
        best_candidate=best_z,
        residual=best_residual,
        user_message=f"wp(z) = {w} could not be solved at tau={tau}",
        tau=tau.tau,
    )
