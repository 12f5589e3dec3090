"""SL(2,Z) orbit of rho = e^(pi i / 3) and the transformation of the quasi-periods."""

import cmath
import itertools
import logging
import math

from torus_zeros.config.run_config import get_run_config
from torus_zeros.kernel.weierstrass import invariants
from torus_zeros.models.moduli import ModularMatrix, ModuliPoint, Rectangle

logger = logging.getLogger(__name__)

RHO = cmath.exp(1j * math.pi / 3)


def orbit_matrices(height_bound: int):
    """All ModularMatrix with entries bounded by height_bound in absolute value."""
    span = range(-height_bound, height_bound + 1)
    for a, b, c, d in itertools.product(span, repeat=4):
        if a * d - b * c == 1:
            yield ModularMatrix(a, b, c, d)


def s_orbit(region: Rectangle, height_bound: int | None = None) -> list[ModuliPoint]:
    """
    Orbit points (a rho + b) / (c rho + d) inside region.

    Points closer than orbit_dedup are merged, points below the Im tau
    floor are dropped (nothing can be evaluated there). Each point is
    checked to be a zero of g_2; a failure is logged, not raised. Sorted
    by (Im, Re) so reports are stable.
    """
    config = get_run_config()
    height_bound = height_bound if height_bound is not None else config.orbit_height
    tol = config.tolerances

    found: list[complex] = []
    for m in orbit_matrices(height_bound):
        tau = m.act(RHO)
        if not region.contains(tau) or tau.imag < tol.min_im:
            continue
        if any(abs(tau - other) < tol.orbit_dedup for other in found):
            continue
        found.append(tau)

    points = [ModuliPoint.from_complex(t) for t in sorted(found, key=lambda t: (round(t.imag, 9), round(t.real, 9)))]

    for point in points:
        inv = invariants(point)
        if abs(inv.g2) > tol.orbit_g2 * inv.scale**2:
            logger.warning(f"orbit point {point} has |g2| = {abs(inv.g2):.3e}")

    logger.debug(f"s_orbit: {len(points)} points in {region} (height {height_bound})")
    return points


def eta_transform(m: ModularMatrix, tau: ModuliPoint | complex) -> tuple[complex, complex]:
    """
    (eta_2, eta_1) at m.tau from the values at tau.

        (eta_2, eta_1)(m tau) = (c tau + d) [[a, b], [c, d]] (eta_2, eta_1)(tau)
    """
    inv = invariants(tau)
    factor = m.factor(inv.tau.tau)
    eta2 = factor * (m.a * inv.eta2 + m.b * inv.eta1)
    eta1 = factor * (m.c * inv.eta2 + m.d * inv.eta1)
    return eta2, eta1
