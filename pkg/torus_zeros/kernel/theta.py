"""Odd Jacobi theta function theta_1(z | tau) and its z-derivatives.

theta_1(z) = -i * sum_n (-1)^n q^((n+1/2)^2) e^((2n+1) pi i z),  q = e^(pi i tau)

Periods: theta_1(z + 1) = -theta_1(z). The series is summed over a window
of n centred on the dominant term for the given Im z, so the same code
serves z anywhere in a strip of height a few Im tau.
"""

import logging
import math

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.numerical import DomainException, PrecisionException
from torus_zeros.models.lattice import ThetaEval
from torus_zeros.models.moduli import ModuliPoint

logger = logging.getLogger(__name__)

# exponent headroom: terms below e^-40 of the peak are negligible even after
# the derivative weights ((2n+1) pi)^4 are applied
_TAIL_EXPONENT = 40.0


def _initial_half_width(b_min: float) -> int:
    return int(math.ceil(math.sqrt(_TAIL_EXPONENT / (math.pi * b_min)))) + 1


def theta_series(
    z: np.ndarray | complex,
    tau: np.ndarray | complex,
    order: int = 4,
) -> tuple[list[np.ndarray], np.ndarray, int]:
    """
    Scaled theta_1 derivatives for broadcastable arrays z and tau.

    Returns (derivatives, log_scale, terms_used) where derivatives[m] is the
    m-th z-derivative divided by exp(log_scale). Ratios of derivatives, which
    is all the Weierstrass functions need, are unaffected by the scaling.

    Raises:
        PrecisionException: if the configured series depth cannot reach the
            tail tolerance.
    """
    config = get_run_config()
    max_terms = config.series_depth
    tail_tol = config.tolerances.theta_tail

    z, tau = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(tau, dtype=complex))
    b = tau.imag
    s = z.imag / b
    n0 = np.round(-0.5 - s).astype(np.int64)

    half = _initial_half_width(float(np.min(b)))
    while True:
        if 2 * half + 1 > max_terms:
            raise PrecisionException(
                reason=f"theta series needs more than {max_terms} terms (Im tau={float(np.min(b)):g})"
            )

        n = n0[..., None] + np.arange(-half, half + 1)
        k = 2 * n + 1
        exponent = 1j * np.pi * (tau[..., None] * (n + 0.5) ** 2 + k * z[..., None])
        shift = np.max(exponent.real, axis=-1)
        magnitudes = np.exp(exponent.real - shift[..., None])

        edge_weight = (np.pi * np.maximum(np.abs(k[..., 0]), np.abs(k[..., -1]))) ** order
        edge = np.maximum(magnitudes[..., 0], magnitudes[..., -1]) * edge_weight
        if np.all(edge <= tail_tol):
            break
        half += 2

    sign = np.where(n % 2 == 0, 1.0, -1.0)
    terms = -1j * sign * np.exp(exponent - shift[..., None])
    factor = 1j * np.pi * k

    derivatives = []
    weighted = terms
    for _ in range(order + 1):
        derivatives.append(np.sum(weighted, axis=-1))
        weighted = weighted * factor

    return derivatives, shift, int(2 * half + 1)


def theta1(z: complex, tau: ModuliPoint | complex) -> ThetaEval:
    """
    theta_1 and its first four z-derivatives at one point.

    Raises:
        PrecisionException: Im tau below the configured floor.
        DomainException: |Im z| beyond theta_window * Im tau; reduce z first.
    """
    config = get_run_config()
    tau = ModuliPoint.of(tau).require_floor(config.tolerances.min_im)
    z = complex(z)

    window = config.tolerances.theta_window * tau.im
    if abs(z.imag) > window:
        raise DomainException(
            reason=f"|Im z| = {abs(z.imag):g} exceeds {window:g}; reduce z modulo the lattice",
            z=z,
            tau=tau.tau,
        )

    derivatives, shift, terms_used = theta_series(z, tau.tau, order=4)
    scale = np.exp(shift)
    values = [complex(d * scale) for d in derivatives]
    if not all(np.isfinite(v) for v in values):
        raise PrecisionException(reason=f"theta_1 overflows at z={z}, tau={tau}", z=z, tau=tau.tau)

    return ThetaEval(
        value=values[0],
        d1=values[1],
        d2=values[2],
        d3=values[3],
        d4=values[4],
        terms_used=terms_used,
    )
