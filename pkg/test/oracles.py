"""Independent reference values: Eisenstein q-series, lattice sums and theta series.

Used only by the tests. Nothing here shares code with the package.
"""

import cmath
import math

import mpmath
import numpy as np

_COEFFICIENTS = {2: -24, 4: 240, 6: -504}


def _divisor_power_sum(n: int, power: int) -> int:
    return sum(d**power for d in range(1, n + 1) if n % d == 0)


def eisenstein(weight: int, tau: complex, terms: int = 80) -> complex:
    """E_2, E_4 or E_6 at tau from the divisor-sum q-expansion, q = e^(2 pi i tau)."""
    q = cmath.exp(2j * math.pi * tau)
    total = 1 + 0j
    power = 1 + 0j
    for n in range(1, terms + 1):
        power *= q
        total += _COEFFICIENTS[weight] * _divisor_power_sum(n, weight - 1) * power
    return total


def g2(tau: complex) -> complex:
    return 4 * math.pi**4 / 3 * eisenstein(4, tau)


def g3(tau: complex) -> complex:
    return 8 * math.pi**6 / 27 * eisenstein(6, tau)


def eta1(tau: complex) -> complex:
    return math.pi**2 / 3 * eisenstein(2, tau)


def _nome(tau: complex):
    return mpmath.exp(1j * mpmath.pi * mpmath.mpc(tau))


def theta1(z: complex, tau: complex) -> complex:
    return complex(mpmath.jtheta(1, mpmath.pi * mpmath.mpc(z), _nome(tau)))


def branch_values(tau: complex) -> tuple[complex, complex, complex]:
    """e_1 = wp(1/2), e_2 = wp(tau/2), e_3 = wp((1+tau)/2) from theta constants."""
    q = _nome(tau)
    t2, t3, t4 = (mpmath.jtheta(n, 0, q) ** 4 for n in (2, 3, 4))
    c = mpmath.pi**2 / 3
    return complex(c * (t3 + t4)), complex(-c * (t2 + t3)), complex(c * (t2 - t4))


def wp(z: complex, tau: complex) -> complex:
    """wp = -(log theta_1)'' - eta_1, derivatives taken by mpmath."""
    q = _nome(tau)
    x = mpmath.pi * mpmath.mpc(z)
    t0 = mpmath.jtheta(1, x, q)
    t1 = mpmath.jtheta(1, x, q, 1)
    t2 = mpmath.jtheta(1, x, q, 2)
    log_second = mpmath.pi**2 * (t2 / t0 - (t1 / t0) ** 2)
    return -complex(log_second) - eta1(tau)


def relative(a: complex, b: complex, floor: float = 1.0) -> float:
    return abs(a - b) / max(abs(a), abs(b), floor)


def _lattice(tau: complex, rows: int) -> np.ndarray:
    m, n = np.meshgrid(np.arange(-rows, rows + 1), np.arange(-rows, rows + 1))
    omega = (m + n * tau).ravel()
    return omega[omega != 0]


def lattice_invariants(tau: complex, rows: int = 300) -> tuple[complex, complex]:
    """(g2, g3) = (60 G_4, 140 G_6) from symmetric row sums over the lattice Z + Z tau."""
    omega = _lattice(tau, rows)
    return complex(60 * np.sum(omega**-4.0)), complex(140 * np.sum(omega**-6.0))


def wp_series(z: complex, tau: complex, rows: int = 300) -> complex:
    """The defining double series 1/z^2 + sum (1/(z - w)^2 - 1/w^2) over a symmetric box."""
    omega = _lattice(tau, rows)
    return complex(1 / z**2 + np.sum(1 / (z - omega) ** 2 - omega**-2.0))


def theta1_series(z: complex, tau: complex, terms: int = 2000) -> complex:
    """2 sum (-1)^n q^((n+1/2)^2) sin((2n+1) pi z), q = e^(i pi tau)."""
    n = np.arange(terms)
    a = 1j * math.pi * tau * (n + 0.5) ** 2
    b = 1j * math.pi * (2 * n + 1) * z
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    # sin written out so that no factor overflows before the product decays
    return complex(-1j * np.sum(signs * (np.exp(a + b) - np.exp(a - b))))
