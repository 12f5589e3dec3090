"""
Closed-form tau-derivatives of the lattice invariants.

    eta_1' = (i / 4 pi) (2 eta_1^2 - g_2 / 6)
    e_k'   = (-i / 4 pi) (4 (e_k - eta_1) e_k - 2 g_2 / 3)
    g_2'   = (-i / pi) (3 g_3 - 2 eta_1 g_2)
    g_3'   = (-i / pi) (g_2^2 / 6 - 3 eta_1 g_3)

The same expressions serve python complex scalars and numpy arrays.
"""

import logging
from typing import NamedTuple

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.kernel.weierstrass import (
    InvariantArrays,
    checked_point,
    invariants,
    weierstrass_arrays,
)
from torus_zeros.models.lattice import DTauInvariants
from torus_zeros.models.moduli import ModuliPoint, TorusPoint

logger = logging.getLogger(__name__)


class DTauArrays(NamedTuple):
    deta1: np.ndarray
    de1: np.ndarray
    de2: np.ndarray
    de3: np.ndarray
    dg2: np.ndarray
    dg3: np.ndarray

    def de(self, k: int) -> np.ndarray:
        return (self.de1, self.de2, self.de3)[k - 1]


def _deta1(eta1, g2):
    return (1j / (4 * np.pi)) * (2 * eta1 * eta1 - g2 / 6)


def _de(e, eta1, g2):
    return (-1j / (4 * np.pi)) * (4 * (e - eta1) * e - 2 * g2 / 3)


def _dg2(eta1, g2, g3):
    return (-1j / np.pi) * (3 * g3 - 2 * eta1 * g2)


def _dg3(eta1, g2, g3):
    return (-1j / np.pi) * (g2 * g2 / 6 - 3 * eta1 * g3)


def tau_derivatives(tau: ModuliPoint | complex) -> DTauInvariants:
    """Analytic eta_1', e_k', g_2', g_3' at tau."""
    inv = invariants(tau)
    return DTauInvariants(
        deta1=complex(_deta1(inv.eta1, inv.g2)),
        de1=complex(_de(inv.e1, inv.eta1, inv.g2)),
        de2=complex(_de(inv.e2, inv.eta1, inv.g2)),
        de3=complex(_de(inv.e3, inv.eta1, inv.g2)),
        dg2=complex(_dg2(inv.eta1, inv.g2, inv.g3)),
        dg3=complex(_dg3(inv.eta1, inv.g2, inv.g3)),
        tau=inv.tau,
    )


def dtau_arrays(inv: InvariantArrays) -> DTauArrays:
    """tau_derivatives on invariant arrays."""
    return DTauArrays(
        deta1=_deta1(inv.eta1, inv.g2),
        de1=_de(inv.e1, inv.eta1, inv.g2),
        de2=_de(inv.e2, inv.eta1, inv.g2),
        de3=_de(inv.e3, inv.eta1, inv.g2),
        dg2=_dg2(inv.eta1, inv.g2, inv.g3),
        dg3=_dg3(inv.eta1, inv.g2, inv.g3),
    )


def wp_dtau(z: TorusPoint | complex, tau: ModuliPoint | complex) -> complex:
    """
    d wp(z | tau) / d tau with z held fixed as a complex number.

        (-i / 4 pi) [2 (zeta - z eta_1) wp' + 4 (wp - eta_1) wp - 2 g_2 / 3]

    Raises:
        LatticePointException: z within lattice_eps of a lattice point.
    """
    config = get_run_config()
    tau = ModuliPoint.of(tau).require_floor(config.tolerances.min_im)
    point = checked_point(z, tau)
    inv = invariants(tau)
    w = weierstrass_arrays(point.z, tau.tau)
    return complex(wp_dtau_arrays(point.z, w.wp, w.wp1, w.zeta, inv.eta1, inv.g2))


def wp_dtau_arrays(z, wp, wp1, zeta, eta1, g2):
    return (-1j / (4 * np.pi)) * (2 * (zeta - z * eta1) * wp1 + 4 * (wp - eta1) * wp - 2 * g2 / 3)
