"""
Real fields on the upper half plane whose zero sets are the degeneracy curves.

    C_ij:      H = 4/(2 pi)^4 (|f|^2 - (6 pi / b) Re(conj(e_k) f)),   f = f_{k,inf}
    Ctilde_pm: H = |phi|^2 - (2 pi / b) Re(phi),                     phi = eta_1 pm sqrt(g_2/12)

The Ctilde fields leave out the factor |g_2| that makes det D^2 G_2 at
(q_pm, -q_pm) vanish on the orbit of rho. The square root is principal
pointwise.
"""

import logging
import math
from typing import NamedTuple

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.green.hessian import hessian_half_period, q_closed_form
from torus_zeros.kernel.derivatives import DTauArrays, dtau_arrays
from torus_zeros.kernel.weierstrass import InvariantArrays, invariant_arrays
from torus_zeros.models.enums import DegeneracyCurveId, GradientCase, PhiBranch
from torus_zeros.models.moduli import ExtendedScalar, ModuliPoint
from torus_zeros.moduli.functions import f_arrays, f_dtau_arrays, phi_arrays

logger = logging.getLogger(__name__)

_C = 4 / (2 * math.pi) ** 4
_INFINITY = ExtendedScalar.infinity()


class FieldValues(NamedTuple):
    value: np.ndarray
    scale: np.ndarray  # magnitude of the largest term, at least 1


class FieldGradient(NamedTuple):
    gradient: np.ndarray  # (dH/da, dH/db) with tau = a + b i
    case: GradientCase
    scale: float


def _phi_base(sign: int, inv: InvariantArrays) -> np.ndarray:
    return inv.eta1 + sign * np.sqrt(inv.g2 / 12)


def _phi_base_dtau(sign: int, inv: InvariantArrays, d: DTauArrays) -> np.ndarray:
    root = np.sqrt(inv.g2 / 12)
    with np.errstate(divide="ignore", invalid="ignore"):
        return d.deta1 + sign * d.dg2 / (24 * root)


def field_values(curve: DegeneracyCurveId, inv: InvariantArrays) -> FieldValues:
    b = inv.tau.imag
    if curve.complement is not None:
        k = curve.complement
        f = f_arrays(k, _INFINITY, inv)
        e = inv.e(k)
        square = np.abs(f) ** 2
        cross = (6 * math.pi / b) * np.real(np.conj(e) * f)
        scale = _C * np.maximum.reduce([np.ones_like(b), square, np.abs(cross)])
        return FieldValues(_C * (square - cross), scale)

    phi = _phi_base(curve.sign, inv)
    square = np.abs(phi) ** 2
    linear = (2 * math.pi / b) * phi.real
    scale = np.maximum.reduce([np.ones_like(b), square, np.abs(linear)])
    return FieldValues(square - linear, scale)


def field_arrays(curve: DegeneracyCurveId, tau) -> FieldValues:
    """The curve field on an array of tau."""
    return field_values(curve, invariant_arrays(np.asarray(tau, dtype=complex)))


def scalar_field(curve: DegeneracyCurveId | str, tau: ModuliPoint | complex) -> float:
    curve = DegeneracyCurveId(curve)
    point = ModuliPoint.of(tau).require_floor(get_run_config().tolerances.min_im)
    return float(field_arrays(curve, np.array([point.tau])).value[0])


def _half_period_gradient(k: int, inv: InvariantArrays, d: DTauArrays, scale: float) -> FieldGradient:
    b = inv.tau.imag
    f = f_arrays(k, _INFINITY, inv)
    df = f_dtau_arrays(k, _INFINITY, inv, d)
    e, de = inv.e(k), d.de(k)
    floor = get_run_config().tolerances.smooth_floor

    if abs(f) ** 2 < floor * scale / _C:
        # f = 0: differentiate the expanded form directly
        h_a = 2 * np.real(np.conj(f) * df) - (6 * math.pi / b) * np.real(np.conj(de) * f + np.conj(e) * df)
        h_b = (
            -2 * np.imag(np.conj(f) * df)
            + (6 * math.pi / b**2) * np.real(np.conj(e) * f)
            + (6 * math.pi / b) * np.imag(np.conj(e) * df - np.conj(de) * f)
        )
        return FieldGradient(_C * np.array([h_a, h_b]), GradientCase.F_ZERO, scale)

    # H = C |f|^2 Im(phi_k) / b, with d Im(phi)/da = Im phi', d Im(phi)/db = Re phi'
    phi, dphi = phi_arrays(PhiBranch(f"k{k}"), inv)
    im_phi = phi.imag
    h_a = 2 * np.real(np.conj(f) * df) * im_phi / b + abs(f) ** 2 * dphi.imag / b
    h_b = -2 * np.imag(np.conj(f) * df) * im_phi / b + abs(f) ** 2 * (dphi.real / b - im_phi / b**2)
    return FieldGradient(_C * np.array([h_a, h_b]), GradientCase.REGULAR, scale)


def _ctilde_gradient(sign: int, inv: InvariantArrays, d: DTauArrays, scale: float) -> FieldGradient:
    b = inv.tau.imag
    phi = _phi_base(sign, inv)
    dphi = _phi_base_dtau(sign, inv, d)
    floor = get_run_config().tolerances.smooth_floor

    if abs(phi) ** 2 < floor * scale:
        h_a = 2 * np.real(np.conj(phi) * dphi) - (2 * math.pi / b) * dphi.real
        h_b = -2 * np.imag(np.conj(phi) * dphi) + (2 * math.pi / b**2) * phi.real + (2 * math.pi / b) * dphi.imag
        return FieldGradient(np.array([h_a, h_b]), GradientCase.PHI_ZERO, scale)

    # H = |phi|^2 Im(phi_pm) / b with phi_pm = tau - 2 pi i / phi
    developing = inv.tau - 2j * math.pi / phi
    d_developing = 1 + 2j * math.pi * dphi / phi**2
    im_dev = developing.imag
    h_a = 2 * np.real(np.conj(phi) * dphi) * im_dev / b + abs(phi) ** 2 * d_developing.imag / b
    h_b = -2 * np.imag(np.conj(phi) * dphi) * im_dev / b + abs(phi) ** 2 * (d_developing.real / b - im_dev / b**2)
    return FieldGradient(np.array([h_a, h_b]), GradientCase.REGULAR, scale)


def analytic_gradient(curve: DegeneracyCurveId, tau: ModuliPoint | complex) -> FieldGradient:
    """
    (dH/da, dH/db) from the tau-derivatives of the kernel.

    Away from f = 0 (resp. phi = 0) the gradient goes through the
    developing map: dIm(phi)/da = Im phi', dIm(phi)/db = Re phi'.
    """
    point = ModuliPoint.of(tau)
    inv = invariant_arrays(np.array([point.tau]))
    inv = InvariantArrays(*(column[0] for column in inv))
    d = dtau_arrays(inv)
    scale = float(field_values(curve, inv).scale)
    if curve.complement is not None:
        return _half_period_gradient(curve.complement, inv, d, scale)
    return _ctilde_gradient(curve.sign, inv, d, scale)


def numeric_gradient(curve: DegeneracyCurveId, tau: ModuliPoint | complex, step: float | None = None) -> tuple[np.ndarray, float]:
    """
    Central differences at step, with the Richardson gap against step 2h.

    Returns (gradient, relative gap between the two step sizes).
    """
    h = step if step is not None else get_run_config().tolerances.fd_step
    tau = ModuliPoint.of(tau).tau
    offsets = np.array([h, -h, 1j * h, -1j * h, 2 * h, -2 * h, 2j * h, -2j * h])
    values = field_arrays(curve, tau + offsets).value

    fine = np.array([values[0] - values[1], values[2] - values[3]]) / (2 * h)
    coarse = np.array([values[4] - values[5], values[6] - values[7]]) / (4 * h)
    gap = float(np.linalg.norm(fine - coarse) / max(np.linalg.norm(fine), np.finfo(float).tiny))
    return fine, gap


def gradient_witness(curve: DegeneracyCurveId, tau: ModuliPoint | complex) -> tuple[float, float, GradientCase]:
    """
    (|grad H| / scale from finite differences, relative mismatch against
    the analytic gradient, case).
    """
    analytic = analytic_gradient(curve, tau)
    numeric, _ = numeric_gradient(curve, tau)
    norm = float(np.linalg.norm(numeric))
    mismatch = float(np.linalg.norm(numeric - analytic.gradient)) / max(norm, np.finfo(float).tiny)
    return norm / analytic.scale, mismatch, analytic.case


def field_matches_determinant(curve: DegeneracyCurveId, tau: ModuliPoint | complex) -> float:
    """Relative gap between the field and the 4 x 4 Hessian determinant it stands for."""
    if curve.complement is not None:
        i, j = sorted({1, 2, 3} - {curve.complement})
        det = hessian_half_period(i, j, tau).det
        value = scalar_field(curve, tau)
        return abs(det - value) / max(abs(det), abs(value), np.finfo(float).tiny)

    inv = invariant_arrays(np.array([ModuliPoint.of(tau).tau]))
    g2 = complex(inv.g2[0])
    expected = 9 / math.pi**4 * abs(g2) / 12 * scalar_field(curve, tau)
    closed = q_closed_form(curve.sign, tau)
    return abs(expected - closed) / max(abs(expected), abs(closed), np.finfo(float).tiny)
