"""
Riccati solutions of the sixth Painleve equation lifted to the tau chart.

    t(tau)      = (e_3 - e_1) / (e_2 - e_1)
    lambda(tau) = (wp(p) - e_1) / (e_2 - e_1)

where wp(p) is a rational expression in x = C eta_1 - eta_2, y = C - tau
and the invariants. Level 0 solves PVI(1/8, -1/8, 1/8, 3/8), level 1 solves
PVI(9/8, -1/8, 1/8, 3/8). Every derivative in t is taken in tau and divided
by dt/dtau.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.numerical import NumericalException
from torus_zeros.exceptions.verification import AllPointsSkippedException
from torus_zeros.kernel.derivatives import dtau_arrays, tau_derivatives
from torus_zeros.kernel.weierstrass import InvariantArrays, invariant_arrays, invariants
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, ModuliPoint, Rectangle
from torus_zeros.models.painleve import PathResidual, PviParams, RiccatiFamily, RiccatiReport
from torus_zeros.moduli.functions import lemma_xy, lemma_xy_dtau
from torus_zeros.utils.cauchy import cauchy_expansion
from torus_zeros.utils.workers import parallel_map
from torus_zeros.zeros.contour import phase_winding
from torus_zeros.zeros.locate import locate_zeros

logger = logging.getLogger(__name__)

# radius of the disks cut out of a path around poles of lambda
POLE_EXCISION = 0.02

EQUATIONS = {
    (0, 0): "2t(t-1) l' = -(l^2 - 2t l + t)",
    (0, 1): "2t(t-1) l' = l^2 - 2l + t",
    (0, 2): "2t(t-1) l' = l^2 - t",
    (0, 3): "2t(t-1) l' = l^2 + 2(t-1) l - t",
    (1, 0): "P0(l', l, t) = 0",
    (1, 1): "2t(t-1) l' = 3l^2 - 2l - t",
    (1, 2): "2t(t-1) l' = 3l^2 - 4l + t",
    (1, 3): "2t(t-1) l' = 3l^2 - 2(t+1) l + t",
}


class WpParts(NamedTuple):
    """wp(p) = numerator / denominator, with the monomial scale of the denominator."""

    numerator: np.ndarray
    denominator: np.ndarray
    scale: np.ndarray


class PoleWinding(NamedTuple):
    tau0: complex
    radius: float
    lambda_winding: float  # winding of 1 / lambda around tau0
    t_winding: float  # winding of t - t(tau0) around tau0


@dataclass(frozen=True)
class FamilyFunctions:
    """Vectorized lambda and t of one Riccati family, as Cauchy differentiation needs them."""

    family: RiccatiFamily

    def wp_parts(self, tau) -> WpParts:
        return wp_parts(self.family.level, self.family.k.k, self.family.C, invariant_arrays(tau))

    def lam(self, tau: np.ndarray) -> np.ndarray:
        inv = invariant_arrays(tau)
        parts = wp_parts(self.family.level, self.family.k.k, self.family.C, inv)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (parts.numerator - inv.e1 * parts.denominator) / ((inv.e2 - inv.e1) * parts.denominator)

    def inverse_lam(self, tau: np.ndarray) -> np.ndarray:
        inv = invariant_arrays(tau)
        parts = wp_parts(self.family.level, self.family.k.k, self.family.C, inv)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (inv.e2 - inv.e1) * parts.denominator / (parts.numerator - inv.e1 * parts.denominator)

    @staticmethod
    def t(tau: np.ndarray) -> np.ndarray:
        return t_arrays(invariant_arrays(tau))[0]

    @staticmethod
    def dt(tau: np.ndarray) -> np.ndarray:
        return t_arrays(invariant_arrays(tau))[1]


def t_arrays(inv: InvariantArrays) -> tuple[np.ndarray, np.ndarray]:
    """(t, dt/dtau) by the quotient rule over the e_k derivatives."""
    d = dtau_arrays(inv)
    gap = inv.e2 - inv.e1
    top = inv.e3 - inv.e1
    t = top / gap
    dt = ((d.de3 - d.de1) * gap - top * (d.de2 - d.de1)) / (gap * gap)
    return t, dt


def t_of_tau(tau: ModuliPoint | complex) -> complex:
    inv = invariants(tau)
    return complex((inv.e3 - inv.e1) / (inv.e2 - inv.e1))


def dt_dtau(tau: ModuliPoint | complex) -> complex:
    """
    dt/dtau from the analytic e_k derivatives.

    It never vanishes on the upper half plane; a value below 1e-10 times
    the invariant scale is logged.
    """
    inv = invariants(tau)
    d = tau_derivatives(tau)
    gap = inv.e2 - inv.e1
    top = inv.e3 - inv.e1
    value = complex(((d.de(3) - d.de(1)) * gap - top * (d.de(2) - d.de(1))) / (gap * gap))
    if abs(value) < 1e-10 * max(1.0, abs(top / gap)):
        logger.warning(f"dt/dtau = {value!r} at tau={inv.tau} is numerically zero")
    return value


def wp_parts(level: int, k: int, C: ExtendedScalar, inv) -> WpParts:
    """Numerator and denominator of wp(p) on invariants (scalar or array)."""
    x, y = lemma_xy(C, inv.tau, inv.eta1)
    g2, g3 = inv.g2, inv.g3
    if level == 0 and k == 0:
        numerator, terms = -x, (y,)
    elif level == 0:
        e = inv.e(k)
        numerator = e * x + (g2 / 4 - 2 * e * e) * y
        terms = (x, e * y)
    elif k == 0:
        numerator = -4 * x**3 - g2 * x * y * y + 2 * g3 * y**3
        terms = (12 * x * x * y, g2 * y**3)
    else:
        e = inv.e(k)
        off = g2 / 2 - 3 * e * e
        numerator = off * x + (g2 / 4) * e * y
        terms = (3 * e * x, off * y)

    if len(terms) == 1:
        denominator = terms[0]
    elif level == 1 and k == 0:
        denominator = terms[0] - terms[1]
    else:
        denominator = terms[0] + terms[1]
    denominator = denominator * np.ones_like(numerator)
    scale = np.maximum.reduce([np.abs(np.asarray(t)) * np.ones(np.shape(numerator)) for t in terms])
    return WpParts(numerator, denominator, scale)


def _extended(numerator: complex, denominator: complex, scale: float) -> ExtendedScalar:
    if abs(denominator) <= get_run_config().tolerances.pole * max(scale, abs(numerator)):
        return ExtendedScalar.infinity()
    return ExtendedScalar.finite(numerator / denominator)


def wp_p_formula(
    level: int,
    k: FamilyIndex | int,
    C: ExtendedScalar | complex | None,
    tau: ModuliPoint | complex,
) -> ExtendedScalar:
    """wp(p_C^(k)(tau) | tau) at level 0 or 1; infinity where the denominator vanishes."""
    family = RiccatiFamily.of(level, k, C)
    point = ModuliPoint.of(tau).require_floor(get_run_config().tolerances.min_im)
    parts = wp_parts(family.level, family.k.k, family.C, invariant_arrays(np.array([point.tau])))
    return _extended(complex(parts.numerator[0]), complex(parts.denominator[0]), float(parts.scale[0]))


def lambda_of(
    level: int,
    k: FamilyIndex | int,
    C: ExtendedScalar | complex | None,
    tau: ModuliPoint | complex,
) -> ExtendedScalar:
    wp_value = wp_p_formula(level, k, C, tau)
    if wp_value.is_infinite:
        return wp_value
    inv = invariants(tau)
    return ExtendedScalar.finite((wp_value.value - inv.e1) / (inv.e2 - inv.e1))


def p0_terms(y, x, t) -> tuple:
    """Monomials of the cubic relation P0(y, x, t) between y = lambda' and x = lambda."""
    a = t * (t - 1)
    return (
        8 * a**3 * y**3,
        -4 * a**2 * (3 * x * x + 2 * (t - 2) * x - t) * y * y,
        -2 * a * (x * x - 2 * t * x + t) * (9 * x * x - 2 * (t + 4) * x + t) * y,
        27 * x**6,
        -6 * (7 * t + 10) * x**5,
        (4 * t * t + 101 * t + 32) * x**4,
        4 * t * (2 * t * t - 5 * t - 14) * x**3,
        -3 * t * t * (4 * t - 3) * x * x,
        2 * t * t * (3 * t + 2) * x,
        -(t**3),
    )


def riccati_right_side(level: int, k: int, lam, t):
    """Right side N of 2 t (t - 1) lambda' = N for the quadratic families."""
    if level == 0:
        return {
            0: -(lam * lam - 2 * t * lam + t),
            1: lam * lam - 2 * lam + t,
            2: lam * lam - t,
            3: lam * lam + 2 * (t - 1) * lam - t,
        }[k]
    return {
        1: 3 * lam * lam - 2 * lam - t,
        2: 3 * lam * lam - 4 * lam + t,
        3: 3 * lam * lam - 2 * (t + 1) * lam + t,
    }[k]


def equation_residual(level: int, k: int, lam: complex, dlam: complex, t: complex) -> tuple[float, float]:
    """(|residual|, scale) of the first-order equation of the family at one point."""
    if level == 1 and k == 0:
        terms = p0_terms(dlam, lam, t)
        return abs(sum(terms)), max(abs(term) for term in terms)
    residual = 2 * t * (t - 1) * dlam - riccati_right_side(level, k, lam, t)
    scale = max(1.0, abs(lam) ** 2, abs(dlam) * abs(t * (t - 1)))
    return abs(residual), scale


def pvi_right_side(params: PviParams, lam, dlam, t):
    """lambda_tt as given by PVI(alpha, beta, gamma, delta), with its term magnitudes."""
    first = 0.5 * (1 / lam + 1 / (lam - 1) + 1 / (lam - t)) * dlam * dlam
    second = -(1 / t + 1 / (t - 1) + 1 / (lam - t)) * dlam
    prefactor = lam * (lam - 1) * (lam - t) / (t * t * (t - 1) ** 2)
    bracket = (
        params.alpha
        + params.beta * t / lam**2
        + params.gamma * (t - 1) / (lam - 1) ** 2
        + params.delta * t * (t - 1) / (lam - t) ** 2
    )
    third = prefactor * bracket
    return first + second + third, max(abs(first), abs(second), abs(third))


def _skip_reason(functions: FamilyFunctions, tau: complex) -> str:
    tol = get_run_config().tolerances
    parts = functions.wp_parts(np.array([tau]))
    if abs(parts.denominator[0]) < tol.pole_skip * parts.scale[0]:
        return "pole"
    return ""


def _point_residual(functions: FamilyFunctions, point: ModuliPoint) -> PathResidual:
    family = functions.family
    tol = get_run_config().tolerances
    tau = point.tau

    reason = _skip_reason(functions, tau)
    if reason:
        return PathResidual(tau=point, residual=None, reason=reason)

    expansion = cauchy_expansion(functions.lam, tau, order=1)
    if not expansion.ok(tol.cauchy_check):
        return PathResidual(tau=point, residual=None, reason="cauchy")

    t, dt = (complex(v[0]) for v in t_arrays(invariant_arrays(np.array([tau]))))
    dlam = expansion.derivative(1) / dt
    residual, scale = equation_residual(family.level, family.k.k, expansion.center, dlam, t)
    return PathResidual(tau=point, residual=residual / scale, scale=scale)


def _pvi_point(functions: FamilyFunctions, point: ModuliPoint) -> PathResidual:
    family = functions.family
    tol = get_run_config().tolerances
    tau = point.tau

    reason = _skip_reason(functions, tau)
    if reason:
        return PathResidual(tau=point, residual=None, reason=reason)

    lam_expansion = cauchy_expansion(functions.lam, tau, order=2)
    dt_expansion = cauchy_expansion(functions.dt, tau, order=1)
    if not (lam_expansion.ok(tol.cauchy_check) and dt_expansion.ok(tol.cauchy_check)):
        return PathResidual(tau=point, residual=None, reason="cauchy")

    t = complex(functions.t(np.array([tau]))[0])
    dt, ddt = dt_expansion.center, dt_expansion.derivative(1)
    lam = lam_expansion.center
    dlam = lam_expansion.derivative(1) / dt
    ddlam = (lam_expansion.derivative(2) - dlam * ddt) / (dt * dt)

    with np.errstate(divide="ignore", invalid="ignore"):
        expected, magnitude = pvi_right_side(family.params, lam, dlam, t)
    if not np.isfinite(expected):
        return PathResidual(tau=point, residual=None, reason="singular")
    scale = max(1.0, abs(ddlam), magnitude)
    return PathResidual(tau=point, residual=abs(ddlam - expected) / scale, scale=scale)


def _report(
    family: RiccatiFamily,
    path: list[ModuliPoint],
    results: list[PathResidual],
    equation: str,
) -> RiccatiReport:
    evaluated = [r for r in results if r.residual is not None]
    skipped = [r for r in results if r.residual is None]
    if skipped:
        logger.warning(f"{family}: skipped {len(skipped)} of {len(path)} path points")
    if not evaluated:
        raise AllPointsSkippedException(path_len=len(path), family=str(family))

    worst = max(evaluated, key=lambda r: r.residual)
    logger.debug(f"{family} [{equation}]: max residual {worst.residual:.3e} at {worst.tau}")
    return RiccatiReport(
        family=family,
        path=list(path),
        max_residual=worst.residual,
        residual_scale=worst.scale,
        equation=equation,
        skipped=skipped,
        evaluated=len(evaluated),
        residuals=evaluated,
    )


def riccati_residual(
    level: int,
    k: FamilyIndex | int,
    C: ExtendedScalar | complex | None,
    path: list[ModuliPoint],
) -> RiccatiReport:
    """
    Residual of the first-order equation of the family along a path.

    Residuals are relative to the pointwise scale max(1, |l|^2, |l'| |t(t-1)|),
    or to the largest monomial for the cubic P0. Points near a pole of
    lambda, or where the Cauchy contour sees one, are skipped and listed.

    Raises:
        AllPointsSkippedException: nothing on the path could be evaluated.
    """
    family = RiccatiFamily.of(level, k, C)
    functions = FamilyFunctions(family)
    path = [ModuliPoint.of(p) for p in path]
    results = parallel_map(lambda p: _point_residual(functions, p), path, get_run_config().thread_count)
    return _report(family, path, results, EQUATIONS[(family.level, family.k.k)])


def pvi_residual(
    level: int,
    k: FamilyIndex | int,
    C: ExtendedScalar | complex | None,
    path: list[ModuliPoint],
) -> RiccatiReport:
    """Residual of the full second-order PVI for the family parameters along a path."""
    family = RiccatiFamily.of(level, k, C)
    functions = FamilyFunctions(family)
    path = [ModuliPoint.of(p) for p in path]
    results = parallel_map(lambda p: _pvi_point(functions, p), path, get_run_config().thread_count)
    params = family.params
    equation = f"PVI({params.alpha}, {params.beta}, {params.gamma}, {params.delta})"
    return _report(family, path, results, equation)


def pole_winding(
    k: FamilyIndex | int,
    C: ExtendedScalar | complex | None,
    tau0: ModuliPoint | complex,
    radius: float = 1e-3,
    nodes: int = 256,
) -> PoleWinding:
    """
    Phase windings around a zero tau0 of f_{k,C}.

    Both 1 / lambda and t - t(tau0) wind once around 0 on the circle when
    lambda has a simple pole at t(tau0).
    """
    family = RiccatiFamily.of(1, k, C)
    functions = FamilyFunctions(family)
    tau0 = ModuliPoint.of(tau0).tau
    circle = tau0 + radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)

    lambda_winding = phase_winding(functions.inverse_lam(circle))
    t_winding = phase_winding(functions.t(circle) - t_of_tau(tau0))
    logger.debug(f"pole winding at {tau0}: 1/lambda {lambda_winding:.6f}, t {t_winding:.6f}")
    return PoleWinding(tau0=tau0, radius=radius, lambda_winding=lambda_winding, t_winding=t_winding)


def _denominator_evaluators(family: RiccatiFamily):
    """Denominator of wp(p) and its tau derivative, vectorized."""
    level, k, C = family.level, family.k.k, family.C

    def f(tau: np.ndarray) -> np.ndarray:
        return wp_parts(level, k, C, invariant_arrays(tau)).denominator

    def f_prime(tau: np.ndarray) -> np.ndarray:
        inv = invariant_arrays(tau)
        d = dtau_arrays(inv)
        x, y = lemma_xy(C, inv.tau, inv.eta1)
        dx, dy = lemma_xy_dtau(C, inv.tau, inv.eta1, d.deta1)
        if level == 0 and k == 0:
            return dy * np.ones_like(inv.tau)
        if level == 0:
            e, de = inv.e(k), d.de(k)
            return dx + de * y + e * dy
        if k == 0:
            f0 = 12 * x * x - inv.g2 * y * y
            df0 = 24 * x * dx - d.dg2 * y * y - 2 * inv.g2 * y * dy
            return dy * f0 + y * df0
        e, de = inv.e(k), d.de(k)
        return 3 * de * x + 3 * e * dx + (d.dg2 / 2 - 6 * e * de) * y + (inv.g2 / 2 - 3 * e * e) * dy

    return f, f_prime


def pole_locations(family: RiccatiFamily, rect: Rectangle) -> list[complex]:
    """Poles of lambda in rect, i.e. the zeros of the wp(p) denominator."""
    if family.C.is_infinite and family.level == 0 and family.k.k == 0:
        return []
    f, f_prime = _denominator_evaluators(family)
    return [r.location.tau for r in locate_zeros(f, f_prime, rect)]


def make_path(
    family: RiccatiFamily,
    start: complex,
    end: complex,
    points: int,
) -> list[ModuliPoint]:
    """
    points equally spaced on the segment [start, end], minus those within
    POLE_EXCISION of a pole of lambda.

    The pole scan runs on the segment's bounding box widened by 0.05; if it
    fails the path is returned whole and riccati_residual skips pointwise.
    """
    start, end = complex(start), complex(end)
    taus = start + (end - start) * np.linspace(0.0, 1.0, points)

    box = Rectangle(
        min(start.real, end.real) - 0.05,
        max(start.real, end.real) + 0.05,
        max(min(start.imag, end.imag) - 0.05, 0.5 * min(start.imag, end.imag)),
        max(start.imag, end.imag) + 0.05,
    )
    try:
        poles = pole_locations(family, box)
    except NumericalException as e:
        logger.warning(f"pole scan for {family} on {box} failed, keeping the whole path: {e.user_message}")
        poles = []

    kept = [t for t in taus if all(abs(t - p) > POLE_EXCISION for p in poles)]
    if len(kept) < len(taus):
        logger.info(f"{family}: excised {len(taus) - len(kept)} path points near {len(poles)} poles")
    return [ModuliPoint.from_complex(t) for t in kept]


def random_path(family: RiccatiFamily, rng: np.random.Generator, region: Rectangle, points: int) -> list[ModuliPoint]:
    """A seeded random segment inside region, kept away from the precision floor."""
    floor = max(region.im_min, 0.3)
    top = max(region.im_max, floor + 0.5)
    start = complex(rng.uniform(region.re_min, region.re_max), rng.uniform(floor, top))
    end = complex(rng.uniform(region.re_min, region.re_max), rng.uniform(floor, top))
    if abs(end - start) < 0.2:
        end = start + 0.5j
    return make_path(family, start, end, points)
