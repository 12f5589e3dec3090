import logging
import math
from collections import defaultdict
from typing import Callable, Iterable

import numpy as np

from torus_zeros.config.run_config import RunConfig, get_run_config
from torus_zeros.curves.fields import field_matches_determinant
from torus_zeros.exceptions.base import TorusZerosException
from torus_zeros.exceptions.numerical import SingularInputException
from torus_zeros.exceptions.validation import UnknownSymbolException
from torus_zeros.green.gradient import green_grad, trivial_critical_points
from torus_zeros.green.hessian import all_hessians, half_period_identity, pair_hessian
from torus_zeros.kernel.derivatives import tau_derivatives, wp_dtau
from torus_zeros.kernel.weierstrass import invariant_arrays, invariants, weierstrass, weierstrass_arrays
from torus_zeros.models.enums import DegeneracyCurveId, PhiBranch, Suite
from torus_zeros.models.hessian import HessianMatrix
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, ModularMatrix, ModuliPoint, Rectangle
from torus_zeros.models.painleve import RiccatiFamily
from torus_zeros.models.report import CheckResult, Report
from torus_zeros.moduli.functions import (
    f_cap,
    f_cap_dtau,
    f_cap_evaluator,
    f_cap_theta_route,
    f_dtau,
    family_evaluator,
    g2_evaluator,
    lemma_determinant,
    phi,
    phi_arrays,
    phi_dtau,
)
from torus_zeros.moduli.orbit import RHO, eta_transform, s_orbit
from torus_zeros.painleve.okamoto import (
    closed_form_deviations,
    hamilton_residuals,
    hamiltonian_K,
    hamiltonian_gradient,
    level1_state,
    okamoto_deviation,
)
from torus_zeros.painleve.riccati import (
    pole_locations,
    pole_winding,
    pvi_residual,
    random_path,
    riccati_residual,
    t_of_tau,
)
from torus_zeros.utils.cauchy import cauchy_expansion
from torus_zeros.utils.sampling import sample_C, sample_taus, sample_torus_point
from torus_zeros.zeros.contour import circle_winding
from torus_zeros.zeros.locate import scan_zeros, verdict_from_scan, verify_simple

logger = logging.getLogger(__name__)

# closed-value anchors at tau = i and tau = rho
_ANCHOR = 1e-12
_ANCHOR_RHO = 1e-11
# pole scans for the simplicity check of lambda's poles
_POLE_RECT = Rectangle(-0.5, 0.5, 0.5, 1.5)
# orbit points and located zeros of g_2 are matched within this distance
_ORBIT_MATCH = 1e-6


def _relative(a: complex, b: complex, floor: float = 1.0) -> float:
    return abs(a - b) / max(floor, abs(b))


class _Worst:
    """Largest value seen per check name, with the sample it came from."""

    def __init__(self):
        self.values: dict[str, float] = {}
        self.where: dict[str, dict] = {}
        self.counts: dict[str, int] = defaultdict(int)

    def add(self, name: str, value: float, **where):
        value = float(value)
        self.counts[name] += 1
        if name not in self.values or not value <= self.values[name]:
            self.values[name] = value
            self.where[name] = where

    def below(self, tolerances: dict[str, float]) -> list[CheckResult]:
        return [
            CheckResult.below(name, self.values[name], tolerances[name], samples=self.counts[name], at=self.where[name])
            for name in sorted(self.values)
        ]


class _Least(_Worst):
    """Smallest value seen per check name."""

    def add(self, name: str, value: float, **where):
        value = float(value)
        self.counts[name] += 1
        if name not in self.values or value < self.values[name]:
            self.values[name] = value
            self.where[name] = where

    def above(self, floors: dict[str, float]) -> list[CheckResult]:
        return [
            CheckResult.above(name, self.values[name], floors[name], samples=self.counts[name], at=self.where[name])
            for name in sorted(self.values)
        ]


def _failed(name: str, error: TorusZerosException, **detail) -> CheckResult:
    logger.warning(f"check {name} failed with {type(error).__name__}: {error.technical_message}")
    return CheckResult(
        name=name,
        passed=False,
        value=math.inf,
        detail={"error": type(error).__name__, "message": error.user_message, **detail},
    )


def _cauchy(f: Callable[[np.ndarray], np.ndarray], tau: ModuliPoint, order: int = 1):
    return cauchy_expansion(f, tau.tau, order=order)


class VerificationService:
    """
    Seeded property suites. Failed checks become pass=false records; only
    configuration errors raise.
    """

    def __init__(self, config: RunConfig | None = None):
        self.config = config or get_run_config()
        self.tol = self.config.tolerances
        self.suites: dict[Suite, Callable[[np.random.Generator], list[CheckResult]]] = {
            Suite.IDENTITIES: self._identities,
            Suite.DERIVATIVES: self._derivatives,
            Suite.RICCATI0: lambda rng: self._riccati(rng, level=0),
            Suite.RICCATI1: lambda rng: self._riccati(rng, level=1),
            Suite.OKAMOTO: self._okamoto,
            Suite.HESSIAN: self._hessian,
            Suite.LEMMA22: self._lemma22,
            Suite.PVI: self._pvi,
            Suite.UNIVALENCE: self._univalence,
            Suite.ORBIT: self._orbit,
        }

    def run(self, suite: Suite | str) -> Report:
        try:
            suite = Suite(suite)
        except ValueError:
            raise UnknownSymbolException(symbol=str(suite), known=[s.value for s in Suite], kind="suite")

        rng = np.random.default_rng(self.config.seed)
        logger.info(f"running suite {suite.value} with seed {self.config.seed}")
        checks = self.suites[suite](rng)
        report = Report.from_checks(f"verify {suite.value}", self.config.to_dict(), checks, suite=suite.value)
        logger.info(f"suite {suite.value}: {len(checks)} checks, pass={report.passed}")
        return report

    def _taus(self, rng: np.random.Generator, count: int) -> list[ModuliPoint]:
        return sample_taus(rng, self.config.region, count)

    # identities

    def _anchors(self) -> list[CheckResult]:
        at_i = invariants(1j)
        at_rho = invariants(RHO)
        return [
            CheckResult.below("anchor eta1(i) = pi", abs(at_i.eta1 - math.pi), _ANCHOR),
            CheckResult.below("anchor eta1(rho) = 2 pi / sqrt 3", abs(at_rho.eta1 - 2 * math.pi / math.sqrt(3)), _ANCHOR_RHO),
            CheckResult.below("anchor g2(rho) = 0", abs(at_rho.g2), self.tol.identity),
            CheckResult.below("anchor g3(i) = 0", abs(at_i.g3), self.tol.identity),
            CheckResult.below("anchor e3(i) = 0", abs(at_i.e3), self.tol.identity),
            CheckResult.below("anchor t(i) = 1/2", abs(t_of_tau(1j) - 0.5), _ANCHOR),
        ]

    def _identities(self, rng: np.random.Generator) -> list[CheckResult]:
        worst = _Worst()
        shift = ModularMatrix(1, 1, 0, 1)
        inversion = ModularMatrix(0, -1, 1, 0)

        for tau in self._taus(rng, self.config.identity_samples):
            inv = invariants(tau)
            for name, value in inv.residuals().items():
                worst.add(name, value, tau=tau.to_dict())

            z = sample_torus_point(rng, tau)
            w = weierstrass(z, tau)
            ode_scale = max(abs(w.wp_prime) ** 2, 4 * abs(w.wp) ** 3, abs(inv.g2 * w.wp), abs(inv.g3))
            worst.add("wp_ode", abs(w.wp_prime**2 - (4 * w.wp**3 - inv.g2 * w.wp - inv.g3)) / ode_scale, tau=tau.to_dict())
            second_scale = max(abs(w.wp_pp), 6 * abs(w.wp) ** 2, abs(inv.g2) / 2)
            worst.add("wp_second_order", abs(w.wp_pp - (6 * w.wp**2 - inv.g2 / 2)) / second_scale, tau=tau.to_dict())

            plus_one = weierstrass(z + 1, tau)
            plus_tau = weierstrass(z + tau.tau, tau)
            zeta_scale = max(1.0, abs(w.zeta))
            worst.add("zeta_quasi_period_1", abs(plus_one.zeta - w.zeta - inv.eta1) / zeta_scale, tau=tau.to_dict())
            worst.add("zeta_quasi_period_tau", abs(plus_tau.zeta - w.zeta - inv.eta2) / zeta_scale, tau=tau.to_dict())
            worst.add("wp_periodicity", _relative(plus_tau.wp, w.wp), tau=tau.to_dict())

            for k in (1, 2, 3):
                worst.add("F_theta_route", _relative(f_cap_theta_route(k, tau), f_cap(k, tau)), tau=tau.to_dict(), k=k)

            eta2, eta1 = eta_transform(shift, tau)
            shifted = invariants(tau.tau + 1)
            worst.add("eta_transform_T", max(_relative(eta1, shifted.eta1), _relative(eta2, shifted.eta2)), tau=tau.to_dict())
            image = inversion.act(tau.tau)
            if image.imag >= self.tol.min_im * 4:
                eta2, eta1 = eta_transform(inversion, tau)
                direct = invariants(image)
                worst.add("eta_transform_S", max(_relative(eta1, direct.eta1), _relative(eta2, direct.eta2)), tau=tau.to_dict())

        tolerances = defaultdict(lambda: self.tol.identity)
        tolerances.update({"legendre": self.tol.legendre, "wp_ode": self.tol.wp_ode, "wp_second_order": self.tol.wp_ode})
        return self._anchors() + worst.below(tolerances)

    # derivatives

    def _derivatives(self, rng: np.random.Generator) -> list[CheckResult]:
        worst = _Worst()
        columns = ("eta1", "e1", "e2", "e3", "g2", "g3")

        for tau in self._taus(rng, self.config.derivative_samples):
            analytic = tau_derivatives(tau)
            expected = dict(zip(columns, (analytic.deta1, analytic.de1, analytic.de2, analytic.de3, analytic.dg2, analytic.dg3)))
            for column in columns:
                oracle = _cauchy(lambda t, c=column: getattr(invariant_arrays(t), c), tau)
                worst.add(f"d{column}/dtau", _relative(expected[column], oracle.derivative(1)), tau=tau.to_dict())

            z = sample_torus_point(rng, tau)
            oracle = _cauchy(lambda t: weierstrass_arrays(z, t).wp, tau)
            worst.add("dwp/dtau", _relative(wp_dtau(z, tau), oracle.derivative(1)), tau=tau.to_dict())

            C = sample_C(rng)
            for k in range(4):
                for c in (ExtendedScalar.infinity(), C):
                    oracle = _cauchy(family_evaluator(k, c).f, tau)
                    scale = max(1.0, abs(oracle.center))
                    worst.add(f"df_{k}/dtau", abs(f_dtau(k, c, tau) - oracle.derivative(1)) / max(scale, abs(oracle.derivative(1))), tau=tau.to_dict(), C=c.to_json())

            for k in (1, 2, 3):
                oracle = _cauchy(f_cap_evaluator(k).f, tau)
                worst.add("dF/dtau", _relative(f_cap_dtau(k, tau), oracle.derivative(1)), tau=tau.to_dict(), k=k)

            for branch in PhiBranch:
                derivative = phi_dtau(branch, tau)
                if derivative.is_infinite:
                    continue
                oracle = _cauchy(lambda t, b=branch: phi_arrays(b, invariant_arrays(t))[0], tau)
                if not oracle.ok(self.tol.cauchy_check):
                    continue
                worst.add("dphi/dtau", _relative(derivative.value, oracle.derivative(1)), tau=tau.to_dict(), branch=branch.value)

        return worst.below(defaultdict(lambda: self.tol.derivative))

    # painleve

    def _families(self, rng: np.random.Generator) -> Iterable[tuple[int, ExtendedScalar]]:
        for k in range(4):
            for _ in range(self.config.c_samples):
                yield k, sample_C(rng)

    def _path_checks(self, rng, level: int, name: str, run, tolerance: float) -> list[CheckResult]:
        checks = []
        for k, C in self._families(rng):
            family = RiccatiFamily.of(level, k, C)
            label = f"{name} k={k} C={C}"
            try:
                path = random_path(family, rng, self.config.region, self.config.path_points)
                report = run(level, k, C, path)
            except TorusZerosException as e:
                checks.append(_failed(label, e, family=family.to_dict()))
                continue
            checks.append(
                CheckResult.below(
                    label,
                    report.max_residual,
                    tolerance,
                    equation=report.equation,
                    evaluated=report.evaluated,
                    skipped=len(report.skipped),
                )
            )
        return checks

    def _pole_checks(self) -> list[CheckResult]:
        checks = []
        for k in range(4):
            family = RiccatiFamily.of(1, k, None)
            try:
                poles = pole_locations(family, _POLE_RECT)
            except TorusZerosException as e:
                checks.append(_failed(f"pole simplicity k={k}", e))
                continue
            for tau0 in poles:
                winding = pole_winding(k, None, tau0)
                gap = max(abs(winding.lambda_winding - 1), abs(winding.t_winding - 1))
                checks.append(CheckResult.below(f"pole simplicity k={k}", gap, self.tol.winding_settle, tau0=tau0))
        return checks

    def _riccati(self, rng: np.random.Generator, level: int) -> list[CheckResult]:
        tolerance = self.tol.riccati0 if level == 0 else self.tol.riccati1
        checks = self._path_checks(rng, level, f"riccati{level}", riccati_residual, tolerance)
        if level == 1:
            checks += self._pole_checks()
        return checks

    def _pvi(self, rng: np.random.Generator) -> list[CheckResult]:
        return self._path_checks(rng, 1, "pvi1", pvi_residual, self.tol.pvi) + self._path_checks(
            rng, 0, "pvi0", pvi_residual, self.tol.pvi
        )

    def _hamiltonian_check(self, worst: _Worst, k: int, C: ExtendedScalar, tau: ModuliPoint):
        state = level1_state(k, C, tau)
        d_lam, d_mu = hamiltonian_gradient(1, state)
        h = 1e-6 * max(1.0, abs(state.lam), abs(state.mu))
        numeric_lam = (hamiltonian_K(1, _moved(state, dlam=h)) - hamiltonian_K(1, _moved(state, dlam=-h))) / (2 * h)
        numeric_mu = (hamiltonian_K(1, _moved(state, dmu=h)) - hamiltonian_K(1, _moved(state, dmu=-h))) / (2 * h)
        scale = max(1.0, abs(d_lam), abs(d_mu))
        worst.add("K gradient", max(abs(numeric_lam - d_lam), abs(numeric_mu - d_mu)) / scale, tau=tau.to_dict(), k=k)

    def _okamoto(self, rng: np.random.Generator) -> list[CheckResult]:
        worst = _Worst()
        skipped = 0
        for _ in range(self.config.okamoto_samples):
            k = int(rng.integers(0, 4))
            C = sample_C(rng)
            tau = self._taus(rng, 1)[0]
            where = {"k": k, "C": C.to_json(), "tau": tau.to_dict()}
            try:
                worst.add("okamoto route equality", okamoto_deviation(k, C, tau), **where)
                for name, value in closed_form_deviations(k, C, tau).items():
                    worst.add(f"closed form {name}", value, **where)
                self._hamiltonian_check(worst, k, C, tau)
                hamilton = hamilton_residuals(k, C, tau)
            except SingularInputException:
                skipped += 1
                continue
            if hamilton is None:
                skipped += 1
                continue
            worst.add("hamilton first", hamilton["first"], **where)
            worst.add("hamilton second", hamilton["second"], **where)
            if "mu_formula" in hamilton:
                worst.add("mu formula", hamilton["mu_formula"], **where)

        if skipped:
            logger.warning(f"okamoto suite: {skipped} samples hit a singular state or a pole")
        tolerances = defaultdict(lambda: self.tol.okamoto)
        tolerances.update(
            {
                "hamilton first": self.tol.hamilton,
                "hamilton second": self.tol.hamilton,
                "mu formula": self.tol.mu_formula,
                "K gradient": self.tol.hamilton,
            }
        )
        return worst.below(tolerances)

    # green function

    def _fd_hessian(self, z1: complex, z2: complex, tau: ModuliPoint) -> float:
        """Central differences of the G_2 gradient against pair_hessian."""
        h = self.tol.fd_hessian_step

        def gradient(point: np.ndarray) -> np.ndarray:
            a, b = complex(point[0], point[1]), complex(point[2], point[3])
            diff = np.array(green_grad(a - b, tau))
            return np.concatenate([diff - 2 * np.array(green_grad(a, tau)), -diff - 2 * np.array(green_grad(b, tau))])

        base = np.array([z1.real, z1.imag, z2.real, z2.imag])
        columns = []
        for i in range(4):
            step = np.zeros(4)
            step[i] = h
            columns.append((gradient(base + step) - gradient(base - step)) / (2 * h))
        numeric = np.column_stack(columns)
        analytic = pair_hessian(z1, z2, tau)
        return float(np.max(np.abs(numeric - analytic)) / max(1.0, np.max(np.abs(analytic))))

    @staticmethod
    def _det_gap(matrix: HessianMatrix, a: float, b: float) -> float:
        return abs(a - b) / max(abs(a), abs(b), 1e-6 * matrix.scale**4)

    def _hessian(self, rng: np.random.Generator) -> list[CheckResult]:
        worst = _Worst()
        for tau in self._taus(rng, self.config.hessian_samples):
            where = {"tau": tau.to_dict()}
            for matrix in all_hessians(tau):
                worst.add(f"det vs closed form {matrix.label}", self._det_gap(matrix, matrix.det, matrix.closed_form), **where)
                worst.add(f"closed vs phi form {matrix.label}", self._det_gap(matrix, matrix.closed_form, matrix.phi_form), **where)
            for k in (1, 2, 3):
                worst.add("half period identity", half_period_identity(k, tau), k=k, **where)
            for curve in (DegeneracyCurveId.C12, DegeneracyCurveId.C13, DegeneracyCurveId.C23):
                worst.add("curve field equals det", field_matches_determinant(curve, tau), curve=curve.value, **where)
            try:
                pairs = trivial_critical_points(tau)
            except TorusZerosException as e:
                logger.warning(f"trivial critical points at {tau} failed: {e.technical_message}")
                continue
            for pair in pairs:
                worst.add("critical residual", pair.residual, kind=pair.kind.value, **where)
            q = pairs[3]
            worst.add("fd hessian", self._fd_hessian(q.a1.z, q.a2.z, tau), **where)

        tolerances = defaultdict(lambda: self.tol.hessian)
        tolerances.update(
            {
                "half period identity": self.tol.identity,
                "critical residual": self.tol.sz15,
                "fd hessian": self.tol.fd_hessian,
            }
        )
        return worst.below(tolerances)

    def _lemma22(self, rng: np.random.Generator) -> list[CheckResult]:
        worst = _Worst()
        least = _Least()
        for tau in self._taus(rng, self.config.hessian_samples):
            scale = invariants(tau).scale
            for k in (1, 2, 3):
                det, product = lemma_determinant(k, tau)
                worst.add("lemma determinant identity", abs(det - product) / max(abs(det), abs(product), scale**4 * 1e-12), tau=tau.to_dict(), k=k)
                least.add("lemma determinant nonzero", abs(product) / scale**4, tau=tau.to_dict(), k=k)

        checks = worst.below(defaultdict(lambda: self.tol.lemma22))
        checks += least.above(defaultdict(lambda: self.tol.lemma_witness))
        for k, C in ((0, None), (1, None), (2, complex(2, 1)), (3, complex(-1, 0.5))):
            label = f"companion witness k={k} C={ExtendedScalar.of(C)}"
            try:
                verdict = verify_simple(k, C, self.config.region)
            except TorusZerosException as e:
                checks.append(_failed(label, e))
                continue
            checks.append(CheckResult.above(label, verdict.min_witness, self.tol.lemma_witness, zeros=len(verdict.zeros)))
        return checks

    # moduli functions

    def _univalence(self, rng: np.random.Generator) -> list[CheckResult]:
        least = _Least()
        for tau in self._taus(rng, self.config.derivative_samples):
            for branch in PhiBranch:
                derivative = phi_dtau(branch, tau)
                if not derivative.is_infinite and not phi(branch, tau).is_infinite:
                    least.add("phi' nonzero", abs(derivative.value), tau=tau.to_dict(), branch=branch.value)
        checks = least.above(defaultdict(lambda: self.tol.simple_floor))

        for k in (1, 2, 3):
            evaluator = f_cap_evaluator(k)
            try:
                scan = scan_zeros(evaluator.f, evaluator.f_prime, self.config.region)
            except TorusZerosException as e:
                checks.append(_failed(f"F_{k} zeros", e))
                continue
            verdict = verdict_from_scan(scan, evaluator.label)
            checks.append(CheckResult.above(f"F_{k} zeros simple", verdict.min_derivative, self.tol.simple_floor, zeros=len(verdict.zeros)))
            for record in verdict.zeros:
                tau = record.location
                half = FamilyIndex(k).half_period(tau.tau)
                second = weierstrass(half, tau).wp_pp
                expected = -1j / (4 * math.pi) * second
                checks.append(CheckResult.below(f"F_{k}' at zero", _relative(f_cap_dtau(k, tau), expected), self.tol.derivative, tau=tau.to_dict()))
                checks.append(CheckResult.above(f"wp''(omega_{k}/2) at zero", abs(second) / invariants(tau).scale ** 2, self.tol.simple_floor, tau=tau.to_dict()))
        return checks

    def _orbit(self, rng: np.random.Generator) -> list[CheckResult]:
        region = self.config.region
        points = s_orbit(region)
        evaluator = g2_evaluator()
        try:
            scan = scan_zeros(evaluator.f, evaluator.f_prime, region)
        except TorusZerosException as e:
            return [_failed("g2 zeros", e)]

        zeros = [r.location.tau for r in scan.records]
        unmatched_orbit = [p for p in points if not any(abs(p.tau - z) < _ORBIT_MATCH for z in zeros)]
        unmatched_zeros = [z for z in zeros if not any(abs(p.tau - z) < _ORBIT_MATCH for p in points)]
        multiplicities = []
        for point in points:
            winding = circle_winding(evaluator.f, evaluator.f_prime, point.tau, 1e-3)
            multiplicities.append({"tau": point.to_dict(), "winding": round(winding.real, 6)})

        logger.info(f"orbit: {len(points)} orbit points, {len(zeros)} g2 zeros in {region}")
        return [
            CheckResult.below("orbit points without a g2 zero", len(unmatched_orbit), 1, points=[p.to_dict() for p in unmatched_orbit]),
            CheckResult.below("g2 zeros off the orbit", len(unmatched_zeros), 1, zeros=unmatched_zeros),
            CheckResult(name="g2 winding at orbit points", passed=True, value=float(len(points)), detail={"multiplicities": multiplicities}),
        ]


def _moved(state, dlam: complex = 0, dmu: complex = 0):
    return type(state)(lam=state.lam + dlam, mu=state.mu + dmu, t=state.t, level=state.level)
