import logging
import math
from dataclasses import dataclass
from typing import Any, Callable

from torus_zeros.config.run_config import RunConfig, get_run_config
from torus_zeros.exceptions.validation import MissingFieldException, UnknownSymbolException
from torus_zeros.kernel.theta import theta1
from torus_zeros.kernel.weierstrass import invariants, weierstrass
from torus_zeros.models.enums import PhiBranch
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, ModuliPoint
from torus_zeros.models.report import CheckResult, Report
from torus_zeros.moduli.functions import f_cap, f_value, phi
from torus_zeros.moduli.orbit import RHO
from torus_zeros.painleve.riccati import lambda_of, t_of_tau, wp_p_formula

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalRequest:
    tau: ModuliPoint
    z: complex | None = None
    k: int | None = None
    C: ExtendedScalar = ExtendedScalar.infinity()
    level: int = 0


def _theta1(r: EvalRequest) -> dict:
    value = theta1(r.z, r.tau)
    return {"value": value.value, "d1": value.d1, "d2": value.d2, "d3": value.d3, "terms_used": value.terms_used}


def _weierstrass(attribute: str) -> Callable[[EvalRequest], Any]:
    return lambda r: getattr(weierstrass(r.z, r.tau), attribute)


def _invariant(attribute: str) -> Callable[[EvalRequest], Any]:
    return lambda r: getattr(invariants(r.tau), attribute)


def _branch_value(r: EvalRequest, branch: PhiBranch) -> ExtendedScalar:
    return phi(branch, r.tau)


# symbol -> (needs z, needs k, evaluator)
SYMBOLS: dict[str, tuple[bool, bool, Callable[[EvalRequest], Any]]] = {
    "theta1": (True, False, _theta1),
    "wp": (True, False, _weierstrass("wp")),
    "wp_prime": (True, False, _weierstrass("wp_prime")),
    "wp_pp": (True, False, _weierstrass("wp_pp")),
    "zeta": (True, False, _weierstrass("zeta")),
    "e1": (False, False, _invariant("e1")),
    "e2": (False, False, _invariant("e2")),
    "e3": (False, False, _invariant("e3")),
    "g2": (False, False, _invariant("g2")),
    "g3": (False, False, _invariant("g3")),
    "eta1": (False, False, _invariant("eta1")),
    "eta2": (False, False, _invariant("eta2")),
    "invariants": (False, False, lambda r: invariants(r.tau).to_dict()),
    "f": (False, True, lambda r: f_value(r.k, r.C, r.tau)),
    "F": (False, True, lambda r: f_cap(r.k, r.tau)),
    "phi_plus": (False, False, lambda r: _branch_value(r, PhiBranch.PLUS)),
    "phi_minus": (False, False, lambda r: _branch_value(r, PhiBranch.MINUS)),
    "phi_k": (False, True, lambda r: _branch_value(r, PhiBranch(f"k{r.k}"))),
    "t": (False, False, lambda r: t_of_tau(r.tau)),
    "wp_p": (False, True, lambda r: wp_p_formula(r.level, r.k, r.C, r.tau)),
    "lambda": (False, True, lambda r: lambda_of(r.level, r.k, r.C, r.tau)),
}


# closed values of the invariants at the elliptic points i and rho
ANCHORS: dict[complex, dict[str, complex]] = {
    1j: {"eta1": math.pi, "g3": 0.0, "e3": 0.0},
    RHO: {"eta1": 2 * math.pi / math.sqrt(3), "g2": 0.0},
}
_ANCHOR_MATCH = 1e-12


def anchor_checks(symbol: str, tau: ModuliPoint, tolerance: float) -> list[CheckResult]:
    """
    Checks of the closed invariant values when tau is i or rho.

    Applies to the anchored invariant itself and to "invariants"; every
    other symbol or point gets no checks.
    """
    checks = []
    for anchor, values in ANCHORS.items():
        if abs(tau.tau - anchor) > _ANCHOR_MATCH:
            continue
        inv = invariants(tau)
        for name, expected in values.items():
            if symbol not in (name, "invariants"):
                continue
            error = abs(getattr(inv, name) - expected) / max(1.0, abs(expected))
            checks.append(CheckResult.below(f"{name} closed value", error, tolerance, expected=expected))
    return checks


def _finite(value: Any) -> bool:
    if isinstance(value, ExtendedScalar):
        return True
    if isinstance(value, dict):
        return all(_finite(v) for v in value.values())
    if isinstance(value, (complex, float, int)):
        return math.isfinite(abs(value))
    return True


def _payload(value: Any) -> Any:
    if isinstance(value, ExtendedScalar):
        return value.to_json()
    return value


class EvaluationService:
    """Point evaluation of the named special functions."""

    def __init__(self, config: RunConfig | None = None):
        self.config = config or get_run_config()

    def evaluate(
        self,
        symbol: str,
        tau: ModuliPoint | complex,
        z: complex | None = None,
        k: int | None = None,
        C: ExtendedScalar | complex | None = None,
        level: int = 0,
    ) -> Report:
        """
        Raises:
            UnknownSymbolException: symbol is not in SYMBOLS.
            MissingFieldException: z or k missing for a symbol that needs it.
        """
        if symbol not in SYMBOLS:
            raise UnknownSymbolException(symbol=symbol, known=SYMBOLS.keys())
        needs_z, needs_k, evaluator = SYMBOLS[symbol]
        if needs_z and z is None:
            raise MissingFieldException(field="z")
        if needs_k and k is None:
            raise MissingFieldException(field="k")

        request = EvalRequest(
            tau=ModuliPoint.of(tau).require_floor(self.config.tolerances.min_im),
            z=None if z is None else complex(z),
            k=None if k is None else FamilyIndex.of(k).k,
            C=ExtendedScalar.of(C),
            level=level,
        )
        value = evaluator(request)
        logger.info(f"eval {symbol} at tau={request.tau}: {value}")

        record = {"symbol": symbol, "tau": request.tau.to_dict(), "value": _payload(value)}
        if needs_z:
            record["z"] = request.z
        if needs_k:
            record.update({"k": request.k, "C": request.C.to_json(), "level": level})
        finite = _finite(value)
        anchors = anchor_checks(symbol, request.tau, self.config.tolerances.identity)
        failed = [c.name for c in anchors if not c.passed]
        if failed:
            logger.warning(f"eval {symbol} at tau={request.tau}: closed values missed: {failed}")
        summary = {"symbol": symbol, "finite": finite}
        if anchors:
            summary["anchors"] = [c.to_dict() for c in anchors]
            summary["failed"] = failed
        return Report(
            command="eval",
            config_echo=self.config.to_dict(),
            records=[record],
            passed=finite and not failed,
            summary=summary,
        )
