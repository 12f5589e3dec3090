import logging

import numpy as np

from torus_zeros.config.run_config import RunConfig, get_run_config
from torus_zeros.exceptions.base import TorusZerosException
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, Rectangle
from torus_zeros.models.report import CheckResult, Report
from torus_zeros.models.zeros import SimpleZeroVerdict
from torus_zeros.utils.sampling import sample_C
from torus_zeros.zeros.locate import verify_simple

logger = logging.getLogger(__name__)

FIXED_C = (None, complex(2, 1), complex(-1, 0.5))
SEEDED_C = 5


def verdict_checks(verdict: SimpleZeroVerdict, tolerance_floor: float) -> list[CheckResult]:
    label = verdict.label
    checks = [
        CheckResult(name=f"{label} all simple", passed=verdict.all_simple, value=verdict.min_derivative, tolerance=tolerance_floor),
        CheckResult(name=f"{label} lemma witnesses", passed=verdict.witnesses_ok, value=verdict.min_witness),
        CheckResult(
            name=f"{label} winding equals zero count",
            passed=verdict.winding_total == sum(z.winding for z in verdict.zeros),
            value=float(verdict.winding_total),
        ),
    ]
    if verdict.grid_count is not None:
        checks.append(
            CheckResult(
                name=f"{label} grid count matches",
                passed=verdict.grid_count == verdict.winding_total,
                value=float(verdict.grid_count),
            )
        )
    return checks


class ZeroService:
    """Simple-zero scans of the f_{k,C} families over rectangles."""

    def __init__(self, config: RunConfig | None = None):
        self.config = config or get_run_config()

    def _scan(self, k: int, C: ExtendedScalar, rect: Rectangle) -> tuple[dict, list[CheckResult]]:
        label = f"f_{k},{C}"
        try:
            verdict = verify_simple(k, C, rect, grid=self.config.grid)
        except TorusZerosException as e:
            logger.warning(f"zero scan {label} on {rect} failed: {e.technical_message}")
            failed = CheckResult(
                name=f"{label} scan",
                passed=False,
                value=float("inf"),
                detail={"error": type(e).__name__, "message": e.user_message},
            )
            return {"label": label, "error": e.to_dict()}, [failed]
        return verdict.to_dict(), verdict_checks(verdict, self.config.tolerances.simple_floor)

    def scan(self, k: FamilyIndex | int, C: ExtendedScalar | complex | None, rect: Rectangle | None = None) -> Report:
        rect = rect or self.config.region
        k = FamilyIndex.of(k).k
        C = ExtendedScalar.of(C)
        record, checks = self._scan(k, C, rect)
        report = Report.from_checks("zeros", self.config.to_dict(), checks, zero_count=len(record.get("zeros", [])))
        return Report(
            command=report.command,
            config_echo=report.config_echo,
            records=[record],
            passed=report.passed,
            summary={**report.summary, "checks_detail": report.records},
        )

    def scan_all(self, rect: Rectangle | None = None) -> Report:
        """Every k with C = inf, 2+i, -1+0.5i and five seeded values."""
        rect = rect or self.config.region
        rng = np.random.default_rng(self.config.seed)
        seeded = [sample_C(rng) for _ in range(SEEDED_C)]
        records, checks = [], []
        for k in range(4):
            for C in [ExtendedScalar.of(c) for c in FIXED_C] + seeded:
                record, family_checks = self._scan(k, C, rect)
                records.append(record)
                checks += family_checks
        report = Report.from_checks("zeros all", self.config.to_dict(), checks, families=len(records))
        return Report(
            command=report.command,
            config_echo=report.config_echo,
            records=records,
            passed=report.passed,
            summary={**report.summary, "checks_detail": report.records},
        )
