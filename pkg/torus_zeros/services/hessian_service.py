import logging

import numpy as np

from torus_zeros.config.run_config import RunConfig, get_run_config
from torus_zeros.green.hessian import all_hessians
from torus_zeros.models.moduli import ModuliPoint
from torus_zeros.models.report import CheckResult, Report
from torus_zeros.utils.sampling import sample_taus

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ("re", "im", "label", "det", "closed_form", "phi_form", "closed_form_deviation", "phi_form_deviation")


class HessianTableService:
    """Numerical determinants at the trivial critical points next to their closed forms."""

    def __init__(self, config: RunConfig | None = None):
        self.config = config or get_run_config()

    def rows(self, taus: list[ModuliPoint] | None = None) -> list[dict]:
        if taus is None:
            rng = np.random.default_rng(self.config.seed)
            taus = sample_taus(rng, self.config.region, self.config.hessian_samples)
        rows = []
        for tau in taus:
            for matrix in all_hessians(tau):
                rows.append(
                    {
                        "re": tau.re,
                        "im": tau.im,
                        "label": matrix.label,
                        "det": matrix.det,
                        "closed_form": matrix.closed_form,
                        "phi_form": matrix.phi_form,
                        "closed_form_deviation": matrix.closed_form_deviation,
                        "phi_form_deviation": matrix.phi_form_deviation,
                    }
                )
        logger.info(f"hessian table: {len(rows)} rows at {len(taus)} tau")
        return rows

    def table(self, taus: list[ModuliPoint | complex] | None = None) -> Report:
        if taus is not None:
            taus = [ModuliPoint.of(t).require_floor(self.config.tolerances.min_im) for t in taus]
        rows = self.rows(taus)
        tolerance = self.config.tolerances.hessian
        worst = max((r["closed_form_deviation"] for r in rows), default=0.0)
        checks = [CheckResult.below("det vs closed form", worst, tolerance)]
        report = Report.from_checks("hessian-table", self.config.to_dict(), checks, rows=len(rows))
        return Report(
            command=report.command,
            config_echo=report.config_echo,
            records=rows,
            passed=report.passed,
            summary={**report.summary, "checks_detail": report.records},
        )
