import logging
from pathlib import Path

from torus_zeros.config.run_config import RunConfig, get_run_config
from torus_zeros.curves.emit import emit
from torus_zeros.curves.tracer import decompose_c_pm, gradient_mismatches, min_g2_on_curve, trace
from torus_zeros.models.curves import CurvePolyline, GridSpec
from torus_zeros.models.enums import DegeneracyCurveId, OutputFormat
from torus_zeros.models.moduli import Rectangle
from torus_zeros.models.report import CheckResult, Report

logger = logging.getLogger(__name__)

ALL = "all"


class CurveService:
    """Traces the degeneracy curves, writes the curve files and checks the smoothness witnesses."""

    def __init__(self, config: RunConfig | None = None):
        self.config = config or get_run_config()
        self.tol = self.config.tolerances

    def _grid(self, region: Rectangle | None) -> GridSpec:
        nx, ny = self.config.grid
        return GridSpec(region or self.config.region, nx, ny, self.tol.refine_tol)

    def _formats(self, fmt: OutputFormat) -> list[OutputFormat]:
        if fmt is OutputFormat.JSON:
            return [OutputFormat.CSV, OutputFormat.SVG]
        return [fmt]

    def _curve_checks(self, curve: DegeneracyCurveId, polylines: list[CurvePolyline]) -> list[CheckResult]:
        points = sum(len(p) for p in polylines)
        checks = [
            CheckResult.above(f"{curve.value} nonempty", points, 0, polylines=len(polylines)),
            CheckResult.below(f"{curve.value} residual", max((p.max_residual for p in polylines), default=0.0), self.tol.curve_residual),
            CheckResult.above(f"{curve.value} gradient", min((p.min_grad_norm for p in polylines), default=float("inf")), self.tol.smooth_floor),
        ]
        mismatch = gradient_mismatches(polylines)
        checks.append(CheckResult.below(f"{curve.value} analytic gradient", mismatch, self.tol.gradient_check))
        return checks

    def _trace_one(self, curve: DegeneracyCurveId, grid: GridSpec) -> tuple[list[CurvePolyline], list[CheckResult], dict]:
        if curve.sign is None:
            polylines = trace(curve, grid)
            return polylines, self._curve_checks(curve, polylines), {}

        decomposition = decompose_c_pm(curve.sign, grid)
        polylines = decomposition.polylines
        checks = self._curve_checks(curve, polylines)
        checks += [
            CheckResult.above(f"{curve.value} orbit margin", decomposition.margin, decomposition.required),
            CheckResult.below(f"{curve.value} det on curve", decomposition.det_on_curve, self.tol.curve_det),
            CheckResult.below(f"{curve.value} det on orbit", decomposition.det_on_orbit, self.tol.curve_det),
            CheckResult.above(f"{curve.value} g2 on curve", min_g2_on_curve(polylines), self.tol.lemma_witness),
        ]
        extra = {
            "margin": decomposition.margin,
            "required": decomposition.required,
            "orbit_points": [p.to_dict() for p in decomposition.orbit_points],
        }
        return polylines, checks, extra

    def trace(
        self,
        curve: DegeneracyCurveId | str,
        region: Rectangle | None = None,
        fmt: OutputFormat | str = OutputFormat.JSON,
        output_dir: Path | None = None,
    ) -> Report:
        """
        Trace one curve, or all five for curve="all", and write the files.

        Raises:
            DisjointnessViolationException: a Ctilde curve touches the orbit of rho.
        """
        grid = self._grid(region)
        fmt = OutputFormat(fmt)
        output_dir = Path(output_dir or self.config.output_dir)
        curves = list(DegeneracyCurveId) if curve == ALL else [DegeneracyCurveId(curve)]

        records, checks, combined, files = [], [], [], []
        for current in curves:
            polylines, curve_checks, extra = self._trace_one(current, grid)
            checks += curve_checks
            combined += polylines
            for file_format in self._formats(fmt):
                files.append(str(emit(current.value, polylines, file_format, grid.rect, output_dir)))
            records.append(
                {
                    "curve_id": current.value,
                    "polylines": [p.to_dict() for p in polylines],
                    **extra,
                }
            )

        if curve == ALL and OutputFormat.SVG in self._formats(fmt):
            files.append(str(emit(ALL, combined, OutputFormat.SVG, grid.rect, output_dir)))

        report = Report.from_checks("trace", self.config.to_dict(), checks, files=files)
        logger.info(f"trace {curve}: {len(files)} files, pass={report.passed}")
        return Report(
            command=report.command,
            config_echo=report.config_echo,
            records=records,
            passed=report.passed,
            summary={**report.summary, "checks_detail": report.records},
        )
