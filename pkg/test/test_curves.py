"""Degeneracy curve tracer test suite.

Tests:
    1. Curve fields equal the Hessian determinants they stand for
    2. Analytic field gradients against finite differences
    3. Tracing Ctilde_plus across Re tau = 1/2
    4. Stability of a trace under grid refinement
    5. C_plus decomposition away from the orbit of rho
    6. CSV and SVG curve files
    7. Grid and format validation
    8. Expanded gradient forms used near f = 0 and phi = 0
    9. Failing crossings on C_ij curves are kept
"""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from torus_zeros.config.run_config import RunConfig, init_run_config
from torus_zeros.curves.emit import CSV_COLUMNS, curve_filename, emit, read_csv, region_hash
from torus_zeros.curves.fields import field_matches_determinant, gradient_witness, scalar_field
from torus_zeros.curves.tracer import (
    Crossing,
    decompose_c_pm,
    gradient_mismatches,
    min_g2_on_curve,
    regrid_stability,
    trace,
    zero_crossings,
)
from torus_zeros.exceptions.validation import InvalidFormatException, InvalidRangeException
from torus_zeros.models.curves import CurvePolyline, GridSpec
from torus_zeros.models.enums import DegeneracyCurveId, GradientCase, OutputFormat
from torus_zeros.models.moduli import ModuliPoint, Rectangle
from torus_zeros.services.curve_service import CurveService

TAUS = [0.21 + 0.93j, -0.37 + 1.45j, 0.05 + 2.1j]
CROSSING = Rectangle(0.3, 0.7, 0.95, 1.4)
PHI_MINUS_SMALL = 0.05 + 2.1j


def _polylines():
    first = CurvePolyline(
        curve_id=DegeneracyCurveId.C12,
        points=[ModuliPoint(0.1, 1.0), ModuliPoint(0.2, 1.1), ModuliPoint(0.3, 1.15)],
        residuals=[1e-12, 2e-12, 3e-12],
        grad_norms=[0.5, 0.6, 0.7],
        mismatches=[0.0, 0.0, 0.0],
        cases=[GradientCase.REGULAR] * 3,
        near_orbit=[False] * 3,
    )
    second = CurvePolyline(
        curve_id=DegeneracyCurveId.CTILDE_PLUS,
        points=[ModuliPoint(-0.2, 1.3), ModuliPoint(-0.1, 1.25)],
        residuals=[1e-11, 1e-11],
        grad_norms=[0.1, 0.1],
        mismatches=[0.0, 0.0],
        cases=[GradientCase.REGULAR] * 2,
        near_orbit=[False] * 2,
    )
    return [first, second]


def test_1_fields_match_determinants(run_config):
    """Test the curve fields against the Hessian determinants.

    Validates:
        - C_ij fields equal det D^2 G_2 at the half-period pairs
        - Ctilde fields times |g2| equal the q_pm closed forms
        - the fields are real and finite off the curves
    """
    for tau in TAUS:
        for curve in DegeneracyCurveId:
            assert field_matches_determinant(curve, tau) < run_config.tolerances.hessian, (curve, tau)
            assert np.isfinite(scalar_field(curve, tau))


def test_2_gradients(run_config):
    """Test analytic (dH/da, dH/db) against central differences.

    Validates:
        - relative mismatch below tol.gradient_check for all five fields
        - the regular formula applies away from f = 0 and phi = 0
        - phi_minus is small enough at 0.05 + 2.1i to switch Ctilde_minus to the expanded form
    """
    for tau in TAUS:
        for curve in DegeneracyCurveId:
            norm, mismatch, case = gradient_witness(curve, tau)
            assert norm > 0
            assert mismatch < run_config.tolerances.gradient_check, (curve, tau, mismatch)
            if curve is DegeneracyCurveId.CTILDE_MINUS and tau == PHI_MINUS_SMALL:
                assert case is GradientCase.PHI_ZERO
            else:
                assert case is GradientCase.REGULAR, (curve, tau)


def test_3_trace_ctilde_plus(run_config):
    """Test tracing the Ctilde_plus curve.

    Validates:
        - the curve crosses the box
        - every traced point is a zero of the field within tol.curve_residual
        - the curve is smooth: gradients above tol.smooth_floor
        - analytic and numeric gradients agree along the curve
        - g2 stays away from zero on the curve
    """
    tol = run_config.tolerances
    polylines = trace(DegeneracyCurveId.CTILDE_PLUS, GridSpec(CROSSING, 48, 48))

    assert polylines
    assert all(p.curve_id is DegeneracyCurveId.CTILDE_PLUS for p in polylines)
    assert max(p.max_residual for p in polylines) < tol.curve_residual
    assert min(p.min_grad_norm for p in polylines) > tol.smooth_floor
    assert gradient_mismatches(polylines) < tol.gradient_check
    assert min_g2_on_curve(polylines) > tol.lemma_witness

    # the curve crosses Re tau = 1/2 near Im tau = 1.1
    longest = polylines[0]
    assert min(abs(p.re - 0.5) for p in longest.points) < 0.01
    assert all(not near for line in polylines for near in line.near_orbit)


def test_4_regrid_stability():
    """Test that a coarse trace sits on the refined one.

    Validates:
        - every coarse point is within one coarse cell of the refined curve
    """
    stability = regrid_stability(DegeneracyCurveId.CTILDE_PLUS, GridSpec(CROSSING, 24, 24))
    assert stability < 1.0


def test_5_decomposition_without_orbit(run_config):
    """Test C_plus = Ctilde_plus plus orbit points on a box without orbit points.

    Validates:
        - no orbit points, infinite margin
        - det D^2 G_2 at (q_plus, -q_plus) vanishes along Ctilde_plus
    """
    decomposition = decompose_c_pm(1, GridSpec(CROSSING, 48, 48))
    assert decomposition.orbit_points == []
    assert decomposition.margin == float("inf")
    assert decomposition.polylines
    assert decomposition.det_on_curve < run_config.tolerances.curve_det
    assert decomposition.det_on_orbit == 0.0


def test_6_curve_files(tmp_path):
    """Test CSV and SVG emission.

    Validates:
        - <name>_<region-hash>.<ext> naming, stable per region
        - CSV rows read back to the traced points in order
        - one SVG group per polyline, tagged with the curve id, each holding a path
        - identical input gives identical bytes
    """
    region = Rectangle(-0.5, 0.5, 0.9, 1.5)
    polylines = _polylines()

    csv_path = emit("all", polylines, "csv", region, tmp_path)
    assert csv_path.name == f"all_{region_hash(region)}.csv"
    assert csv_path.name == curve_filename("all", region, OutputFormat.CSV)
    assert region_hash(region) != region_hash(CROSSING)

    rows = read_csv(csv_path)
    assert len(rows) == 5
    assert set(rows[0]) == set(CSV_COLUMNS)
    assert [r["re"] for r in rows] == [0.1, 0.2, 0.3, -0.2, -0.1]
    assert rows[3]["curve_id"] == "Ctilde_plus"

    svg_path = emit("all", polylines, OutputFormat.SVG, region, tmp_path)
    root = ET.parse(svg_path).getroot()
    groups = [e for e in root.iter() if e.tag.endswith("}g") and e.get("id", "").startswith("polyline-")]
    assert [g.get("id").split("-", 2)[2] for g in groups] == ["C12", "Ctilde_plus"]
    assert all(any(e.tag.endswith("}path") for e in g.iter()) for g in groups)

    first = svg_path.read_bytes()
    emit("all", polylines, OutputFormat.SVG, region, tmp_path)
    assert svg_path.read_bytes() == first


def test_7_validation(tmp_path):
    """Test rejected grids and formats.

    Validates:
        - grids below 16 points per axis raise InvalidRangeException
        - json is not a curve file format
    """
    with pytest.raises(InvalidRangeException):
        GridSpec(CROSSING, 8, 48)
    with pytest.raises(InvalidFormatException):
        emit("C12", _polylines(), OutputFormat.JSON, CROSSING, tmp_path)


def test_8_expanded_gradient_forms():
    """Test the gradients taken near f = 0 and phi = 0.

    The expanded forms differentiate the field without dividing by f or
    phi, so they hold everywhere. A huge smooth floor forces them at
    ordinary points.

    Validates:
        - C_ij fields switch to F_ZERO, Ctilde fields to PHI_ZERO
        - both forms agree with central differences
    """
    config = init_run_config(RunConfig.for_testing().with_tolerances({"smooth_floor": 1e12}))
    for tau in TAUS:
        for curve in DegeneracyCurveId:
            _, mismatch, case = gradient_witness(curve, tau)
            expected = GradientCase.F_ZERO if curve.complement is not None else GradientCase.PHI_ZERO
            assert case is expected, (curve, tau)
            assert mismatch < config.tolerances.gradient_check, (curve, tau, mismatch)


def test_9_failing_crossings_kept_on_half_period_curves(run_config):
    """Test which refined sign changes become curve points.

    Validates:
        - C_ij keeps a crossing whose residual misses tol.curve_residual
        - the kept crossing makes the residual check of the curve fail
        - Ctilde drops the same crossing as a jump across the square-root cut
    """
    tol = run_config.tolerances.curve_residual
    good = Crossing(edge=("h", 3, 4), tau=0.4 + 1.1j, residual=1e-12)
    bad = Crossing(edge=("v", 5, 4), tau=0.41 + 1.12j, residual=1e-3)

    kept = zero_crossings(DegeneracyCurveId.C12, [good, bad], tol)
    assert set(kept) == {good.edge, bad.edge}
    assert set(zero_crossings(DegeneracyCurveId.CTILDE_PLUS, [good, bad], tol)) == {good.edge}

    line = CurvePolyline(
        curve_id=DegeneracyCurveId.C12,
        points=[ModuliPoint.from_complex(c.tau) for c in (good, bad)],
        residuals=[good.residual, bad.residual],
        grad_norms=[0.5, 0.5],
        mismatches=[0.0, 0.0],
        cases=[GradientCase.REGULAR] * 2,
        near_orbit=[False] * 2,
    )
    checks = {c.name: c for c in CurveService(run_config)._curve_checks(DegeneracyCurveId.C12, [line])}
    assert not checks["C12 residual"].passed
    assert checks["C12 nonempty"].passed
