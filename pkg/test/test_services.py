"""Service layer test suite.

Tests:
    1. Point evaluation reports
    2. Evaluation argument errors
    3. Zero scan of a family with a known zero
    4. Hessian table rows
    5. A verification suite end to end
    6. Curve tracing with file output
    7. Closed invariant values checked at i and rho
"""

import math

import pytest

from torus_zeros.exceptions.validation import MissingFieldException, UnknownSymbolException
from torus_zeros.models.enums import PhiBranch
from torus_zeros.models.moduli import Rectangle
from torus_zeros.moduli.functions import phi
from torus_zeros.moduli.orbit import RHO
from torus_zeros.services.curve_service import CurveService
from torus_zeros.services.evaluation_service import EvaluationService
from torus_zeros.services.hessian_service import TABLE_COLUMNS, HessianTableService
from torus_zeros.services.verification_service import VerificationService
from torus_zeros.services.zero_service import ZeroService

TAU0 = 0.1 + 1.1j


def test_1_evaluation_reports(run_config):
    """Test EvaluationService.evaluate.

    Validates:
        - eta1(i) = pi as {"re", "im"} in the record
        - t(i) = 1/2
        - lambda at a zero of f_{1,C} is reported as "inf" and still passes
        - the config echo is the effective configuration
    """
    service = EvaluationService(run_config)

    payload = service.evaluate("eta1", 1j).to_dict()
    assert payload["command"] == "eval"
    assert payload["pass"] is True
    assert abs(payload["records"][0]["value"]["re"] - math.pi) < 1e-12
    assert abs(payload["records"][0]["value"]["im"]) < 1e-12
    assert payload["config"] == run_config.to_dict()

    t = service.evaluate("t", 1j).to_dict()["records"][0]["value"]
    assert abs(t["re"] - 0.5) < 1e-12

    wp = service.evaluate("wp", 0.3 + 1.2j, z=0.2 + 0.3j).to_dict()["records"][0]
    assert set(wp) == {"symbol", "tau", "value", "z"}

    C = phi(PhiBranch.K1, TAU0).value
    record = service.evaluate("lambda", TAU0, k=1, C=C, level=1).to_dict()["records"][0]
    assert record["level"] == 1
    assert record["value"] == "inf" or math.hypot(record["value"]["re"], record["value"]["im"]) > 1e6


def test_2_evaluation_errors(run_config):
    """Test the evaluation guards.

    Validates:
        - unknown symbol raises UnknownSymbolException
        - a z-dependent symbol without z raises MissingFieldException
        - a family symbol without k raises MissingFieldException
    """
    service = EvaluationService(run_config)
    with pytest.raises(UnknownSymbolException):
        service.evaluate("sigma", 1j)
    with pytest.raises(MissingFieldException):
        service.evaluate("zeta", 1j)
    with pytest.raises(MissingFieldException):
        service.evaluate("phi_k", 1j)


def test_3_zero_scan(run_config):
    """Test ZeroService.scan on a family with a zero placed at TAU0.

    Validates:
        - the scan passes: simple zeros, witnesses, winding and grid counts agree
        - TAU0 is among the reported zeros
    """
    C = phi(PhiBranch.K1, TAU0).value
    report = ZeroService(run_config).scan(1, C, Rectangle(-0.3, 0.4, 0.8, 1.4))
    payload = report.to_dict()

    assert payload["pass"] is True, payload["summary"]
    assert payload["summary"]["zero_count"] >= 1
    zeros = payload["records"][0]["zeros"]
    assert min(abs(complex(z["location"]["re"], z["location"]["im"]) - TAU0) for z in zeros) < 1e-8


def test_4_hessian_table(run_config):
    """Test HessianTableService.table on given tau.

    Validates:
        - five rows per tau with the documented columns
        - determinants agree with the closed forms
    """
    report = HessianTableService(run_config).table([1j, 0.3 + 1.2j])
    payload = report.to_dict()

    assert len(payload["records"]) == 10
    assert all(set(row) == set(TABLE_COLUMNS) for row in payload["records"])
    assert payload["summary"]["rows"] == 10
    assert payload["pass"] is True


def test_5_verification_suite(run_config):
    """Test VerificationService.run.

    Validates:
        - the identities suite passes with the testing configuration
        - the same seed gives the same report
        - an unknown suite raises UnknownSymbolException
    """
    service = VerificationService(run_config)
    report = service.run("identities")
    assert report.passed, report.summary["failed"]
    assert report.summary["suite"] == "identities"
    assert report.to_json() == service.run("identities").to_json()

    with pytest.raises(UnknownSymbolException):
        service.run("everything")


def test_6_curve_files(run_config, tmp_path):
    """Test CurveService.trace.

    Validates:
        - one CSV for a single curve with format csv
        - the Ctilde_plus checks pass on a box it crosses
        - "all" with format svg writes five curve plots plus the combined one
    """
    region = Rectangle(0.3, 0.7, 0.95, 1.4)
    service = CurveService(run_config)

    report = service.trace("Ctilde_plus", region, "csv", tmp_path)
    files = report.summary["files"]
    assert len(files) == 1 and files[0].endswith(".csv")
    assert report.passed, report.summary["failed"]
    assert report.records[0]["orbit_points"] == []

    report = service.trace("all", region, "svg", tmp_path)
    names = sorted(p.name.split("_")[0] for p in tmp_path.glob("*.svg"))
    assert len(report.summary["files"]) == 6
    assert names.count("all") == 1


def test_7_anchor_checks(run_config):
    """Test the closed-value checks of eval at the elliptic points.

    Validates:
        - eta1(i) and g2(rho) are checked against pi and 0 and pass
        - "invariants" at i checks eta1, g3 and e3
        - other points and other symbols carry no anchor checks
    """
    service = EvaluationService(run_config)

    report = service.evaluate("g2", RHO)
    assert report.passed
    assert [c["name"] for c in report.summary["anchors"]] == ["g2 closed value"]
    assert report.summary["failed"] == []

    report = service.evaluate("eta1", 1j)
    assert report.passed
    assert report.summary["anchors"][0]["value"] < run_config.tolerances.identity

    names = [c["name"] for c in service.evaluate("invariants", 1j).summary["anchors"]]
    assert names == ["eta1 closed value", "g3 closed value", "e3 closed value"]

    assert "anchors" not in service.evaluate("eta1", TAU0).summary
    assert "anchors" not in service.evaluate("t", 1j).summary
