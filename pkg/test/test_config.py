"""Configuration, parsing and report test suite.

Tests:
    1. Complex, extended, region and grid parsing
    2. Tolerance overrides
    3. RunConfig from the environment and its global instance
    4. Report JSON
    5. Exception payloads and exit codes
    6. Run logging: files under log_dir, records stamped with the run
"""

import json
import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path

import pytest

from torus_zeros.config.run_config import RunConfig, Tolerances, get_run_config, init_run_config, reset_run_config
from torus_zeros.exceptions.numerical import PrecisionException
from torus_zeros.exceptions.validation import InvalidFormatException, InvalidRangeException, UnknownSymbolException
from torus_zeros.exceptions.verification import DisjointnessViolationException
from torus_zeros.models.moduli import ExtendedScalar, ModuliPoint, Rectangle
from torus_zeros.models.report import SCHEMA_VERSION, CheckResult, Report, jsonable
from torus_zeros.utils.logger import bind_run, run_context, setup_logging
from torus_zeros.utils.parsing import format_complex, parse_complex, parse_extended, parse_grid, parse_region


def test_1_parsing():
    """Test the command line value parsers.

    Validates:
        - a+bi forms with i or j, bare i and signs
        - inf for the extended constant C
        - region and grid strings, square grids
        - malformed input raises InvalidFormatException, small grids InvalidRangeException
    """
    assert parse_complex("0.3+1.2i") == complex(0.3, 1.2)
    assert parse_complex("2i") == 2j
    assert parse_complex("i") == 1j
    assert parse_complex("-i") == -1j
    assert parse_complex("-1") == -1
    assert parse_complex("1e-3-2.5j") == complex(1e-3, -2.5)
    assert parse_complex(" 0.5 + 0.5i ") == complex(0.5, 0.5)
    assert parse_complex(format_complex(complex(0.1, -0.7))) == complex(0.1, -0.7)

    assert parse_extended("inf").is_infinite
    assert parse_extended("2+i").value == complex(2, 1)

    assert parse_region("-1:1:0.5:2") == Rectangle(-1.0, 1.0, 0.5, 2.0)
    assert parse_grid("400x300") == (400, 300)
    assert parse_grid("64") == (64, 64)

    for bad in ("1+i)", "", "2ii"):
        with pytest.raises(InvalidFormatException):
            parse_complex(bad)
    with pytest.raises(InvalidFormatException):
        parse_region("-1:1:0.5")
    with pytest.raises(InvalidRangeException):
        parse_region("-1:1:0:2")
    with pytest.raises(InvalidFormatException):
        parse_grid("ten")
    with pytest.raises(InvalidRangeException):
        parse_grid("8x64")


def test_2_tolerance_overrides():
    """Test named tolerance overrides.

    Validates:
        - a known name is replaced, the rest keep their defaults
        - an unknown name raises UnknownSymbolException (exit code 2)
        - a non-positive value raises InvalidRangeException
    """
    tolerances = Tolerances().with_overrides({"newton": "1e-12"})
    assert tolerances.newton == 1e-12
    assert tolerances.identity == Tolerances().identity
    assert Tolerances().with_overrides(None) == Tolerances()
    assert "riccati0" in Tolerances.names()

    with pytest.raises(UnknownSymbolException) as error:
        Tolerances().with_overrides({"newtn": 1e-12})
    assert error.value.exit_code == 2

    with pytest.raises(InvalidRangeException):
        Tolerances().with_overrides({"newton": 0})

    config = RunConfig.for_testing().with_tolerances({"pvi": 1e-4})
    assert config.tolerances.pvi == 1e-4
    assert config.to_dict()["tolerances"]["pvi"] == 1e-4


def test_3_config_from_environment(monkeypatch):
    """Test RunConfig.from_env and the global instance.

    Validates:
        - only the variables that are set override defaults
        - region and grid variables go through the parsers
        - init/get/reset manage one global configuration
    """
    monkeypatch.setenv("TORUS_ZEROS_THREADS", "3")
    monkeypatch.setenv("TORUS_ZEROS_REGION", "-0.5:0.5:0.8:1.6")
    monkeypatch.setenv("TORUS_ZEROS_GRID", "32x40")
    monkeypatch.setenv("TORUS_ZEROS_OUTPUT_DIR", "out/env")
    monkeypatch.delenv("TORUS_ZEROS_SEED", raising=False)

    config = RunConfig.from_env()
    assert config.thread_count == 3
    assert config.region == Rectangle(-0.5, 0.5, 0.8, 1.6)
    assert config.grid == (32, 40)
    assert config.output_dir == Path("out/env")
    assert config.seed == RunConfig().seed

    with pytest.raises(InvalidRangeException):
        RunConfig(thread_count=0)

    reset_run_config()
    assert get_run_config() == RunConfig()
    init_run_config(config)
    assert get_run_config() is config


def test_4_report_json():
    """Test the report envelope.

    Validates:
        - schema_version, command, config, records, pass, summary keys
        - complex values as {"re", "im"}, non-finite floats as strings
        - a failed check fails the report and is listed in the summary
    """
    checks = [
        CheckResult.below("identity", 1e-12, 1e-10),
        CheckResult.above("gradient", 1e-9, 1e-6, tau={"re": 0.5, "im": 1.1}),
    ]
    report = Report.from_checks("verify", {"seed": 7}, checks, suite="identities")
    payload = json.loads(report.to_json())

    assert set(payload) == {"schema_version", "command", "config", "records", "pass", "summary"}
    assert payload["schema_version"] == SCHEMA_VERSION
    assert payload["pass"] is False
    assert payload["summary"] == {"checks": 2, "failed": ["gradient"], "suite": "identities"}
    assert payload["records"][0]["pass"] is True

    assert jsonable(complex(1, -2)) == {"re": 1.0, "im": -2.0}
    assert jsonable([float("inf"), float("nan")]) == ["inf", "nan"]
    assert ExtendedScalar.infinity().to_json() == "inf"
    assert report.to_json() == Report.from_checks("verify", {"seed": 7}, checks, suite="identities").to_json()


def test_5_exception_payloads():
    """Test the exception hierarchy.

    Validates:
        - exit codes: 2 validation, 3 numerical, 1 verification
        - to_dict carries type, message, timestamp and the failing tau
        - to_log_dict carries technical message and extras
        - str() survives complex extras
    """
    precision = PrecisionException(im=0.01, floor=0.05, tau=complex(0.2, 0.01))
    assert precision.exit_code == 3
    payload = precision.to_dict()["error"]
    assert payload["type"] == "PrecisionException"
    assert "timestamp" in payload
    assert "tau" in payload
    assert precision.to_log_dict()["extras"]["floor"] == 0.05
    assert "PrecisionException" in str(precision)

    invalid = InvalidRangeException(field="Im tau", value=-1, min_value=0)
    assert invalid.exit_code == 2
    assert invalid.to_dict()["error"]["field"] == "Im tau"

    violation = DisjointnessViolationException(margin=0.01, required=0.1, tau=ModuliPoint(0.5, 0.866))
    assert violation.exit_code == 1
    assert violation.to_log_dict()["extras"]["margin"] == 0.01


def test_6_run_logging(tmp_path):
    """Test setup_logging and bind_run.

    Validates:
        - the application and error logs are created under RunConfig.log_dir
        - no stderr handler unless asked for
        - records carry the seed, thread count and command of the bound run
        - only errors reach the error log
        - tolerance overrides are logged with the run
    """
    config = RunConfig.for_testing(log_dir=tmp_path / "logs", seed=99, thread_count=3).with_tolerances({"pvi": 1e-4})
    root = logging.getLogger()
    saved_handlers, saved_level = root.handlers[:], root.level
    try:
        handlers = setup_logging(config, "DEBUG")
        assert len(handlers) == 2
        assert all(isinstance(h, RotatingFileHandler) for h in root.handlers)

        bind_run(config, "zeros")
        logging.getLogger("torus_zeros.zeros").warning("cell resplit")
        logging.getLogger("torus_zeros.zeros").error("winding failed")
        for handler in handlers:
            handler.flush()
    finally:
        for handler in root.handlers:
            handler.close()
        root.handlers[:] = saved_handlers
        root.setLevel(saved_level)
        run_context.bind(RunConfig.for_testing())

    app_log = (tmp_path / "logs" / "torus_zeros.log").read_text(encoding="utf-8")
    error_log = (tmp_path / "logs" / "torus_zeros_errors.log").read_text(encoding="utf-8")
    assert "zeros seed=99 threads=3" in app_log
    assert "cell resplit" in app_log and "winding failed" in app_log
    assert "'pvi': 0.0001" in app_log
    assert "winding failed" in error_log and "cell resplit" not in error_log
