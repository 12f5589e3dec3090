import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SCHEMA_VERSION = "1.0"


def jsonable(value: Any) -> Any:
    """
    Plain JSON value for report payloads.

    complex -> {"re", "im"}, numpy scalars -> python, non-finite floats ->
    "inf" / "-inf" / "nan" strings so the output stays strict JSON.
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": jsonable(float(value.real)), "im": jsonable(float(value.imag))}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


@dataclass(frozen=True)
class CheckResult:
    """One tolerance check inside a suite."""

    name: str
    passed: bool
    value: float
    tolerance: float | None = None
    detail: dict = field(default_factory=dict)

    @classmethod
    def below(cls, name: str, value: float, tolerance: float, **detail) -> "CheckResult":
        return cls(name=name, passed=bool(value < tolerance), value=float(value), tolerance=tolerance, detail=detail)

    @classmethod
    def above(cls, name: str, value: float, floor: float, **detail) -> "CheckResult":
        return cls(name=name, passed=bool(value > floor), value=float(value), tolerance=floor, detail=detail)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Report:
    command: str
    config_echo: dict
    records: Any
    passed: bool
    summary: dict = field(default_factory=dict)

    @classmethod
    def from_checks(cls, command: str, config_echo: dict, checks: list[CheckResult], **summary) -> "Report":
        failed = [c.name for c in checks if not c.passed]
        summary = {"checks": len(checks), "failed": failed, **summary}
        return cls(
            command=command,
            config_echo=config_echo,
            records=[c.to_dict() for c in checks],
            passed=not failed,
            summary=summary,
        )

    def to_dict(self) -> dict:
        return jsonable(
            {
                "schema_version": SCHEMA_VERSION,
                "command": self.command,
                "config": self.config_echo,
                "records": self.records,
                "pass": self.passed,
                "summary": self.summary,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
