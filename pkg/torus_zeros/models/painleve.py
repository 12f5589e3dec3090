import math
from dataclasses import dataclass, field

from torus_zeros.exceptions.validation import InvalidRangeException
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, ModuliPoint


def _pair(value: complex | None):
    if value is None:
        return None
    return {"re": value.real, "im": value.imag}


@dataclass(frozen=True)
class PviParams:
    """
    Parameters (alpha, beta, gamma, delta) of the sixth Painleve equation.

    The elliptic form carries the coefficients alphas = (alpha, -beta,
    gamma, 1/2 - delta) and the prefactor -1 / (4 pi^2); neither is used by
    any computation here.
    """

    alpha: float
    beta: float
    gamma: float
    delta: float

    elliptic_prefactor = -1.0 / (4 * math.pi**2)

    @classmethod
    def riccati(cls, n: int) -> "PviParams":
        """alpha = (n + 1/2)^2 / 2 with the other three fixed at 1/8."""
        if n not in (0, 1):
            raise InvalidRangeException(field="n", value=n, min_value=0, max_value=1)
        return cls(alpha=0.5 * (n + 0.5) ** 2, beta=-0.125, gamma=0.125, delta=0.375)

    @property
    def alphas(self) -> tuple[float, float, float, float]:
        return (self.alpha, -self.beta, self.gamma, 0.5 - self.delta)

    @property
    def n(self) -> float:
        return math.sqrt(2 * self.alpha) - 0.5

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta": self.delta,
            "alphas": list(self.alphas),
        }


@dataclass(frozen=True)
class RiccatiFamily:
    k: FamilyIndex
    C: ExtendedScalar
    level: int

    def __post_init__(self):
        if self.level not in (0, 1):
            raise InvalidRangeException(field="level", value=self.level, min_value=0, max_value=1)

    @classmethod
    def of(cls, level: int, k: FamilyIndex | int, C: ExtendedScalar | complex | None) -> "RiccatiFamily":
        return cls(k=FamilyIndex.of(k), C=ExtendedScalar.of(C), level=int(level))

    @property
    def params(self) -> PviParams:
        return PviParams.riccati(self.level)

    def to_dict(self) -> dict:
        return {"k": self.k.k, "C": self.C.to_json(), "level": self.level}

    def __str__(self) -> str:
        return f"level={self.level},k={self.k.k},C={self.C}"


@dataclass(frozen=True)
class HamiltonianState:
    """
    (lambda, mu) at t. mu is None when it could not be formed (the state
    is singular for the transformation that produced it).
    """

    lam: complex
    mu: complex | None
    t: complex
    level: int = 0

    def __post_init__(self):
        if abs(self.t) == 0 or self.t == 1:
            raise InvalidRangeException(field="t", value=self.t)

    @property
    def singular(self) -> bool:
        return self.mu is None

    def to_dict(self) -> dict:
        return {
            "lambda": _pair(self.lam),
            "mu": _pair(self.mu),
            "t": _pair(self.t),
            "level": self.level,
        }


@dataclass(frozen=True)
class LemmaWitness:
    """x = C eta_1 - eta_2, y = C - tau and the pair (f, companion) built from them."""

    x: complex
    y: complex
    f: complex
    companion: complex
    companion_scale: float

    @property
    def relative(self) -> float:
        if self.companion_scale == 0:
            return 0.0
        return abs(self.companion) / self.companion_scale

    def to_dict(self) -> dict:
        return {
            "x": _pair(self.x),
            "y": _pair(self.y),
            "f": _pair(self.f),
            "companion": _pair(self.companion),
            "relative": self.relative,
        }


@dataclass(frozen=True)
class PathResidual:
    tau: ModuliPoint
    residual: float | None  # relative to the pointwise scale, None when skipped
    reason: str = ""
    scale: float | None = None

    def to_dict(self) -> dict:
        return {"tau": self.tau.to_dict(), "residual": self.residual, "scale": self.scale, "reason": self.reason}


@dataclass(frozen=True)
class RiccatiReport:
    family: RiccatiFamily
    path: list[ModuliPoint]
    max_residual: float
    residual_scale: float  # scale at the point where max_residual was attained
    equation: str = ""
    skipped: list[PathResidual] = field(default_factory=list)
    evaluated: int = 0
    residuals: list[PathResidual] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "family": self.family.to_dict(),
            "equation": self.equation,
            "path_len": len(self.path),
            "evaluated": self.evaluated,
            "skipped": [s.to_dict() for s in self.skipped],
            "max_residual": self.max_residual,
            "residual_scale": self.residual_scale,
        }
