from dataclasses import dataclass, field

from torus_zeros.models.moduli import ModuliPoint, Rectangle
from torus_zeros.models.painleve import LemmaWitness


@dataclass(frozen=True)
class WindingResult:
    """Outcome of one argument-principle integral over a rectangle boundary."""

    winding: int
    value: complex  # (1 / 2 pi i) * integral of f'/f, before rounding
    rect: Rectangle  # the rectangle actually integrated over, after nudging
    scale: float  # median |f| on the boundary
    boundary_min: float  # min |f| on the boundary
    nudges: int = 0
    panels: int = 0

    @property
    def boundary_margin(self) -> float:
        return self.boundary_min / self.scale

    def to_dict(self) -> dict:
        return {
            "winding": self.winding,
            "value": {"re": self.value.real, "im": self.value.imag},
            "rect": self.rect.to_dict(),
            "scale": self.scale,
            "boundary_margin": self.boundary_margin,
            "nudges": self.nudges,
            "panels": self.panels,
        }


@dataclass(frozen=True)
class ZeroRecord:
    """A located zero with its multiplicity and derivative witness."""

    location: ModuliPoint
    winding: int
    derivative_magnitude: float
    newton_residual: float  # |f(location)|
    scale: float
    witness: LemmaWitness | None = None

    @property
    def relative_residual(self) -> float:
        return self.newton_residual / self.scale

    def is_simple(self, simple_floor: float) -> bool:
        return self.winding == 1 and self.derivative_magnitude > simple_floor * self.scale

    def to_dict(self) -> dict:
        result = {
            "location": self.location.to_dict(),
            "winding": self.winding,
            "derivative_magnitude": self.derivative_magnitude,
            "newton_residual": self.newton_residual,
            "scale": self.scale,
        }
        if self.witness is not None:
            result["witness"] = self.witness.to_dict()
        return result


@dataclass(frozen=True)
class SimpleZeroVerdict:
    zeros: list[ZeroRecord]
    all_simple: bool
    min_derivative: float  # min |f'| / scale over the zeros, inf if none
    boundary_margin: float
    label: str = ""
    rect: Rectangle | None = None
    winding_total: int = 0
    witnesses_ok: bool = True
    min_witness: float = float("inf")  # min |companion| / monomial scale
    grid_count: int | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "rect": self.rect.to_dict() if self.rect else None,
            "zero_count": len(self.zeros),
            "winding_total": self.winding_total,
            "grid_count": self.grid_count,
            "all_simple": self.all_simple,
            "min_derivative": self.min_derivative,
            "boundary_margin": self.boundary_margin,
            "witnesses_ok": self.witnesses_ok,
            "min_witness": self.min_witness,
            "zeros": [z.to_dict() for z in self.zeros],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class ZeroScan:
    """All zeros found in a rectangle together with the root winding integral."""

    records: list[ZeroRecord]
    root: WindingResult
    cells: int = 0
    max_depth: int = 0
