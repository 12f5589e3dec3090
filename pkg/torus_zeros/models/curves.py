import math
from dataclasses import dataclass, field

from torus_zeros.exceptions.validation import InvalidRangeException
from torus_zeros.models.enums import DegeneracyCurveId, GradientCase
from torus_zeros.models.moduli import ModuliPoint, Rectangle


@dataclass(frozen=True)
class GridSpec:
    rect: Rectangle
    nx: int
    ny: int
    refine_tol: float = 1e-13

    def __post_init__(self):
        if self.nx < 16 or self.ny < 16:
            raise InvalidRangeException(field="grid", value=f"{self.nx}x{self.ny}", min_value=16)

    @property
    def dx(self) -> float:
        return self.rect.width / (self.nx - 1)

    @property
    def dy(self) -> float:
        return self.rect.height / (self.ny - 1)

    @property
    def cell_diagonal(self) -> float:
        return math.hypot(self.dx, self.dy)

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(
            self.rect,
            (self.nx - 1) * factor + 1,
            (self.ny - 1) * factor + 1,
            self.refine_tol,
        )

    def to_dict(self) -> dict:
        return {"rect": self.rect.to_dict(), "nx": self.nx, "ny": self.ny, "refine_tol": self.refine_tol}


@dataclass
class CurvePolyline:
    """
    One connected piece of a traced level set, points in traced order.

    Per point: the field residual |H| / scale, the gradient norm relative
    to scale, which gradient formula applies, and whether the point lies
    within two cells of the orbit of rho.
    """

    curve_id: DegeneracyCurveId
    points: list[ModuliPoint] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)
    mismatches: list[float] = field(default_factory=list)  # analytic vs numeric gradient
    cases: list[GradientCase] = field(default_factory=list)
    near_orbit: list[bool] = field(default_factory=list)
    closed: bool = False

    def __len__(self) -> int:
        return len(self.points)

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def min_grad_norm(self) -> float:
        return min(self.grad_norms, default=math.inf)

    @property
    def max_mismatch(self) -> float:
        """Worst analytic-versus-numeric gradient gap over points away from the orbit."""
        return max((m for m, near in zip(self.mismatches, self.near_orbit) if not near), default=0.0)

    def to_dict(self) -> dict:
        return {
            "curve_id": self.curve_id.value,
            "closed": self.closed,
            "points": len(self.points),
            "max_residual": self.max_residual,
            "min_grad_norm": self.min_grad_norm,
            "cases": sorted({c.value for c in self.cases}),
            "near_orbit": sum(self.near_orbit),
        }


@dataclass(frozen=True)
class CurveDecomposition:
    """C_pm split into its traced part and the orbit points in the region."""

    sign: int
    polylines: list[CurvePolyline]
    orbit_points: list[ModuliPoint]
    margin: float  # min distance between the two sets
    required: float
    det_on_curve: float  # max |det| / scale over traced points
    det_on_orbit: float

    def to_dict(self) -> dict:
        return {
            "sign": self.sign,
            "polylines": [p.to_dict() for p in self.polylines],
            "orbit_points": [p.to_dict() for p in self.orbit_points],
            "margin": self.margin,
            "required": self.required,
            "det_on_curve": self.det_on_curve,
            "det_on_orbit": self.det_on_orbit,
        }
