from dataclasses import dataclass

import numpy as np

from torus_zeros.models.enums import CriticalKind
from torus_zeros.models.moduli import ModuliPoint, TorusPoint


@dataclass(frozen=True)
class CriticalPair:
    """
    A trivial critical point (a1, a2) of the two-point Green function.

    For the half-period pairs indices = (i, j); for q_pm, wp_value is
    wp(a1) = pm sqrt(g_2/12). degenerate marks q_plus = q_minus on the
    orbit of rho.
    """

    a1: TorusPoint
    a2: TorusPoint
    kind: CriticalKind
    indices: tuple[int, int] | None = None
    wp_value: complex | None = None
    residual: float = 0.0  # max over both equations of |2 grad G(a) - grad G(a1 - a2)|
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "indices": list(self.indices) if self.indices else None,
            "a1": self.a1.to_dict(),
            "a2": self.a2.to_dict(),
            "wp_value": None if self.wp_value is None else {"re": self.wp_value.real, "im": self.wp_value.imag},
            "residual": self.residual,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class HessianEntries:
    """
    Real coordinates of the kernel values feeding the Hessian matrices.

    u_k + v_k i = -(e_k + eta_1), s + t_img i = eta_1, u + v i = wp(q), b = Im tau.
    """

    u1: float
    v1: float
    u2: float
    v2: float
    u3: float
    v3: float
    s: float
    t_img: float
    u: float
    v: float
    b: float

    def uv(self, k: int) -> tuple[float, float]:
        return {1: (self.u1, self.v1), 2: (self.u2, self.v2), 3: (self.u3, self.v3)}[k]


@dataclass(frozen=True)
class HessianMatrix:
    """
    Hessian of G_2 in the coordinates (x_1, y_1, x_2, y_2) with its
    determinant and the two closed forms it is compared against.
    """

    entries: np.ndarray
    det: float
    closed_form: float
    phi_form: float
    tau: ModuliPoint
    label: str = ""

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.entries))) or 1.0

    @property
    def asymmetry(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T))) / self.scale

    @staticmethod
    def _relative(a: float, b: float) -> float:
        return abs(a - b) / max(abs(a), abs(b), np.finfo(float).tiny)

    @property
    def closed_form_deviation(self) -> float:
        return self._relative(self.det, self.closed_form)

    @property
    def phi_form_deviation(self) -> float:
        return self._relative(self.closed_form, self.phi_form)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "tau": self.tau.to_dict(),
            "det": self.det,
            "closed_form": self.closed_form,
            "phi_form": self.phi_form,
            "closed_form_deviation": self.closed_form_deviation,
            "phi_form_deviation": self.phi_form_deviation,
            "asymmetry": self.asymmetry,
        }
