import cmath
from dataclasses import dataclass

from torus_zeros.models.moduli import ModuliPoint


def _pair(value: complex) -> dict:
    return {"re": value.real, "im": value.imag}


@dataclass(frozen=True)
class ThetaEval:
    """theta_1 and its z-derivatives at one (z, tau)."""

    value: complex
    d1: complex
    d2: complex
    d3: complex
    d4: complex
    terms_used: int

    def log_derivatives(self) -> tuple[complex, complex, complex, complex]:
        """First four z-derivatives of log theta_1."""
        l1 = self.d1 / self.value
        l2 = self.d2 / self.value
        l3 = self.d3 / self.value
        l4 = self.d4 / self.value
        return (
            l1,
            l2 - l1 * l1,
            l3 - 3 * l2 * l1 + 2 * l1**3,
            l4 - 4 * l3 * l1 - 3 * l2 * l2 + 12 * l2 * l1 * l1 - 6 * l1**4,
        )


@dataclass(frozen=True)
class LatticeInvariants:
    """Branch values, invariants and quasi-periods of the lattice Z + Z*tau."""

    e1: complex
    e2: complex
    e3: complex
    g2: complex
    g3: complex
    eta1: complex
    eta2: complex
    tau: ModuliPoint

    def e(self, k: int) -> complex:
        return (self.e1, self.e2, self.e3)[k - 1]

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.e1), abs(self.e2), abs(self.e3))

    @property
    def discriminant(self) -> complex:
        return self.g2**3 - 27 * self.g3**2

    @property
    def sqrt_g2_12(self) -> complex:
        """Principal square root of g2/12."""
        return cmath.sqrt(self.g2 / 12)

    def residuals(self) -> dict[str, float]:
        """Scaled residuals of the defining identities."""
        e1, e2, e3 = self.e1, self.e2, self.e3
        g2_sym = -4 * (e1 * e2 + e1 * e3 + e2 * e3)
        g3_sym = 4 * e1 * e2 * e3
        return {
            "e_sum": abs(e1 + e2 + e3) / self.scale,
            "g2_symmetric": abs(self.g2 - g2_sym) / max(abs(self.g2), self.scale**2),
            "g3_symmetric": abs(self.g3 - g3_sym) / max(abs(self.g3), self.scale**3),
            "legendre": abs(self.tau.tau * self.eta1 - self.eta2 - 2j * cmath.pi),
        }

    def to_dict(self) -> dict:
        return {
            "tau": self.tau.to_dict(),
            "e1": _pair(self.e1),
            "e2": _pair(self.e2),
            "e3": _pair(self.e3),
            "g2": _pair(self.g2),
            "g3": _pair(self.g3),
            "eta1": _pair(self.eta1),
            "eta2": _pair(self.eta2),
        }


@dataclass(frozen=True)
class DTauInvariants:
    """Analytic tau-derivatives of the lattice invariants."""

    deta1: complex
    de1: complex
    de2: complex
    de3: complex
    dg2: complex
    dg3: complex
    tau: ModuliPoint

    def de(self, k: int) -> complex:
        return (self.de1, self.de2, self.de3)[k - 1]

    def to_dict(self) -> dict:
        return {
            "tau": self.tau.to_dict(),
            "deta1": _pair(self.deta1),
            "de1": _pair(self.de1),
            "de2": _pair(self.de2),
            "de3": _pair(self.de3),
            "dg2": _pair(self.dg2),
            "dg3": _pair(self.dg3),
        }
