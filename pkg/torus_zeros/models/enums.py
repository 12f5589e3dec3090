from enum import Enum


class PhiBranch(Enum):
    PLUS = "plus"
    MINUS = "minus"
    K1 = "k1"
    K2 = "k2"
    K3 = "k3"

    @property
    def k(self) -> int | None:
        """Half-period index for the k-branches, None for plus/minus."""
        return {"k1": 1, "k2": 2, "k3": 3}.get(self.value)

    @property
    def sign(self) -> int | None:
        return {"plus": 1, "minus": -1}.get(self.value)


class DegeneracyCurveId(Enum):
    C12 = "C12"
    C13 = "C13"
    C23 = "C23"
    CTILDE_PLUS = "Ctilde_plus"
    CTILDE_MINUS = "Ctilde_minus"

    @property
    def complement(self) -> int | None:
        """The k with {i, j, k} = {1, 2, 3} for the half-period curves."""
        return {"C12": 3, "C13": 2, "C23": 1}.get(self.value)

    @property
    def sign(self) -> int | None:
        return {"Ctilde_plus": 1, "Ctilde_minus": -1}.get(self.value)

    @property
    def color(self) -> str:
        # fixed palette, one color per curve
        return {
            "C12": "#1f77b4",
            "C13": "#2ca02c",
            "C23": "#d62728",
            "Ctilde_plus": "#9467bd",
            "Ctilde_minus": "#ff7f0e",
        }[self.value]


class CriticalKind(Enum):
    HALF_PERIOD = "half_period"
    Q_PLUS = "q_plus"
    Q_MINUS = "q_minus"


class GradientCase(Enum):
    """Which analytic gradient formula applies at a traced point."""

    F_ZERO = "f_zero"
    PHI_ZERO = "phi_zero"
    REGULAR = "regular"


class Suite(Enum):
    IDENTITIES = "identities"
    DERIVATIVES = "derivatives"
    RICCATI0 = "riccati0"
    RICCATI1 = "riccati1"
    OKAMOTO = "okamoto"
    HESSIAN = "hessian"
    LEMMA22 = "lemma22"
    PVI = "pvi"
    UNIVALENCE = "univalence"
    ORBIT = "orbit"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    SVG = "svg"
