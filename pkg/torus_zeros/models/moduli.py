import math
from dataclasses import dataclass

from torus_zeros.exceptions.numerical import PrecisionException
from torus_zeros.exceptions.validation import InvalidRangeException


@dataclass(frozen=True)
class ModuliPoint:
    """A point tau = re + im*i of the upper half plane."""

    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise InvalidRangeException(field="tau", value=f"{self.re}+{self.im}i")
        if self.im <= 0:
            raise InvalidRangeException(field="Im tau", value=self.im, min_value=0)

    @property
    def tau(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, tau: complex) -> "ModuliPoint":
        tau = complex(tau)
        return cls(re=float(tau.real), im=float(tau.imag))

    @classmethod
    def of(cls, tau: "ModuliPoint | complex") -> "ModuliPoint":
        if isinstance(tau, ModuliPoint):
            return tau
        return cls.from_complex(tau)

    def require_floor(self, min_im: float) -> "ModuliPoint":
        if self.im < min_im:
            raise PrecisionException(im=self.im, floor=min_im, tau=self.tau)
        return self

    def to_dict(self) -> dict:
        return {"re": self.re, "im": self.im}

    def __str__(self) -> str:
        return f"{self.re!r}{self.im:+}i"


@dataclass(frozen=True)
class TorusPoint:
    """
    A torus coordinate z together with its real lattice coordinates.

    z = r + s*tau for the tau the point was built against. The coordinates
    are what the Green function gradient needs; the complex value is what
    the Weierstrass functions need.
    """

    z: complex
    r: float
    s: float

    @classmethod
    def from_complex(cls, z: complex, tau: ModuliPoint | complex) -> "TorusPoint":
        tau = ModuliPoint.of(tau)
        z = complex(z)
        s = z.imag / tau.im
        r = z.real - s * tau.re
        return cls(z=z, r=r, s=s)

    @classmethod
    def from_lattice(cls, r: float, s: float, tau: ModuliPoint | complex) -> "TorusPoint":
        tau = ModuliPoint.of(tau)
        return cls(z=complex(r + s * tau.re, s * tau.im), r=float(r), s=float(s))

    @classmethod
    def of(cls, z: "TorusPoint | complex", tau: ModuliPoint | complex) -> "TorusPoint":
        if isinstance(z, TorusPoint):
            return z
        return cls.from_complex(z, tau)

    def reduced(self, tau: ModuliPoint | complex) -> tuple["TorusPoint", int, int]:
        """
        Representative in the cell [0,1) x [0,1) of lattice coordinates.

        Returns the reduced point and the translation (m, n) with
        z = z_red + m + n*tau.
        """
        m = math.floor(self.r)
        n = math.floor(self.s)
        return TorusPoint.from_lattice(self.r - m, self.s - n, tau), m, n

    def lattice_distance(self, tau: ModuliPoint | complex) -> float:
        tau = ModuliPoint.of(tau).tau
        m0, n0 = round(self.r), round(self.s)
        return min(
            abs(self.z - (m0 + dm) - (n0 + dn) * tau)
            for dm in (-1, 0, 1)
            for dn in (-1, 0, 1)
        )

    def to_dict(self) -> dict:
        return {"re": self.z.real, "im": self.z.imag, "r": self.r, "s": self.s}


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle in the tau plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if self.im_min <= 0:
            raise InvalidRangeException(field="im_min", value=self.im_min, min_value=0)
        if not self.re_min < self.re_max:
            raise InvalidRangeException(field="re_max", value=self.re_max, min_value=self.re_min)
        if not self.im_min < self.im_max:
            raise InvalidRangeException(field="im_max", value=self.im_max, min_value=self.im_min)

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def corners(self) -> tuple[complex, complex, complex, complex]:
        """Counter-clockwise from the lower-left corner."""
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    def contains(self, tau: complex, margin: float = 0.0) -> bool:
        tau = complex(tau)
        return (
            self.re_min - margin <= tau.real <= self.re_max + margin
            and self.im_min - margin <= tau.imag <= self.im_max + margin
        )

    def boundary_distance(self, tau: complex) -> float:
        tau = complex(tau)
        return min(
            tau.real - self.re_min,
            self.re_max - tau.real,
            tau.imag - self.im_min,
            self.im_max - tau.imag,
        )

    def expanded(self, fraction: float) -> "Rectangle":
        dx = fraction * self.width
        dy = fraction * self.height
        return Rectangle(
            self.re_min - dx,
            self.re_max + dx,
            max(self.im_min - dy, 0.5 * self.im_min),
            self.im_max + dy,
        )

    def split(self, fx: float = 0.5, fy: float = 0.5) -> list["Rectangle"]:
        """Quadrisect at the given fractions; order sw, se, nw, ne."""
        xm = self.re_min + fx * self.width
        ym = self.im_min + fy * self.height
        return [
            Rectangle(self.re_min, xm, self.im_min, ym),
            Rectangle(xm, self.re_max, self.im_min, ym),
            Rectangle(self.re_min, xm, ym, self.im_max),
            Rectangle(xm, self.re_max, ym, self.im_max),
        ]

    def to_dict(self) -> dict:
        return {
            "re_min": self.re_min,
            "re_max": self.re_max,
            "im_min": self.im_min,
            "im_max": self.im_max,
        }

    def __str__(self) -> str:
        return f"{self.re_min!r}:{self.re_max!r}:{self.im_min!r}:{self.im_max!r}"


@dataclass(frozen=True)
class ExtendedScalar:
    """A complex number or the point at infinity."""

    value: complex | None = None

    @classmethod
    def finite(cls, value: complex) -> "ExtendedScalar":
        return cls(value=complex(value))

    @classmethod
    def infinity(cls) -> "ExtendedScalar":
        return cls(value=None)

    @classmethod
    def of(cls, value: "ExtendedScalar | complex | None") -> "ExtendedScalar":
        if isinstance(value, ExtendedScalar):
            return value
        if value is None:
            return cls.infinity()
        return cls.finite(value)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def to_json(self):
        if self.value is None:
            return "inf"
        return {"re": self.value.real, "im": self.value.imag}

    def __str__(self) -> str:
        if self.value is None:
            return "inf"
        return f"{self.value.real!r}{self.value.imag:+}i"


@dataclass(frozen=True)
class FamilyIndex:
    """
    Index k of a function family.

    k = 0 selects the f_0 family; k in {1, 2, 3} selects the half period
    omega_k / 2 with omega_1 = 1, omega_2 = tau, omega_3 = 1 + tau.
    """

    k: int

    def __post_init__(self):
        if self.k not in (0, 1, 2, 3):
            raise InvalidRangeException(field="k", value=self.k, min_value=0, max_value=3)

    @classmethod
    def of(cls, k: "FamilyIndex | int") -> "FamilyIndex":
        if isinstance(k, FamilyIndex):
            return k
        return cls(int(k))

    def half_period(self, tau: complex) -> complex:
        if self.k == 0:
            raise InvalidRangeException(field="k", value=0, min_value=1, max_value=3)
        return {1: 0.5, 2: 0.5 * complex(tau), 3: 0.5 * (1 + complex(tau))}[self.k]

    def others(self) -> tuple[int, int]:
        """The two indices i < j with {i, j, k} = {1, 2, 3}."""
        i, j = sorted({1, 2, 3} - {self.k})
        return i, j


@dataclass(frozen=True)
class ModularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det != 1:
            raise InvalidRangeException(field="det", value=det, min_value=1, max_value=1)

    @classmethod
    def identity(cls) -> "ModularMatrix":
        return cls(1, 0, 0, 1)

    def act(self, tau: complex) -> complex:
        tau = complex(tau)
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def factor(self, tau: complex) -> complex:
        return self.c * complex(tau) + self.d

    @property
    def height(self) -> int:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
