import numpy as np

from torus_zeros.models.moduli import ExtendedScalar, ModuliPoint, Rectangle

# random tau stay in the band where the theta series converge fast
SAMPLE_FLOOR = 0.3
SAMPLE_CEILING = 2.5


def sample_taus(rng: np.random.Generator, region: Rectangle, count: int) -> list[ModuliPoint]:
    floor = max(region.im_min, SAMPLE_FLOOR)
    ceiling = max(min(region.im_max, SAMPLE_CEILING), floor + 0.5)
    re = rng.uniform(region.re_min, region.re_max, count)
    im = rng.uniform(floor, ceiling, count)
    return [ModuliPoint(float(a), float(b)) for a, b in zip(re, im)]


def sample_C(rng: np.random.Generator) -> ExtendedScalar:
    """A tau-independent C with |Re C| <= 2 and |Im C| <= 2."""
    return ExtendedScalar.finite(complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))


def sample_torus_point(rng: np.random.Generator, tau: ModuliPoint) -> complex:
    """z = r + s tau with r, s kept away from the lattice."""
    r, s = rng.uniform(0.1, 0.9, 2)
    return complex(r + s * tau.tau)
