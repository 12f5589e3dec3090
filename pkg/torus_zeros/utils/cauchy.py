"""Cauchy-integral differentiation of holomorphic functions.

The derivatives come from the discrete Fourier coefficients of f sampled on a
circle, f^(k)(z0) = k! c_k / r^k, which is the trapezoid rule applied to the
Cauchy integral and converges geometrically for functions holomorphic on a
disk larger than the circle.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from torus_zeros.config.run_config import get_run_config

logger = logging.getLogger(__name__)

VectorFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CauchyResult:
    """Derivatives at the center plus the quality witnesses of the contour."""

    center: complex
    derivatives: tuple[complex, ...]
    consistency: float  # |c_0 - f(z0)| relative to max |f| on the circle
    tail: float  # largest Fourier coefficient in the upper half, relative

    def derivative(self, order: int) -> complex:
        return self.derivatives[order - 1]

    def ok(self, tol: float) -> bool:
        return self.consistency < tol and self.tail < tol


def cauchy_expansion(
    f: VectorFunction,
    z0: complex,
    order: int = 1,
    radius: float | None = None,
    nodes: int | None = None,
) -> CauchyResult:
    """
    Derivatives of orders 1..order of a vectorized holomorphic f at z0.

    A singularity inside (or too close to) the circle shows up as a
    mismatch between the mean of f over the circle and f(z0), and as
    slowly decaying Fourier coefficients; both are returned so callers can
    reject the point.
    """
    config = get_run_config()
    radius = radius if radius is not None else config.tolerances.cauchy_radius
    nodes = nodes if nodes is not None else config.cauchy_nodes

    theta = 2 * np.pi * np.arange(nodes) / nodes
    samples = np.asarray(f(z0 + radius * np.exp(1j * theta)), dtype=complex)
    center = complex(np.asarray(f(np.array([z0], dtype=complex)), dtype=complex)[0])

    coefficients = np.fft.fft(samples) / nodes
    derivatives = tuple(
        complex(math.factorial(k) * coefficients[k] / radius**k) for k in range(1, order + 1)
    )

    magnitude = max(float(np.max(np.abs(samples))), np.finfo(float).tiny)
    consistency = abs(coefficients[0] - center) / magnitude
    tail = float(np.max(np.abs(coefficients[nodes // 2 - 2 : nodes // 2 + 3]))) / magnitude

    return CauchyResult(center=center, derivatives=derivatives, consistency=consistency, tail=tail)


def cauchy_derivative(
    f: VectorFunction,
    z0: complex,
    order: int = 1,
    radius: float | None = None,
    nodes: int | None = None,
) -> complex:
    """Single derivative of the given order; see cauchy_expansion."""
    return cauchy_expansion(f, z0, order=order, radius=radius, nodes=nodes).derivative(order)
