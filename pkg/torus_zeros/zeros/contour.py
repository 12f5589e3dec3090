"""
Argument-principle integrals over rectangle boundaries and circles.

The boundary integral (1 / 2 pi i) * integral f'/f dz is summed with
Gauss-Legendre panels. A panel is accepted once it agrees with the sum of
its two halves; panels near a zero close to the boundary keep splitting.
"""

import logging
from functools import lru_cache
from typing import Callable

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.numerical import BoundaryTooCloseException, NonIntegerWindingException
from torus_zeros.models.moduli import Rectangle
from torus_zeros.models.zeros import WindingResult

logger = logging.getLogger(__name__)

Evaluator = Callable[[np.ndarray], np.ndarray]

_INITIAL_PANELS = 4  # per edge
_MAX_ROUNDS = 16
_SCALE_POINTS = 64


@lru_cache(maxsize=8)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _evaluate(f: Evaluator, points: np.ndarray) -> np.ndarray:
    return np.asarray(f(points.ravel()), dtype=complex).reshape(points.shape)


def boundary_samples(rect: Rectangle, count: int = _SCALE_POINTS) -> np.ndarray:
    """count points on the boundary, count / 4 per edge at panel midpoints."""
    per_edge = max(count // 4, 1)
    t = (np.arange(per_edge) + 0.5) / per_edge
    corners = rect.corners
    edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    return np.concatenate([a + (b - a) * t for a, b in edges])


def boundary_scale(f: Evaluator, rect: Rectangle) -> float:
    """Median of |f| over the boundary samples; the reference for relative tolerances."""
    values = np.abs(_evaluate(f, boundary_samples(rect)))
    scale = float(np.median(values))
    return scale if scale > 0 else 1.0


def _panel_sums(
    f: Evaluator,
    f_prime: Evaluator,
    starts: np.ndarray,
    ends: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Per-panel integral of f'/f over [start, end] and its two halves."""
    x, w = _gauss_legendre(get_run_config().quadrature_nodes)
    mids = 0.5 * (starts + ends)
    # whole panel, left half, right half stacked along a new axis
    a = np.stack([starts, starts, mids])
    b = np.stack([ends, mids, ends])
    half = 0.5 * (b - a)
    nodes = 0.5 * (a + b)[..., None] + half[..., None] * x

    values = _evaluate(f, nodes)
    derivatives = _evaluate(f_prime, nodes)
    with np.errstate(divide="ignore", invalid="ignore"):
        sums = half * np.sum(w * derivatives / values, axis=-1)

    whole = sums[0]
    refined = sums[1] + sums[2]
    return whole, refined, float(np.min(np.abs(values)))


def _integrate(
    f: Evaluator,
    f_prime: Evaluator,
    rect: Rectangle,
) -> tuple[complex, float, int]:
    """(winding value, min |f| seen on the boundary, panel count)."""
    settle = get_run_config().tolerances.winding_settle
    perimeter = 2 * (rect.width + rect.height)

    corners = rect.corners
    t = np.arange(_INITIAL_PANELS) / _INITIAL_PANELS
    starts = np.concatenate([corners[i] + (corners[(i + 1) % 4] - corners[i]) * t for i in range(4)])
    ends = np.concatenate(
        [corners[i] + (corners[(i + 1) % 4] - corners[i]) * (t + 1.0 / _INITIAL_PANELS) for i in range(4)]
    )

    total = 0j
    boundary_min = np.inf
    panels = 0
    for round_index in range(_MAX_ROUNDS):
        whole, refined, minimum = _panel_sums(f, f_prime, starts, ends)
        boundary_min = min(boundary_min, minimum)

        lengths = np.abs(ends - starts)
        allowed = 2 * np.pi * settle * lengths / perimeter
        error = np.abs(whole - refined)
        accepted = np.isfinite(refined) & (error < allowed)

        if round_index == _MAX_ROUNDS - 1:
            accepted = np.ones_like(accepted)
            if not np.all(error < allowed):
                logger.debug(f"winding quadrature on {rect} stopped with {np.sum(error >= allowed)} open panels")

        total += np.sum(refined[accepted])
        panels += int(np.sum(accepted))

        open_starts, open_ends = starts[~accepted], ends[~accepted]
        if open_starts.size == 0:
            break
        mids = 0.5 * (open_starts + open_ends)
        starts = np.concatenate([open_starts, mids])
        ends = np.concatenate([mids, open_ends])

    return complex(total / (2j * np.pi)), float(boundary_min), panels


def winding_value(f: Evaluator, f_prime: Evaluator, rect: Rectangle) -> tuple[complex, float, int]:
    """Raw argument-principle value on rect, no nudging and no rounding."""
    return _integrate(f, f_prime, rect)


def round_winding(value: complex, rect: Rectangle) -> int:
    nearest = round(value.real)
    distance = abs(value - nearest)
    if not np.isfinite(distance) or distance > 0.25:
        raise NonIntegerWindingException(value=value, rect=str(rect))
    if distance > get_run_config().tolerances.winding_settle:
        logger.warning(f"winding on {rect} settled only to {distance:.2e} of {nearest}")
    return int(nearest)


def contour_winding(
    f: Evaluator,
    f_prime: Evaluator,
    rect: Rectangle,
    scale: float | None = None,
    nudge: bool = True,
) -> WindingResult:
    """
    Number of zeros of f inside rect, counted with multiplicity.

    When |f| dips below boundary_dip * scale on the boundary the rectangle
    is expanded by nudge_fraction and the integral repeated, up to
    max_nudges times.

    Raises:
        BoundaryTooCloseException: still a boundary dip after the last nudge
            (or at once when nudge is False).
        NonIntegerWindingException: the value is not within 0.25 of an integer.
    """
    config = get_run_config()
    tol = config.tolerances
    current = rect

    for attempt in range(config.max_nudges + 1):
        current_scale = scale if scale is not None else boundary_scale(f, current)
        value, boundary_min, panels = _integrate(f, f_prime, current)

        if boundary_min >= tol.boundary_dip * current_scale:
            return WindingResult(
                winding=round_winding(value, current),
                value=value,
                rect=current,
                scale=current_scale,
                boundary_min=boundary_min,
                nudges=attempt,
                panels=panels,
            )

        if not nudge or attempt == config.max_nudges:
            break
        logger.warning(
            f"|f| = {boundary_min:.2e} on the boundary of {current} "
            f"(scale {current_scale:.2e}), nudging ({attempt + 1}/{config.max_nudges})"
        )
        current = current.expanded(tol.nudge_fraction)

    raise BoundaryTooCloseException(rect=str(current), nudges=config.max_nudges if nudge else 0)


def winding_count(f: Evaluator, f_prime: Evaluator, rect: Rectangle) -> int:
    """contour_winding reduced to the integer."""
    return contour_winding(f, f_prime, rect).winding


def circle_winding(
    f: Evaluator,
    f_prime: Evaluator,
    center: complex,
    radius: float,
    nodes: int = 128,
) -> complex:
    """(1 / 2 pi i) * integral of f'/f over a circle, by the trapezoid rule."""
    unit = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    points = center + radius * unit
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = _evaluate(f_prime, points) / _evaluate(f, points)
    return complex(np.mean(ratio * radius * unit))


def phase_winding(values: np.ndarray) -> float:
    """Winding of a closed loop of samples about 0, from wrapped phase increments."""
    values = np.asarray(values, dtype=complex)
    increments = np.angle(np.roll(values, -1) / values)
    return float(np.sum(increments) / (2 * np.pi))


def grid_winding_count(f: Evaluator, rect: Rectangle, nx: int, ny: int) -> int:
    """
    Discrete argument principle over an nx x ny grid of sample points.

    Each cell contributes the rounded sum of the wrapped phase increments
    around its four edges; the count is correct as long as the phase of f
    changes by less than pi between neighbouring samples.
    """
    xs = np.linspace(rect.re_min, rect.re_max, nx)
    ys = np.linspace(rect.im_min, rect.im_max, ny)
    grid = xs[:, None] + 1j * ys[None, :]
    values = _evaluate(f, grid)

    with np.errstate(divide="ignore", invalid="ignore"):
        along_x = np.nan_to_num(np.angle(values[1:, :] / values[:-1, :]))
        along_y = np.nan_to_num(np.angle(values[:, 1:] / values[:, :-1]))

    cells = along_x[:, :-1] + along_y[1:, :] - along_x[:, 1:] - along_y[:-1, :]
    counts = np.rint(cells / (2 * np.pi)).astype(int)
    total = int(np.sum(counts))
    logger.debug(f"grid winding on {rect} at {nx}x{ny}: {total} ({int(np.sum(counts != 0))} cells)")
    return total
