"""
Zero level sets of the curve fields by marching squares.

The field is sampled on the grid, every cell edge with a sign change is
refined with brentq, and the crossings are chained into polylines through
the cells they share. A sign change that refines to a point where the field
is not small is a jump of the principal square root, not a zero, and is
dropped.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from torus_zeros.config.run_config import get_run_config
from torus_zeros.curves.fields import field_arrays, gradient_witness
from torus_zeros.exceptions.verification import DisjointnessViolationException
from torus_zeros.green.hessian import hessian_q
from torus_zeros.kernel.weierstrass import invariants
from torus_zeros.models.curves import CurveDecomposition, CurvePolyline, GridSpec
from torus_zeros.models.enums import DegeneracyCurveId, GradientCase
from torus_zeros.models.moduli import ModuliPoint
from torus_zeros.moduli.orbit import s_orbit
from torus_zeros.utils.workers import parallel_map

logger = logging.getLogger(__name__)

# edge key: ("h", i, j) joins nodes (i, j)-(i+1, j); ("v", i, j) joins (i, j)-(i, j+1)
EdgeKey = tuple[str, int, int]

_ROWS_PER_TASK = 8


@dataclass(frozen=True)
class Crossing:
    edge: EdgeKey
    tau: complex
    residual: float
    grad_norm: float = 0.0
    mismatch: float = 0.0
    case: GradientCase = GradientCase.REGULAR
    near_orbit: bool = False


def _axes(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    return (
        np.linspace(grid.rect.re_min, grid.rect.re_max, grid.nx),
        np.linspace(grid.rect.im_min, grid.rect.im_max, grid.ny),
    )


def sample_field(curve: DegeneracyCurveId, grid: GridSpec) -> np.ndarray:
    """Field values on the grid nodes, shape (nx, ny)."""
    xs, ys = _axes(grid)
    threads = get_run_config().thread_count
    blocks = [xs[i : i + _ROWS_PER_TASK] for i in range(0, grid.nx, _ROWS_PER_TASK)]

    def evaluate(block: np.ndarray) -> np.ndarray:
        return field_arrays(curve, block[:, None] + 1j * ys[None, :]).value

    return np.concatenate(parallel_map(evaluate, blocks, threads), axis=0)


def _sign_changes(values: np.ndarray) -> list[EdgeKey]:
    positive = values > 0
    edges: list[EdgeKey] = []
    horizontal = positive[:-1, :] != positive[1:, :]
    vertical = positive[:, :-1] != positive[:, 1:]
    edges += [("h", int(i), int(j)) for i, j in zip(*np.nonzero(horizontal))]
    edges += [("v", int(i), int(j)) for i, j in zip(*np.nonzero(vertical))]
    return edges


def _edge_ends(edge: EdgeKey, xs: np.ndarray, ys: np.ndarray) -> tuple[complex, complex]:
    kind, i, j = edge
    start = complex(xs[i], ys[j])
    end = complex(xs[i + 1], ys[j]) if kind == "h" else complex(xs[i], ys[j + 1])
    return start, end


def _refine(curve: DegeneracyCurveId, edge: EdgeKey, xs, ys, values, refine_tol: float) -> Crossing:
    kind, i, j = edge
    start, end = _edge_ends(edge, xs, ys)
    v0 = values[i, j]
    v1 = values[i + 1, j] if kind == "h" else values[i, j + 1]

    def along(s: float) -> float:
        return float(field_arrays(curve, np.array([start + s * (end - start)])).value[0])

    if v0 == 0:
        s = 0.0
    elif v1 == 0:
        s = 1.0
    else:
        s = brentq(along, 0.0, 1.0, xtol=refine_tol / abs(end - start))

    tau = start + s * (end - start)
    result = field_arrays(curve, np.array([tau]))
    return Crossing(edge=edge, tau=tau, residual=float(abs(result.value[0]) / result.scale[0]))


def _cell_edges(i: int, j: int) -> tuple[EdgeKey, EdgeKey, EdgeKey, EdgeKey]:
    """bottom, right, top, left"""
    return ("h", i, j), ("v", i + 1, j), ("h", i, j + 1), ("v", i, j)


def _pair_cell(curve, i, j, present, xs, ys, values) -> list[tuple[EdgeKey, EdgeKey]] | None:
    bottom, right, top, left = _cell_edges(i, j)
    found = [e for e in (bottom, right, top, left) if e in present]
    if len(found) == 2:
        return [(found[0], found[1])]
    if len(found) == 4:
        # saddle: the center sign decides which corners are joined
        center = complex(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]))
        center_value = field_arrays(curve, np.array([center])).value[0]
        if (center_value > 0) == (values[i, j] > 0):
            return [(bottom, right), (left, top)]
        return [(bottom, left), (right, top)]
    return None


def _cells_of(edge: EdgeKey, nx: int, ny: int) -> list[tuple[int, int]]:
    kind, i, j = edge
    if kind == "h":
        cells = [(i, j - 1), (i, j)]
    else:
        cells = [(i - 1, j), (i, j)]
    return [(a, b) for a, b in cells if 0 <= a < nx - 1 and 0 <= b < ny - 1]


def _chain(links: dict[EdgeKey, list[EdgeKey]]) -> list[tuple[list[EdgeKey], bool]]:
    """Walk the crossing graph; open chains first from their ends, then cycles."""
    visited: set[EdgeKey] = set()
    chains: list[tuple[list[EdgeKey], bool]] = []

    def walk(start: EdgeKey) -> tuple[list[EdgeKey], bool]:
        path = [start]
        visited.add(start)
        current = start
        while True:
            following = [n for n in links[current] if n not in visited]
            if not following:
                closed = len(path) > 2 and start in links[current]
                return path, closed
            current = following[0]
            visited.add(current)
            path.append(current)

    nodes = sorted(links)
    for node in nodes:
        if node not in visited and len(links[node]) < 2:
            chains.append(walk(node))
    for node in nodes:
        if node not in visited:
            chains.append(walk(node))
    return chains


def zero_crossings(curve: DegeneracyCurveId, refined: list[Crossing], residual_tol: float) -> dict[EdgeKey, Crossing]:
    """
    Refined sign changes kept as curve points, by edge.

    The Ctilde fields take a principal square root, so a sign change with a
    large residual there is a jump across the cut and is dropped. The C_ij
    fields are continuous: every sign change is kept and a large residual
    shows up on its polyline.
    """
    if curve.complement is not None:
        failing = sum(1 for c in refined if not c.residual < residual_tol)
        if failing:
            logger.warning(f"{curve.value}: {failing} crossings refine to residuals above {residual_tol:g}")
        return {c.edge: c for c in refined}

    crossings = {c.edge: c for c in refined if c.residual < residual_tol}
    jumps = len(refined) - len(crossings)
    if jumps:
        logger.warning(f"{curve.value}: dropped {jumps} sign changes that are branch jumps, not zeros")
    return crossings


def _witness(curve: DegeneracyCurveId, crossing: Crossing, orbit: list[complex], near: float) -> Crossing:
    grad_norm, mismatch, case = gradient_witness(curve, crossing.tau)
    near_orbit = any(abs(crossing.tau - p) < near for p in orbit)
    return Crossing(
        edge=crossing.edge,
        tau=crossing.tau,
        residual=crossing.residual,
        grad_norm=grad_norm,
        mismatch=mismatch,
        case=case,
        near_orbit=near_orbit,
    )


def trace(curve: DegeneracyCurveId | str, grid: GridSpec) -> list[CurvePolyline]:
    """
    Polylines of the zero set of the curve field inside grid.rect.

    Every point carries |H| / scale, |grad H| / scale, the gradient case
    and whether it lies within two cells of the orbit of rho.
    """
    curve = DegeneracyCurveId(curve)
    config = get_run_config()
    tol = config.tolerances
    xs, ys = _axes(grid)
    values = sample_field(curve, grid)

    candidates = _sign_changes(values)
    refined = parallel_map(
        lambda e: _refine(curve, e, xs, ys, values, grid.refine_tol),
        candidates,
        config.thread_count,
    )
    crossings = zero_crossings(curve, refined, tol.curve_residual)

    orbit = [p.tau for p in s_orbit(grid.rect)]
    near = 2 * grid.cell_diagonal
    witnessed = parallel_map(lambda c: _witness(curve, c, orbit, near), list(crossings.values()), config.thread_count)
    crossings = {c.edge: c for c in witnessed}

    links: dict[EdgeKey, list[EdgeKey]] = {edge: [] for edge in crossings}
    cells = sorted({cell for edge in crossings for cell in _cells_of(edge, grid.nx, grid.ny)})
    inconsistent = 0
    for i, j in cells:
        pairs = _pair_cell(curve, i, j, crossings, xs, ys, values)
        if pairs is None:
            if any(e in crossings for e in _cell_edges(i, j)):
                inconsistent += 1
            continue
        for a, b in pairs:
            links[a].append(b)
            links[b].append(a)
    if inconsistent:
        logger.warning(f"{curve.value}: {inconsistent} cells with an odd number of crossings; grid may be too coarse")

    polylines = []
    for chain, closed in _chain(links):
        points = [crossings[e] for e in chain]
        polylines.append(
            CurvePolyline(
                curve_id=curve,
                points=[ModuliPoint.from_complex(c.tau) for c in points],
                residuals=[c.residual for c in points],
                grad_norms=[c.grad_norm for c in points],
                mismatches=[c.mismatch for c in points],
                cases=[c.case for c in points],
                near_orbit=[c.near_orbit for c in points],
                closed=closed,
            )
        )

    mismatched = [c for c in crossings.values() if c.mismatch > tol.gradient_check and not c.near_orbit]
    if mismatched:
        logger.warning(f"{curve.value}: analytic and numeric gradients disagree at {len(mismatched)} points")

    polylines.sort(key=lambda p: (-len(p), p.points[0].re, p.points[0].im))
    logger.info(f"{curve.value} on {grid.rect} ({grid.nx}x{grid.ny}): {len(polylines)} polylines, {len(crossings)} points")
    return polylines


def gradient_mismatches(polylines: list[CurvePolyline]) -> float:
    return max((p.max_mismatch for p in polylines), default=0.0)


def regrid_stability(curve: DegeneracyCurveId, grid: GridSpec, factor: int = 2) -> float:
    """
    Largest distance, in coarse cell diagonals, from a coarse-grid point to
    the nearest point traced on the refined grid.
    """
    coarse = [p.tau for line in trace(curve, grid) for p in line.points]
    fine = np.array([p.tau for line in trace(curve, grid.refined(factor)) for p in line.points])
    if not coarse or fine.size == 0:
        return 0.0 if not coarse and fine.size == 0 else math.inf
    distances = [float(np.min(np.abs(fine - tau))) for tau in coarse]
    return max(distances) / grid.cell_diagonal


def _relative_det(sign: int, tau: ModuliPoint) -> float:
    matrix = hessian_q(sign, tau)
    return abs(matrix.det) / matrix.scale**4


def decompose_c_pm(sign: int, grid: GridSpec) -> CurveDecomposition:
    """
    C_pm split into the traced Ctilde_pm and the orbit points of rho in the region.

    Raises:
        DisjointnessViolationException: a traced point comes within
            disjoint_cells grid cells of an orbit point.
    """
    tol = get_run_config().tolerances
    curve = DegeneracyCurveId.CTILDE_PLUS if sign > 0 else DegeneracyCurveId.CTILDE_MINUS
    polylines = trace(curve, grid)
    orbit = s_orbit(grid.rect)

    curve_points = [p for line in polylines for p in line.points]
    margin = math.inf
    nearest = None
    for point in curve_points:
        for orbit_point in orbit:
            distance = abs(point.tau - orbit_point.tau)
            if distance < margin:
                margin, nearest = distance, orbit_point
    required = tol.disjoint_cells * grid.cell_diagonal
    if margin <= required:
        raise DisjointnessViolationException(margin=margin, required=required, tau=nearest)

    det_on_curve = max((_relative_det(sign, p) for p in curve_points), default=0.0)
    det_on_orbit = max((_relative_det(sign, p) for p in orbit), default=0.0)
    logger.info(
        f"{curve.value}: margin {margin:.3e} (required {required:.3e}), "
        f"det on curve {det_on_curve:.2e}, on orbit {det_on_orbit:.2e}"
    )
    return CurveDecomposition(
        sign=sign,
        polylines=polylines,
        orbit_points=orbit,
        margin=margin,
        required=required,
        det_on_curve=det_on_curve,
        det_on_orbit=det_on_orbit,
    )


def min_g2_on_curve(polylines: list[CurvePolyline]) -> float:
    """Smallest |g_2| / scale^2 over the traced points."""
    values = []
    for line in polylines:
        for point in line.points:
            inv = invariants(point)
            values.append(abs(inv.g2) / inv.scale**2)
    return min(values, default=math.inf)
