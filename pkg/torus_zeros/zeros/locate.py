"""
Zero isolation by recursive quadrisection plus Newton refinement.

Cells are processed level by level; the cells of one level are independent
and go through parallel_map. Children do not nudge: when a zero sits on a
dividing line the parent is split again at shifted fractions, so the
children always tile the parent exactly and their windings must add up.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from torus_zeros.config.run_config import get_run_config
from torus_zeros.exceptions.numerical import (
    BoundaryTooCloseException,
    MaxDepthException,
    NonIntegerWindingException,
)
from torus_zeros.models.moduli import ExtendedScalar, FamilyIndex, ModuliPoint, Rectangle
from torus_zeros.models.zeros import SimpleZeroVerdict, ZeroRecord, ZeroScan
from torus_zeros.moduli.functions import family_evaluator, lemma_witness
from torus_zeros.utils.workers import parallel_map
from torus_zeros.zeros.contour import (
    Evaluator,
    circle_winding,
    contour_winding,
    grid_winding_count,
    round_winding,
    winding_value,
)

logger = logging.getLogger(__name__)

# split fractions tried in order when a dividing line passes too close to a zero
_SPLITS = ((0.5, 0.5), (0.47, 0.53), (0.53, 0.46), (0.44, 0.57), (0.57, 0.43), (0.41, 0.6))
_CHECK_RADIUS = 1e-4
_POLISH_STEPS = 2
_STEP_FLOOR = 1e-14


@dataclass(frozen=True)
class _Cell:
    rect: Rectangle
    winding: int
    depth: int


def _at(f: Evaluator, tau: complex) -> complex:
    return complex(np.asarray(f(np.array([tau], dtype=complex)))[0])


def _polish(
    f: Evaluator,
    f_prime: Evaluator,
    tau: complex,
    value: complex,
    derivative: complex,
    multiplicity: int,
    steps: int,
) -> tuple[complex, complex, complex]:
    # extra steps past the residual test; a step that does not lower |f| is refused
    for _ in range(steps):
        if derivative == 0 or not np.isfinite(derivative):
            break
        step = multiplicity * value / derivative
        if abs(step) < _STEP_FLOOR * max(1.0, abs(tau)):
            break
        candidate = tau - step
        candidate_value = _at(f, candidate)
        if not np.isfinite(candidate_value) or abs(candidate_value) > abs(value):
            break
        tau, value, derivative = candidate, candidate_value, _at(f_prime, candidate)
    return tau, value, derivative


def newton_refine(
    f: Evaluator,
    f_prime: Evaluator,
    start: complex,
    target: float,
    max_iter: int,
    multiplicity: int = 1,
    polish: int = _POLISH_STEPS,
) -> tuple[complex, float, float] | None:
    """
    (root, |f(root)|, |f'(root)|), or None when the iteration fails.

    Iterates tau <- tau - m f/f' with m = multiplicity until |f| < target,
    then takes up to polish more steps while they keep lowering |f|.
    """
    floor = get_run_config().tolerances.min_im
    tau = complex(start)
    for _ in range(max_iter):
        value = _at(f, tau)
        derivative = _at(f_prime, tau)
        if abs(value) < target:
            tau, value, derivative = _polish(f, f_prime, tau, value, derivative, multiplicity, polish)
            return tau, abs(value), abs(derivative)
        if derivative == 0 or not np.isfinite(derivative):
            return None
        tau = tau - multiplicity * value / derivative
        if not np.isfinite(tau) or tau.imag < floor:
            return None
    return None


def merge_zeros(records: list[ZeroRecord], tol: float) -> list[ZeroRecord]:
    """Zeros within tol of each other are one zero; the smaller residual wins."""
    kept: list[ZeroRecord] = []
    for record in sorted(records, key=lambda r: r.newton_residual):
        tau = record.location.tau
        if any(abs(tau - other.location.tau) < tol for other in kept):
            logger.debug(f"merged duplicate zero at {record.location}")
            continue
        kept.append(record)
    return sorted(kept, key=lambda r: (r.location.re, r.location.im))


class _Isolator:
    def __init__(self, f: Evaluator, f_prime: Evaluator, scale: float):
        self.f = f
        self.f_prime = f_prime
        self.scale = scale
        self.config = get_run_config()

    def _refine_simple(self, cell: _Cell) -> ZeroRecord | None:
        tol = self.config.tolerances
        result = newton_refine(
            self.f,
            self.f_prime,
            cell.rect.center,
            tol.newton * self.scale,
            self.config.newton_max_iter,
        )
        if result is None:
            return None

        tau, residual, derivative = result
        if not cell.rect.contains(tau, margin=1e-9 * cell.rect.diagonal):
            logger.debug(f"Newton left cell {cell.rect} for {tau}")
            return None

        radius = min(_CHECK_RADIUS, 0.25 * cell.rect.diagonal)
        local = circle_winding(self.f, self.f_prime, tau, radius)
        if abs(local - 1) > 0.25:
            logger.debug(f"circle winding {local} around {tau} is not 1")
            return None

        return ZeroRecord(
            location=ModuliPoint.from_complex(tau),
            winding=1,
            derivative_magnitude=derivative,
            newton_residual=residual,
            scale=self.scale,
        )

    def _settle_at_depth(self, cell: _Cell) -> ZeroRecord:
        """
        Cluster or multiple zero left at max depth.

        Starts from the |f| minimum on a grid, refines with Newton scaled by
        the cell's winding, and confirms the multiplicity on a circle.
        """
        xs = np.linspace(cell.rect.re_min, cell.rect.re_max, 17)
        ys = np.linspace(cell.rect.im_min, cell.rect.im_max, 17)
        grid = (xs[:, None] + 1j * ys[None, :]).ravel()
        values = np.abs(np.asarray(self.f(grid)))
        start = complex(grid[int(np.argmin(values))])

        result = newton_refine(
            self.f,
            self.f_prime,
            start,
            self.config.tolerances.newton * self.scale,
            self.config.newton_max_iter,
            multiplicity=cell.winding,
        )
        if result is None or not cell.rect.contains(result[0], margin=1e-9 * cell.rect.diagonal):
            logger.debug(f"Newton with multiplicity {cell.winding} failed from {start}")
            raise MaxDepthException(depth=cell.depth, rect=str(cell.rect), winding=cell.winding)
        center, residual, derivative = result

        local = circle_winding(self.f, self.f_prime, center, cell.rect.diagonal)
        if abs(local - cell.winding) > 0.25:
            raise MaxDepthException(depth=cell.depth, rect=str(cell.rect), winding=cell.winding)

        logger.warning(f"zero of multiplicity {cell.winding} recorded at {center} (depth {cell.depth})")
        return ZeroRecord(
            location=ModuliPoint.from_complex(center),
            winding=cell.winding,
            derivative_magnitude=derivative,
            newton_residual=residual,
            scale=self.scale,
        )

    def _subdivide(self, cell: _Cell) -> list[_Cell]:
        dip = self.config.tolerances.boundary_dip * self.scale
        for fx, fy in _SPLITS:
            children = cell.rect.split(fx, fy)
            windings = []
            for child in children:
                value, boundary_min, _ = winding_value(self.f, self.f_prime, child)
                if boundary_min < dip:
                    break
                try:
                    windings.append(round_winding(value, child))
                except NonIntegerWindingException:
                    break
            if len(windings) != 4:
                logger.debug(f"split {fx},{fy} of {cell.rect} rejected")
                continue
            if sum(windings) != cell.winding:
                logger.warning(f"children of {cell.rect} wind {windings}, parent {cell.winding}; resplitting")
                continue
            return [_Cell(child, w, cell.depth + 1) for child, w in zip(children, windings) if w != 0]

        raise BoundaryTooCloseException(rect=str(cell.rect), nudges=len(_SPLITS))

    def process(self, cell: _Cell) -> tuple[list[ZeroRecord], list[_Cell]]:
        if cell.winding == 1:
            record = self._refine_simple(cell)
            if record is not None:
                return [record], []
        if cell.depth >= self.config.max_depth:
            return [self._settle_at_depth(cell)], []
        return [], self._subdivide(cell)


def scan_zeros(f: Evaluator, f_prime: Evaluator, rect: Rectangle) -> ZeroScan:
    """
    Every zero of f in rect.

    Raises:
        BoundaryTooCloseException, NonIntegerWindingException: from the
            winding integrals.
        MaxDepthException: a cell still holds several zeros at max_depth.
    """
    config = get_run_config()
    root = contour_winding(f, f_prime, rect)
    isolator = _Isolator(f, f_prime, root.scale)

    level = [_Cell(root.rect, root.winding, 0)] if root.winding else []
    records: list[ZeroRecord] = []
    cells = 0
    deepest = 0
    while level:
        outcomes = parallel_map(isolator.process, level, config.thread_count)
        cells += len(level)
        deepest = max(deepest, max(c.depth for c in level))
        level = []
        for found, children in outcomes:
            records.extend(found)
            level.extend(children)

    records = merge_zeros(records, config.tolerances.merge)
    total = sum(r.winding for r in records)
    if total != root.winding:
        logger.warning(f"located {total} zeros in {root.rect}, boundary integral says {root.winding}")

    logger.info(f"{len(records)} zeros in {root.rect} ({cells} cells, depth {deepest})")
    return ZeroScan(records=records, root=root, cells=cells, max_depth=deepest)


def locate_zeros(f: Evaluator, f_prime: Evaluator, rect: Rectangle) -> list[ZeroRecord]:
    return scan_zeros(f, f_prime, rect).records


def verdict_from_scan(
    scan: ZeroScan,
    label: str,
    k: int | None = None,
    C: ExtendedScalar | None = None,
    grid: tuple[int, int] | None = None,
    f: Evaluator | None = None,
) -> SimpleZeroVerdict:
    """
    Simplicity verdict over a finished scan, with Lemma witnesses when the
    family (k, C) is known and a dense-grid count when grid and f are given.
    """
    tol = get_run_config().tolerances
    records = scan.records
    if k is not None:
        records = [replace(r, witness=lemma_witness(k, C, r.location)) for r in records]

    witnesses = [r.witness.relative for r in records if r.witness is not None]
    min_witness = min(witnesses, default=float("inf"))
    grid_count = grid_winding_count(f, scan.root.rect, *grid) if grid and f else None

    notes = []
    if scan.root.nudges:
        notes.append(f"rectangle nudged {scan.root.nudges} times to {scan.root.rect}")
    if grid_count is not None and grid_count != scan.root.winding:
        notes.append(f"grid count {grid_count} differs from contour count {scan.root.winding}")

    return SimpleZeroVerdict(
        zeros=records,
        all_simple=all(r.is_simple(tol.simple_floor) for r in records),
        min_derivative=min((r.derivative_magnitude / r.scale for r in records), default=float("inf")),
        boundary_margin=scan.root.boundary_margin,
        label=label,
        rect=scan.root.rect,
        winding_total=scan.root.winding,
        witnesses_ok=min_witness > tol.lemma_witness,
        min_witness=min_witness,
        grid_count=grid_count,
        notes=notes,
    )


def verify_simple(
    family: FamilyIndex | int,
    C: ExtendedScalar | complex | None,
    rect: Rectangle,
    grid: tuple[int, int] | None = None,
) -> SimpleZeroVerdict:
    """Locate the zeros of f_{k,C} in rect and certify each one simple."""
    k = FamilyIndex.of(family).k
    C = ExtendedScalar.of(C)
    evaluator = family_evaluator(k, C)
    scan = scan_zeros(evaluator.f, evaluator.f_prime, rect)
    verdict = verdict_from_scan(scan, evaluator.label, k=k, C=C, grid=grid, f=evaluator.f)
    logger.info(
        f"{evaluator.label} on {rect}: {len(verdict.zeros)} zeros, all_simple={verdict.all_simple}, "
        f"min |f'|/scale={verdict.min_derivative:.3e}"
    )
    return verdict
