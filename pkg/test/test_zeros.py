"""Zero finder test suite.

The argument-principle machinery is first run on polynomials, where the
answer is known, then on the f_{k,C} families.

Tests:
    1. Contour winding of a polynomial
    2. Discrete grid count against the contour count
    3. Locating simple zeros
    4. A double zero is recorded with multiplicity 2
    5. Merging duplicate zeros
    6. Boundary nudging
    7. verify_simple on f_{k,C} families
    8. Lemma witnesses at the located zeros
    9. A zero constructed from phi_1 is found
    10. Newton polishing past the residual target
    11. A multiple zero that Newton cannot settle raises MaxDepthException
"""

import numpy as np
import pytest

from torus_zeros.config.run_config import RunConfig, init_run_config
from torus_zeros.exceptions.numerical import BoundaryTooCloseException, MaxDepthException
from torus_zeros.models.moduli import ModuliPoint, Rectangle
from torus_zeros.models.zeros import ZeroRecord
from torus_zeros.moduli.functions import f_value, lemma_witness
from torus_zeros.zeros.contour import contour_winding, grid_winding_count, winding_count
from torus_zeros.zeros.locate import locate_zeros, merge_zeros, newton_refine, scan_zeros, verify_simple

RECT = Rectangle(-0.5, 0.5, 0.5, 1.5)
A = 0.12 + 0.71j
B = -0.23 + 1.18j


def _polynomial(*roots):
    def f(tau):
        tau = np.asarray(tau, dtype=complex)
        value = np.ones_like(tau)
        for root in roots:
            value = value * (tau - root)
        return value

    def f_prime(tau):
        tau = np.asarray(tau, dtype=complex)
        total = np.zeros_like(tau)
        for i in range(len(roots)):
            term = np.ones_like(tau)
            for j, root in enumerate(roots):
                if j != i:
                    term = term * (tau - root)
            total = total + term
        return total

    return f, f_prime


def test_1_polynomial_winding():
    """Test the contour integral on a polynomial with two roots in the rectangle.

    Validates:
        - winding 2 with both roots inside, 1 with one, 0 with none
        - the boundary margin is reported relative to the boundary scale
    """
    f, f_prime = _polynomial(A, B, 2 + 3j)
    result = contour_winding(f, f_prime, RECT)
    assert result.winding == 2
    assert abs(result.value - 2) < 1e-3
    assert result.boundary_margin > 0
    assert result.nudges == 0

    assert winding_count(f, f_prime, Rectangle(-0.5, 0.5, 0.5, 1.0)) == 1
    assert winding_count(f, f_prime, Rectangle(0.6, 1.0, 0.5, 1.0)) == 0


def test_2_grid_count_matches_contour():
    """Test the discrete argument principle.

    Validates:
        - the grid count equals the contour count on a fine enough grid
    """
    f, f_prime = _polynomial(A, B)
    assert grid_winding_count(f, RECT, 48, 48) == winding_count(f, f_prime, RECT)


def test_3_locate_simple_zeros():
    """Test isolation and Newton refinement.

    Validates:
        - all three roots found to 1e-12 with residuals below the Newton bar
        - each record is simple with winding 1
        - results sorted by (Re, Im)
    """
    f, f_prime = _polynomial(A, B, 0.3 + 0.72j)
    records = locate_zeros(f, f_prime, RECT)
    assert len(records) == 3
    assert [r.location.re for r in records] == sorted(r.location.re for r in records)

    found = sorted((r.location.tau for r in records), key=lambda t: (t.real, t.imag))
    expected = sorted([A, B, 0.3 + 0.72j], key=lambda t: (t.real, t.imag))
    for tau, root in zip(found, expected):
        assert abs(tau - root) < 1e-12
    assert all(r.relative_residual < 1e-10 for r in records)
    assert all(r.winding == 1 and r.is_simple(1e-6) for r in records)


def test_4_double_zero_is_not_simple():
    """Test that a double zero survives as one record of multiplicity 2.

    Validates:
        - subdivision stops at max_depth
        - the record carries winding 2 and is not simple
        - the recorded point is refined below the Newton residual bar
    """
    init_run_config(RunConfig.for_testing(max_depth=6))
    f, f_prime = _polynomial(A, A)
    scan = scan_zeros(f, f_prime, RECT)
    assert scan.root.winding == 2
    assert len(scan.records) == 1
    record = scan.records[0]
    assert record.winding == 2
    assert not record.is_simple(1e-6)
    assert abs(record.location.tau - A) < RECT.diagonal / 2**6
    assert record.newton_residual < 1e-10 * record.scale
    assert abs(record.location.tau - A) < 1e-8


def test_5_merge_duplicates():
    """Test merging of zeros found twice.

    Validates:
        - records closer than the tolerance collapse to the one with the smaller residual
    """
    first = ZeroRecord(ModuliPoint(0.1, 1.0), 1, 1.0, 1e-12, 1.0)
    second = ZeroRecord(ModuliPoint(0.1 + 1e-10, 1.0), 1, 1.0, 1e-14, 1.0)
    third = ZeroRecord(ModuliPoint(-0.2, 0.8), 1, 1.0, 1e-13, 1.0)
    merged = merge_zeros([first, second, third], 1e-8)
    assert len(merged) == 2
    assert merged[1].newton_residual == 1e-14


def test_6_boundary_nudging():
    """Test the response to |f| dipping on the contour.

    Validates:
        - with nudging disabled the dip raises BoundaryTooCloseException at once
        - with nudging every expanded rectangle is tried before giving up
        - a nudged rectangle contains the original one
    """
    f, f_prime = _polynomial(A)
    # a reference scale this large makes every boundary look like a dip
    with pytest.raises(BoundaryTooCloseException) as caught:
        contour_winding(f, f_prime, RECT, scale=1e12, nudge=False)
    assert caught.value.extras["nudges"] == 0

    with pytest.raises(BoundaryTooCloseException) as caught:
        contour_winding(f, f_prime, RECT, scale=1e12)
    assert caught.value.extras["nudges"] == RunConfig.for_testing().max_nudges

    grown = RECT.expanded(0.01)
    assert grown.contains(RECT.corners[0]) and grown.contains(RECT.corners[2])
    assert grown.width > RECT.width


def test_7_verify_simple_families():
    """Test the simple-zero verdict on f_{k,C} families.

    Validates:
        - every located zero is simple
        - the winding total equals the number of zeros found
        - the dense-grid count agrees with the contour count
    """
    rect = Rectangle(-0.5, 0.5, 0.6, 1.6)
    for k, C in ((0, None), (1, None), (2, 2 + 1j), (3, -1 + 0.5j)):
        verdict = verify_simple(k, C, rect, grid=(48, 48))
        assert verdict.all_simple, verdict.to_dict()
        assert verdict.winding_total == sum(z.winding for z in verdict.zeros)
        assert verdict.grid_count == verdict.winding_total
        for zero in verdict.zeros:
            assert abs(f_value(k, C, zero.location)) / zero.scale < 1e-8


def test_8_lemma_witnesses_at_zeros():
    """Test the companion numerator at the zeros of f_{k,C}.

    Validates:
        - the companion does not vanish where f does
        - the witness attached by verify_simple matches lemma_witness
    """
    rect = Rectangle(-0.5, 0.5, 0.6, 1.6)
    for k in range(4):
        verdict = verify_simple(k, 2 + 1j, rect)
        assert verdict.witnesses_ok
        for zero in verdict.zeros:
            witness = lemma_witness(k, 2 + 1j, zero.location)
            assert witness.relative > 1e-6
            assert abs(zero.witness.companion - witness.companion) <= 1e-12 * max(1.0, abs(witness.companion))


def test_9_constructed_zero_is_found():
    """Test that a zero placed by choosing C = phi_1(tau0) is located.

    Validates:
        - f_{1,C}(tau0) vanishes for that C
        - verify_simple finds a simple zero at tau0
    """
    from torus_zeros.models.enums import PhiBranch
    from torus_zeros.moduli.functions import phi

    tau0 = 0.1 + 1.1j
    C = phi(PhiBranch.K1, tau0).value
    verdict = verify_simple(1, C, Rectangle(-0.3, 0.4, 0.8, 1.4))
    assert verdict.all_simple
    assert min(abs(z.location.tau - tau0) for z in verdict.zeros) < 1e-9


def test_10_newton_polish():
    """Test that Newton keeps stepping once the residual test passes.

    Validates:
        - a loose target still returns the root to rounding accuracy
        - the multiplicity-scaled step lands on a double root
        - a failing iteration returns None
    """
    root = 0.3 + 0.72j
    f, f_prime = _polynomial(root, B)
    tau, residual, derivative = newton_refine(f, f_prime, root + 0.01, 1e-3, 60)
    assert abs(tau - root) < 1e-13
    assert residual < 1e-13
    assert abs(derivative - abs(root - B)) < 1e-12

    f, f_prime = _polynomial(A, A)
    tau, residual, _ = newton_refine(f, f_prime, A + 0.02j, 1e-10, 60, multiplicity=2)
    assert abs(tau - A) < 1e-12
    assert residual < 1e-20

    assert newton_refine(f, f_prime, A + 0.02j, 1e-10, 1, multiplicity=2) is None


def test_11_unsettled_multiple_zero():
    """Test that a zero left at max depth must pass the Newton bar.

    Validates:
        - with a single Newton iteration the double zero cannot be refined
          and the scan raises MaxDepthException instead of recording it
    """
    init_run_config(RunConfig.for_testing(max_depth=6, newton_max_iter=1))
    f, f_prime = _polynomial(A, A)
    with pytest.raises(MaxDepthException) as caught:
        scan_zeros(f, f_prime, RECT)
    assert caught.value.extras["winding"] == 2
