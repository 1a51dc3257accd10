import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from locmark.errors import DomainError, StructureError
from locmark.geometry import (
    FeasibilityProblem,
    compress_support,
    difference_phases,
    hull_contains_origin,
    min_hull_norm,
    simplex_feasible,
    single_constraint_problem,
    sum_phases,
)
from locmark.phases import Phase, PhaseSet

from oracles import circular_distance, grid_min_norm, match_phases

pi = Phase.pi
angles = st.lists(st.floats(0, 2 * math.pi, allow_nan=False, exclude_max=True), min_size=1, max_size=6)
exact_angles = st.lists(st.integers(0, 23), min_size=1, max_size=6).map(lambda ns: [pi(n, 12) for n in ns])


def fracs(ps):
    return sorted(p.pi_frac for p in ps)


@pytest.mark.parametrize("phases", [
    [pi(0), pi(1, 2), pi(3, 2)],
    [pi(0), pi(3, 4), pi(5, 4)],
    [pi(0), pi(1)],
])
def test_contains_origin(phases):
    h = hull_contains_origin(phases)
    assert h.contains_origin and h.min_norm == 0
    assert abs(np.dot(h.weights, PhaseSet.of(phases).points())) < 1e-15


def test_antipodal_pair_is_on_boundary():
    h = hull_contains_origin([pi(0), pi(1)])
    assert h.on_boundary
    assert h.weights == (0.5, 0.5)


def test_excluded_arc():
    h = hull_contains_origin([pi(0), pi(1, 3), pi(5, 3)])
    assert not h.contains_origin
    assert h.min_norm == 0.5  # cos(pi/3)
    assert h.min_norm == pytest.approx(grid_min_norm([0, math.pi / 3, 5 * math.pi / 3]), abs=2e-3)
    assert h.normal == pi(0)


def test_witness_weights_for_three_point_set():
    assert hull_contains_origin([pi(0), pi(1, 2), pi(3, 2)]).weights == (0.0, 0.5, 0.5)


def test_empty_set_rejected():
    with pytest.raises(DomainError):
        hull_contains_origin([])


@pytest.mark.parametrize("phases,norm", [
    ([pi(0)], 1.0),
    ([pi(0), pi(1)], 0.0),
    ([pi(0), pi(1, 2)], math.sqrt(2) / 2),
])
def test_min_hull_norm(phases, norm):
    assert min_hull_norm(phases) == pytest.approx(norm, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(angles, st.floats(-10, 10, allow_nan=False))
def test_min_norm_rotation_invariant(thetas, delta):
    a = min_hull_norm(PhaseSet.of(thetas))
    b = min_hull_norm(PhaseSet.of([t + delta for t in thetas]))
    assert a == pytest.approx(b, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(angles)
def test_min_norm_is_lower_bound_of_grid(thetas):
    h = hull_contains_origin(PhaseSet.of(thetas))
    g = grid_min_norm(thetas[:4], step=1e-2) if len(thetas) <= 4 else None
    if g is not None:
        assert g >= h.min_norm - 1e-9
        assert g <= h.min_norm + 2e-2


@settings(max_examples=60, deadline=None)
@given(exact_angles)
def test_exact_and_float_agree_off_boundary(ps):
    exact = hull_contains_origin(ps)
    assume(abs(exact.max_gap - math.pi) > 1e-6)
    floats = hull_contains_origin([p.radians for p in ps])
    assert exact.exact and not floats.exact
    assert exact.contains_origin == floats.contains_origin
    assert exact.min_norm == pytest.approx(floats.min_norm, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.one_of(angles, exact_angles))
def test_difference_phases_closed_under_negation(thetas):
    d = difference_phases(PhaseSet.of(thetas))
    if d.is_exact:
        assert sorted((-p).key() for p in d) == sorted(p.key() for p in d)
        assert pi(0) in d.phases
    else:
        got = d.radians()
        assert match_phases(-got, got, 1e-12)
        assert min(circular_distance(x, 0.0) for x in got) < 1e-12


def test_difference_phases_examples():
    assert fracs(difference_phases([pi(0), pi(1, 2)])) == [0, 0, Fraction(1, 2), Fraction(3, 2)]
    assert fracs(difference_phases([pi(0), pi(3, 5)])) == [0, 0, Fraction(3, 5), Fraction(7, 5)]
    assert fracs(difference_phases([pi(2, 7)])) == [0]


def test_sum_phases_examples():
    got = sum_phases([pi(0), pi(-3, 5)], [pi(0), pi(-2, 5)])
    assert fracs(got) == [0, Fraction(1), Fraction(7, 5), Fraction(8, 5)]
    assert fracs(sum_phases([pi(0)], [pi(0)])) == [0]
    assert fracs(sum_phases([pi(0), pi(1)], [pi(0), pi(1)])) == [0, 0, 1, 1]


def test_simplex_single_constraint():
    v = simplex_feasible(single_constraint_problem([pi(0), pi(1, 2), pi(3, 2)]))
    assert v.feasible and v.exact
    assert v.weights == (0, Fraction(1, 2), Fraction(1, 2))


def test_simplex_antipodal():
    v = simplex_feasible(single_constraint_problem([pi(0), pi(1)]))
    assert v.feasible
    assert v.weights == (Fraction(1, 2), Fraction(1, 2))


def test_simplex_two_constraints_infeasible():
    f = FeasibilityProblem(3, ((pi(0), pi(1, 2), pi(3, 2)), (pi(0), pi(5, 4), pi(3, 4))))
    v = simplex_feasible(f)
    assert v.feasible is False
    assert not v.exact  # 5pi/4 is not a multiple of pi/2, so the float solver runs
    assert v.forced_point == pytest.approx((0, 0.5, 0.5))
    # |1*0 + e^{i5pi/4}/2 + e^{i3pi/4}/2| = cos(pi/4)
    assert v.forced_residual == pytest.approx(math.sqrt(2) / 2, abs=1e-10)


def test_malformed_constraint_rejected():
    with pytest.raises(StructureError):
        FeasibilityProblem(3, ((pi(0), pi(1)),))


def test_compress_support_merges_identical_columns():
    f = FeasibilityProblem(4, ((pi(0), pi(1), pi(0), pi(1, 2)), (pi(1), pi(0), pi(1), pi(1))))
    g, groups = compress_support(f)
    assert g.support_size == 3
    assert sorted(map(sorted, groups)) == [[0, 2], [1], [3]]
    assert simplex_feasible(g).feasible == simplex_feasible(f).feasible


@settings(max_examples=80, deadline=None)
@given(st.one_of(angles, exact_angles))
def test_simplex_agrees_with_hull(thetas):
    ps = PhaseSet.of(thetas)
    h = hull_contains_origin(ps)
    assume(h.exact or abs(h.max_gap - math.pi) > 1e-7)
    assert simplex_feasible(single_constraint_problem(list(ps)), diagnostics=False).feasible == h.contains_origin
